"""Layer set: conv2d, max-pool, dense, relu, tanh, softmax.

Each layer is stateless at call time: ``forward_tape`` returns the output
plus an opaque cache, ``backward`` consumes that cache and the upstream
gradient and returns the input gradient plus per-parameter gradients in
the same order as ``params``.  Layer objects own their parameters but
never mutate them during forward/backward, so a network can be shared
across threads once built.

Shapes follow the (batch, channels, height, width) convention for images
and (batch, features) for dense activations.  Dense flattens trailing
axes itself, so no explicit flatten layer is needed.
"""

import numpy as np

from .tensor import FLOAT


def _im2col(x, kh, kw, stride):
    """Gather conv windows: (B,C,H,W) -> (B, C*kh*kw, oh*ow).

    The channel-kernel axis leads so both the forward matmul and the
    backward scatter work on reshape views without transposes.
    """
    b, c, h, w = x.shape
    oh = (h - kh) // stride + 1
    ow = (w - kw) // stride + 1
    sb, sc, sh, sw = x.strides
    view = np.lib.stride_tricks.as_strided(
        x,
        shape=(b, c, kh, kw, oh, ow),
        strides=(sb, sc, sh, sw, sh * stride, sw * stride),
        writeable=False,
    )
    cols = np.ascontiguousarray(view).reshape(b, c * kh * kw, oh * ow)
    return cols, oh, ow


def _col2im(dcols, x_shape, kh, kw, stride, oh, ow):
    """Scatter-add column gradients back to input layout."""
    b, c, h, w = x_shape
    dx = np.zeros(x_shape, dtype=dcols.dtype)
    d6 = dcols.reshape(b, c, kh, kw, oh, ow)
    for i in range(kh):
        for j in range(kw):
            dx[:, :, i : i + oh * stride : stride, j : j + ow * stride : stride] += d6[
                :, :, i, j
            ]
    return dx


class Conv2d:
    """Valid (unpadded) 2D convolution with a square or rectangular kernel."""

    def __init__(self, in_channels, out_channels, kernel_size, stride=1, rng=None):
        kh, kw = (kernel_size, kernel_size) if np.isscalar(kernel_size) else kernel_size
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = (kh, kw)
        self.stride = stride
        fan_in = in_channels * kh * kw
        bound = np.sqrt(6.0 / fan_in)
        rng = rng or np.random.default_rng(0)
        self.weight = rng.uniform(-bound, bound, (out_channels, in_channels, kh, kw)).astype(FLOAT)
        self.bias = np.zeros(out_channels, dtype=FLOAT)

    @property
    def params(self):
        return [self.weight, self.bias]

    def out_shape(self, in_shape):
        c, h, w = in_shape
        if c != self.in_channels:
            raise ValueError(f"conv expects {self.in_channels} channels, got {c}")
        kh, kw = self.kernel
        if h < kh or w < kw:
            raise ValueError("input smaller than kernel")
        return (
            self.out_channels,
            (h - kh) // self.stride + 1,
            (w - kw) // self.stride + 1,
        )

    def forward_tape(self, x):
        kh, kw = self.kernel
        cols, oh, ow = _im2col(x, kh, kw, self.stride)
        wmat = self.weight.reshape(self.out_channels, -1)
        y = (wmat @ cols).reshape(x.shape[0], self.out_channels, oh, ow)
        y += self.bias[:, None, None]
        return y, (cols, x.shape, oh, ow)

    def forward(self, x):
        return self.forward_tape(x)[0]

    def backward(self, cache, dy, need_param_grads=True):
        cols, x_shape, oh, ow = cache
        b = x_shape[0]
        wmat = self.weight.reshape(self.out_channels, -1)
        dyf = dy.reshape(b, self.out_channels, oh * ow)
        grads = []
        if need_param_grads:
            dw = np.tensordot(dyf, cols, axes=([0, 2], [0, 2])).reshape(self.weight.shape)
            db = dyf.sum(axis=(0, 2))
            grads = [dw.astype(dy.dtype, copy=False), db.astype(dy.dtype, copy=False)]
        dcols = wmat.T @ dyf
        kh, kw = self.kernel
        dx = _col2im(dcols, x_shape, kh, kw, self.stride, oh, ow)
        return dx, grads


class MaxPool2d:
    """Non-overlapping max pooling; ties resolve to the first window cell."""

    def __init__(self, size=2):
        self.size = size

    params = []

    def out_shape(self, in_shape):
        c, h, w = in_shape
        if h % self.size or w % self.size:
            raise ValueError(f"pool size {self.size} does not divide {h}x{w}")
        return (c, h // self.size, w // self.size)

    def forward_tape(self, x):
        s = self.size
        b, c, h, w = x.shape
        win = (
            x.reshape(b, c, h // s, s, w // s, s)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(b, c, h // s, w // s, s * s)
        )
        arg = win.argmax(axis=-1)
        y = np.take_along_axis(win, arg[..., None], axis=-1)[..., 0]
        return y, (arg, x.shape)

    def forward(self, x):
        return self.forward_tape(x)[0]

    def backward(self, cache, dy, need_param_grads=True):
        arg, x_shape = cache
        s = self.size
        b, c, h, w = x_shape
        dwin = np.zeros((b, c, h // s, w // s, s * s), dtype=dy.dtype)
        np.put_along_axis(dwin, arg[..., None], dy[..., None], axis=-1)
        dx = (
            dwin.reshape(b, c, h // s, w // s, s, s)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(x_shape)
        )
        return dx, []


class Dense:
    """Affine layer; flattens any trailing input axes."""

    def __init__(self, in_features, out_features, rng=None):
        self.in_features = in_features
        self.out_features = out_features
        bound = np.sqrt(6.0 / in_features)
        rng = rng or np.random.default_rng(0)
        self.weight = rng.uniform(-bound, bound, (out_features, in_features)).astype(FLOAT)
        self.bias = np.zeros(out_features, dtype=FLOAT)

    @property
    def params(self):
        return [self.weight, self.bias]

    def out_shape(self, in_shape):
        flat = int(np.prod(in_shape))
        if flat != self.in_features:
            raise ValueError(f"dense expects {self.in_features} features, got {flat}")
        return (self.out_features,)

    def forward_tape(self, x):
        x2 = x.reshape(x.shape[0], -1)
        y = x2 @ self.weight.T + self.bias
        return y, (x2, x.shape)

    def forward(self, x):
        return self.forward_tape(x)[0]

    def backward(self, cache, dy, need_param_grads=True):
        x2, x_shape = cache
        grads = []
        if need_param_grads:
            dw = dy.T @ x2
            db = dy.sum(axis=0)
            grads = [dw.astype(dy.dtype, copy=False), db.astype(dy.dtype, copy=False)]
        dx = (dy @ self.weight).reshape(x_shape)
        return dx, grads


class ReLU:
    params = []

    def out_shape(self, in_shape):
        return in_shape

    def forward_tape(self, x):
        y = np.maximum(x, 0)
        return y, (x > 0)

    def forward(self, x):
        return np.maximum(x, 0)

    def backward(self, cache, dy, need_param_grads=True):
        return dy * cache, []


class Tanh:
    params = []

    def out_shape(self, in_shape):
        return in_shape

    def forward_tape(self, x):
        y = np.tanh(x)
        return y, y

    def forward(self, x):
        return np.tanh(x)

    def backward(self, cache, dy, need_param_grads=True):
        return dy * (1.0 - cache * cache), []


class Softmax:
    """Row-wise softmax over the last axis."""

    params = []

    def out_shape(self, in_shape):
        return in_shape

    def forward_tape(self, x):
        z = x - x.max(axis=-1, keepdims=True)
        e = np.exp(z)
        y = e / e.sum(axis=-1, keepdims=True)
        return y, y

    def forward(self, x):
        return self.forward_tape(x)[0]

    def backward(self, cache, dy, need_param_grads=True):
        y = cache
        dot = (dy * y).sum(axis=-1, keepdims=True)
        return y * (dy - dot), []
