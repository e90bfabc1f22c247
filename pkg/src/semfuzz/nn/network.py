"""Fixed-stack networks with reverse-mode gradients.

A :class:`Network` is an ordered list of layers plus metadata.  Forward
and gradient evaluation are pure functions of (network, input), so a
trained network is safe to share between threads or processes.  Two
canned architectures cover this project's needs: a 10-way digit
classifier on 28x28 bitmaps and a scalar steering regressor on 64x64
frames.
"""

import numpy as np

from .layers import Conv2d, Dense, MaxPool2d, ReLU, Softmax, Tanh
from .tensor import FLOAT, ShapeMismatchError, ensure_finite


class UnsupportedNetworkError(ValueError):
    """Requested a gradient path the layer stack cannot provide."""


class Network:
    """Immutable-after-training layer stack.

    kind is "classifier" (softmax head, ``n_outputs`` classes) or
    "regressor" (scalar head in [-1, 1]).
    """

    def __init__(self, layers, input_shape, kind, n_outputs, metadata=None):
        self.layers = layers
        self.input_shape = tuple(input_shape)
        self.kind = kind
        self.n_outputs = n_outputs
        self.metadata = dict(metadata or {})
        self._check_chain()

    def _check_chain(self):
        shape = self.input_shape
        for layer in self.layers:
            shape = layer.out_shape(shape)
        if shape != (self.n_outputs,):
            raise ShapeMismatchError(
                f"layer stack produces {shape}, expected ({self.n_outputs},)"
            )

    # -- basic queries ---------------------------------------------------

    def parameters(self):
        for layer in self.layers:
            yield from layer.params

    def param_count(self):
        return sum(p.size for p in self.parameters())

    def conv_indices(self):
        return [i for i, l in enumerate(self.layers) if isinstance(l, Conv2d)]

    def last_conv_index(self):
        idx = self.conv_indices()
        if not idx:
            raise UnsupportedNetworkError("network has no convolutional layer")
        return idx[-1]

    # -- forward ---------------------------------------------------------

    def _as_batch(self, x):
        x = np.asarray(x, dtype=FLOAT)
        if x.shape == self.input_shape:
            return x[None], True
        if x.shape[1:] == self.input_shape:
            return x, False
        raise ShapeMismatchError(
            f"input shape {x.shape} does not match {self.input_shape}"
        )

    def forward(self, x):
        """Evaluate the network; accepts one sample or a batch."""
        xb, single = self._as_batch(x)
        a = xb
        for layer in self.layers:
            a = layer.forward(a)
        ensure_finite(a, "network output")
        return a[0] if single else a

    def forward_tape(self, xb):
        """Batch forward keeping per-layer caches for backward."""
        caches = []
        a = xb
        for layer in self.layers:
            a, cache = layer.forward_tape(a)
            caches.append(cache)
        return a, caches

    def backward(self, caches, dy, upto=0, want_param_grads=False):
        """Backpropagate ``dy`` down to layer index ``upto``.

        Returns (gradient w.r.t. layer ``upto``'s input, list of per-layer
        parameter gradients ordered like ``self.layers`` when requested).
        """
        param_grads = [None] * len(self.layers)
        g = dy
        for i in range(len(self.layers) - 1, upto - 1, -1):
            g, grads = self.layers[i].backward(caches[i], g, need_param_grads=want_param_grads)
            if want_param_grads:
                param_grads[i] = grads
        return (g, param_grads) if want_param_grads else g

    # -- gradient surfaces used by the explainers ------------------------

    def _seed_grad(self, out, target):
        if self.kind == "classifier":
            if not (0 <= int(target) < self.n_outputs):
                raise ValueError(f"target class {target} out of range")
            seed = np.zeros_like(out)
            seed[:, int(target)] = 1.0
        else:
            seed = np.zeros_like(out)
            seed[:, 0] = 1.0
        return seed

    def input_gradient(self, x, target):
        """d output[target] / d input; follows the input's batching."""
        xb, single = self._as_batch(x)
        out, caches = self.forward_tape(xb)
        dx = self.backward(caches, self._seed_grad(out, target))
        ensure_finite(dx, "input gradient")
        return dx[0] if single else dx

    def input_gradient_batch(self, xb, target):
        """Per-sample input gradients for a batch sharing one target."""
        xb, _ = self._as_batch(xb)
        return self.input_gradient(xb, target)

    def conv_activations_and_grads(self, x, target, layer=None):
        """Feature maps at a conv layer and d output[target] / d maps.

        ``layer`` defaults to the last convolutional layer.  Both returned
        arrays have the conv output's (channels, h, w) shape.
        """
        idx = self.last_conv_index() if layer is None else layer
        if not isinstance(self.layers[idx], Conv2d):
            raise UnsupportedNetworkError(f"layer {idx} is not convolutional")
        xb, single = self._as_batch(x)
        caches = []
        a = xb
        conv_out = None
        for i, l in enumerate(self.layers):
            a, cache = l.forward_tape(a)
            caches.append(cache)
            if i == idx:
                conv_out = a
        da = self.backward(caches, self._seed_grad(a, target), upto=idx + 1)
        ensure_finite(da, "conv gradient")
        if single:
            return conv_out[0], da[0]
        return conv_out, da

    def _activation_before(self, xb, idx):
        a = xb
        for layer in self.layers[:idx]:
            a = layer.forward(a)
        return a

    def penultimate(self, x):
        """Activations feeding the final Dense layer (embedding space)."""
        dense_idx = [i for i, l in enumerate(self.layers) if isinstance(l, Dense)]
        if not dense_idx:
            raise UnsupportedNetworkError("network has no dense layer")
        cut = dense_idx[-1]
        xb, single = self._as_batch(x)
        a = self._activation_before(xb, cut)
        a = a.reshape(a.shape[0], -1)
        return a[0] if single else a


def digit_classifier(rng):
    """2 conv + max-pool + 2 dense softmax classifier for 28x28 digits."""
    layers = [
        Conv2d(1, 8, 3, rng=rng),
        ReLU(),
        MaxPool2d(2),
        Conv2d(8, 16, 3, rng=rng),
        ReLU(),
        Dense(16 * 11 * 11, 128, rng=rng),
        ReLU(),
        Dense(128, 10, rng=rng),
        Softmax(),
    ]
    return Network(layers, (1, 28, 28), "classifier", 10)


def steering_regressor(rng):
    """3 conv + 2 dense tanh regressor for 64x64 top-down frames."""
    layers = [
        Conv2d(1, 8, 5, stride=2, rng=rng),
        ReLU(),
        Conv2d(8, 12, 3, stride=2, rng=rng),
        ReLU(),
        Conv2d(12, 16, 3, stride=2, rng=rng),
        ReLU(),
        Dense(16 * 6 * 6, 64, rng=rng),
        ReLU(),
        Dense(64, 1, rng=rng),
        Tanh(),
    ]
    return Network(layers, (1, 64, 64), "regressor", 1)


ARCHITECTURES = {"digit": digit_classifier, "driver": steering_regressor}
