"""Gradient-based local explanations: noise-averaged gradients, path
integrals over scaled inputs, and class-activation maps from the last
convolutional layer.

All explainers return a normalized Heatmap with the spatial size of the
explained image.  Inputs here are single-channel; channel collapse is a
sum of absolute values so the same code serves multi-channel frames.
"""

from dataclasses import dataclass

import numpy as np

from .heatmap import Heatmap, normalize

_METHODS = ("smoothgrad", "integrated_gradients", "gradcam_pp")


@dataclass
class XaiConfig:
    method: str = "smoothgrad"
    n_samples: int = 25          # noise samples for smoothgrad
    sigma: float = 0.15          # noise std as a fraction of the input range
    ig_steps: int = 64           # midpoint steps for integrated gradients
    epsilon: float = 0.1         # low-intensity threshold applied downstream

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}; options: {_METHODS}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.ig_steps < 1:
            raise ValueError("ig_steps must be >= 1")
        if not 0 <= self.epsilon < 1:
            raise ValueError("epsilon must be in [0, 1)")


def _default_target(net, x):
    out = net.forward(x)
    return int(np.argmax(out)) if net.kind == "classifier" else 0


def _collapse(grads):
    """(C, h, w) signed attributions -> (h, w) nonnegative map."""
    return np.abs(grads).sum(axis=0)


def smoothgrad(net, x, cfg, rng=None, target=None):
    """Average absolute input gradient over noisy copies of the input.

    With sigma == 0 and n_samples == 1 this is exactly the normalized
    vanilla |gradient|.  Noise draws come from ``rng``, so a fixed seed
    reproduces the heatmap bit for bit.
    """
    x = np.asarray(x, dtype=np.float32)
    if target is None:
        target = _default_target(net, x)
    scale = cfg.sigma * float(x.max() - x.min())
    acc = np.zeros(x.shape, dtype=np.float64)
    chunk = 64
    remaining = cfg.n_samples
    while remaining > 0:
        n = min(chunk, remaining)
        if scale > 0:
            if rng is None:
                raise ValueError("smoothgrad with sigma > 0 needs an rng")
            xs = x[None] + rng.normal(0.0, scale, (n, *x.shape)).astype(np.float32)
        else:
            xs = np.broadcast_to(x, (n, *x.shape))
        grads = net.input_gradient_batch(xs, target)
        acc += np.abs(grads).astype(np.float64).sum(axis=0)
        remaining -= n
    mean_abs = acc / cfg.n_samples
    return normalize(mean_abs.sum(axis=0))


def ig_attributions(net, x, cfg, target=None, baseline=None):
    """Signed raw attributions from the midpoint path integral.

    The sum of the returned array approximates f(x) - f(baseline) for
    the target output (the completeness property).
    """
    x = np.asarray(x, dtype=np.float32)
    if baseline is None:
        baseline = np.zeros_like(x)
    baseline = np.asarray(baseline, dtype=np.float32)
    if baseline.shape != x.shape:
        raise ValueError("baseline shape must match the input")
    if target is None:
        target = _default_target(net, x)
    delta = (x - baseline).astype(np.float64)
    acc = np.zeros(x.shape, dtype=np.float64)
    m = cfg.ig_steps
    chunk = 64
    for lo in range(0, m, chunk):
        alphas = (np.arange(lo, min(lo + chunk, m)) + 0.5) / m
        alphas = alphas.reshape(-1, *([1] * x.ndim)).astype(np.float32)
        xs = baseline[None] + alphas * (x - baseline)[None]
        grads = net.input_gradient_batch(xs, target)
        acc += grads.astype(np.float64).sum(axis=0)
    return (delta * (acc / m)).astype(np.float32)


def integrated_gradients(net, x, cfg, rng=None, target=None, baseline=None):
    attr = ig_attributions(net, x, cfg, target=target, baseline=baseline)
    return normalize(_collapse(attr))


def _bilinear_upsample(m, out_h, out_w):
    in_h, in_w = m.shape
    if (in_h, in_w) == (out_h, out_w):
        return m
    ys = np.linspace(0.0, in_h - 1.0, out_h) if in_h > 1 else np.zeros(out_h)
    xs = np.linspace(0.0, in_w - 1.0, out_w) if in_w > 1 else np.zeros(out_w)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    return (
        m[np.ix_(y0, x0)] * (1 - wy) * (1 - wx)
        + m[np.ix_(y0, x1)] * (1 - wy) * wx
        + m[np.ix_(y1, x0)] * wy * (1 - wx)
        + m[np.ix_(y1, x1)] * wy * wx
    )


def gradcam_pp(net, x, cfg, rng=None, target=None):
    """Class-activation map from positive partial derivatives at the
    last conv layer, with the closed-form per-location weights built
    from squared and cubed gradients, then bilinearly upsampled.

    An all-zero gradient yields a uniform zero heatmap flagged
    degenerate rather than an error.
    """
    x = np.asarray(x, dtype=np.float32)
    if target is None:
        target = _default_target(net, x)
    a, g = net.conv_activations_and_grads(x, target)
    a = a.astype(np.float64)
    g = g.astype(np.float64)
    out_h, out_w = x.shape[-2], x.shape[-1]
    if not np.any(g):
        return Heatmap(np.zeros((out_h, out_w), dtype=np.float32), 0.0, degenerate=True)
    g2 = g * g
    g3 = g2 * g
    denom = 2.0 * g2 + (a * g3).sum(axis=(1, 2), keepdims=True)
    alpha = np.divide(g2, denom, out=np.zeros_like(g2), where=denom != 0)
    w = (alpha * np.maximum(g, 0.0)).sum(axis=(1, 2))
    cam = np.maximum((w[:, None, None] * a).sum(axis=0), 0.0)
    return normalize(_bilinear_upsample(cam, out_h, out_w))


_DISPATCH = {
    "smoothgrad": smoothgrad,
    "integrated_gradients": integrated_gradients,
    "gradcam_pp": gradcam_pp,
}


def explain(net, x, cfg, rng=None, target=None):
    """Compute the configured explanation for one input."""
    return _DISPATCH[cfg.method](net, x, cfg, rng=rng, target=target)
