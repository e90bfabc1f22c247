"""Normalized attention heatmaps and their preprocessing.

A heatmap stores min-max normalized values in [0, 1] together with the
mean of the raw map it came from, which the qualitative metrics need
after normalization has destroyed the scale.  A raw map with no spread
normalizes to all zeros and is flagged degenerate rather than treated
as an error, so campaign code can fall back to uniform behavior.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Heatmap:
    values: np.ndarray  # float32, (h, w), in [0, 1]
    raw_mean: float
    degenerate: bool = False

    @property
    def shape(self):
        return self.values.shape

    def __post_init__(self):
        v = self.values
        if v.ndim != 2:
            raise ValueError("heatmap values must be 2D")
        if v.size and (v.min() < 0 or v.max() > 1.0 + 1e-6):
            raise ValueError("heatmap values outside [0, 1]")


def normalize(raw):
    """Min-max normalize a raw attention map into a Heatmap.

    Scale-invariant (c * raw normalizes identically for c > 0) and
    idempotent on already-normalized data.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 2:
        raise ValueError("raw map must be 2D")
    lo = float(raw.min())
    hi = float(raw.max())
    mean = float(raw.mean())
    if hi - lo <= 0:
        return Heatmap(np.zeros_like(raw, dtype=np.float32), mean, degenerate=True)
    values = ((raw - lo) / (hi - lo)).astype(np.float32)
    return Heatmap(values, mean)


def threshold(h, epsilon):
    """Zero out values below ``epsilon``; values at or above pass through."""
    if not 0 <= epsilon < 1:
        raise ValueError("epsilon must be in [0, 1)")
    if epsilon == 0:
        return h
    values = np.where(h.values < epsilon, 0.0, h.values).astype(np.float32)
    dead = not np.any(values > 0)
    return Heatmap(values, h.raw_mean, degenerate=h.degenerate or dead)


def heatmap_stats(h):
    """(mean intensity of the raw map, Shannon entropy in bits).

    Entropy treats the normalized map as a probability distribution
    (values divided by their sum); an all-zero map has entropy 0.
    """
    total = float(h.values.sum())
    if total <= 0:
        return h.raw_mean, 0.0
    p = h.values.astype(np.float64).ravel() / total
    nz = p[p > 0]
    entropy = float(-(nz * np.log2(nz)).sum())
    return h.raw_mean, entropy


def save_pgm(path, values):
    """Debug dump as binary PGM, values scaled from [0, 1] to 0..255."""
    arr = np.asarray(values, dtype=np.float64)
    arr = np.clip(arr, 0.0, 1.0)
    data = (arr * 255.0 + 0.5).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(data.tobytes())


def load_pgm(path):
    """Read back a binary PGM written by save_pgm, as float in [0, 1]."""
    with open(path, "rb") as f:
        blob = f.read()
    parts = blob.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h = (int(t) for t in parts[1].split())
    maxval = int(parts[2])
    data = np.frombuffer(parts[3][: w * h], dtype=np.uint8).reshape(h, w)
    return data.astype(np.float32) / maxval
