"""From heatmap + control points to sampling weights and attractors.

Two selection strategies over a thresholded, normalized heatmap:

* square windows: a control point's weight is the mean heatmap value in
  the (2d+1)^2 window centered on its rounded coordinates, windows
  clipped at the image border (mean over in-bounds cells only);
* clustering: hot pixels are partitioned to their nearest control point
  (one Voronoi assignment step in coordinate space, no centroid
  update), a point's weight is the sum of cluster pixel intensities
  divided by their distance to the point (clamped below at 1), and each
  cluster's intensity-weighted centroid is the attention attractor a
  mutation can move toward.

Control points are (x, y) with x the column and y the row of the map.
Weight vectors are normalized to sum 1; an all-cold map falls back to
uniform weights flagged degenerate so campaigns can always proceed.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_WINDOW_HALF_WIDTH = 1  # ws = 2d+1 = 3


@dataclass(frozen=True)
class WeightVector:
    weights: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        w = self.weights
        if w.ndim != 1 or len(w) == 0:
            raise ValueError("weights must be a nonempty vector")
        if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-6:
            raise ValueError("weights must be nonnegative and sum to 1")

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray        # (h, w) int, -1 for cold pixels
    points: np.ndarray        # the (n, 2) control points that seeded it
    degenerate: bool = False  # no hot pixel anywhere

    @property
    def n_clusters(self):
        return len(self.points)

    def pixels(self, k):
        """Cluster k's pixel coordinates (m, 2) as (x, y) plus a row/col index."""
        rows, cols = np.nonzero(self.labels == k)
        return np.column_stack([cols, rows]), rows, cols


def _normalized(raw):
    total = float(raw.sum())
    if total <= 0:
        n = len(raw)
        return WeightVector(np.full(n, 1.0 / n), degenerate=True)
    return WeightVector(raw / total)


def window_weights_raw(h, points, half_width=DEFAULT_WINDOW_HALF_WIDTH):
    """Pre-normalization window weights: mean intensity per window."""
    if half_width < 0:
        raise ValueError("half width must be >= 0")
    values = h.values
    height, width = values.shape
    pts = np.asarray(points, dtype=np.float64)
    raw = np.zeros(len(pts))
    d = half_width
    for k, (x, y) in enumerate(pts):
        cx = int(np.floor(x + 0.5))
        cy = int(np.floor(y + 0.5))
        x0, x1 = max(cx - d, 0), min(cx + d, width - 1)
        y0, y1 = max(cy - d, 0), min(cy + d, height - 1)
        if x0 > x1 or y0 > y1:
            raw[k] = 0.0  # window entirely off the map
            continue
        raw[k] = float(values[y0 : y1 + 1, x0 : x1 + 1].astype(np.float64).mean())
    return raw


def window_weights(h, points, half_width=DEFAULT_WINDOW_HALF_WIDTH):
    """Mean heatmap intensity in a square window around each point."""
    return _normalized(window_weights_raw(h, points, half_width))


def cluster_partition(h, points):
    """Assign every hot pixel (> 0) to its nearest control point.

    Ties go to the lowest point index.  One assignment pass, no update.
    """
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) == 0:
        raise ValueError("need at least one control point")
    values = h.values
    rows, cols = np.nonzero(values > 0)
    labels = np.full(values.shape, -1, dtype=np.int64)
    if len(rows) == 0:
        return ClusterAssignment(labels, pts, degenerate=True)
    pix = np.column_stack([cols, rows]).astype(np.float64)
    d2 = ((pix[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    nearest = d2.argmin(axis=1)  # argmin takes the lowest index on ties
    labels[rows, cols] = nearest
    return ClusterAssignment(labels, pts)


def cluster_weights_raw(assign, h, points=None):
    """Pre-normalization cluster weights (empty cluster -> 0)."""
    pts = assign.points if points is None else np.asarray(points, dtype=np.float64)
    values = h.values
    raw = np.zeros(len(pts))
    for k in range(len(pts)):
        pix, rows, cols = assign.pixels(k)
        if len(pix) == 0:
            continue
        dist = np.maximum(1.0, np.hypot(*(pix - pts[k]).T))
        raw[k] = float((values[rows, cols].astype(np.float64) / dist).sum())
    return raw


def cluster_weights(assign, h, points=None):
    """Sum of cluster pixel intensities over distance to the point."""
    return _normalized(cluster_weights_raw(assign, h, points))


def attractor(assign, h, k):
    """Intensity-weighted centroid of cluster k, or None if undefined."""
    pix, rows, cols = assign.pixels(k)
    if len(pix) == 0:
        return None
    inten = h.values[rows, cols].astype(np.float64)
    total = inten.sum()
    if total <= 0:
        return None
    return (inten[:, None] * pix).sum(axis=0) / total


def sample_concept(w, rng):
    """Draw one control-point index proportionally to its weight."""
    return int(rng.choice(len(w.weights), p=w.weights))
