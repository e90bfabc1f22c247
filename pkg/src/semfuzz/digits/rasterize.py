"""Control points -> bitmap via supersampled nonzero-winding fill.

Each closed Bezier path is flattened to a polygon; all polygons are
scan-filled together at 4x resolution under the nonzero winding rule,
then box-downsampled to an anti-aliased float bitmap in [0, 1].

Nonzero winding matters for fuzzing: contour tracing orients hole
boundaries opposite to outlines, so the middle of an 8 stays empty,
while the incidental self-overlaps that mutated control points create
stay filled instead of punching even-odd holes into strokes.
"""

import numpy as np

from .semantic import CANVAS

SUPERSAMPLE = 4
FLATTEN_STEPS = 24


def _flatten_path(path):
    """Sample the path's cubics into one polygon vertex list."""
    n = len(path) // 3
    t = np.linspace(0.0, 1.0, FLATTEN_STEPS, endpoint=False)
    b0 = (1 - t) ** 3
    b1 = 3 * (1 - t) ** 2 * t
    b2 = 3 * (1 - t) * t**2
    b3 = t**3
    pieces = []
    for i in range(n):
        p0 = path[3 * i]
        c1 = path[3 * i + 1]
        c2 = path[3 * i + 2]
        p3 = path[(3 * i + 3) % len(path)]
        pieces.append(
            np.outer(b0, p0) + np.outer(b1, c1) + np.outer(b2, c2) + np.outer(b3, p3)
        )
    return np.concatenate(pieces, axis=0)


def _fill_nonzero(polygons, side):
    """Scanline fill of closed polygons under the nonzero winding rule.

    ``polygons`` are (m, 2) float vertex arrays in pixel coordinates of
    a (side, side) grid; a pixel is inside when the winding number at
    its center is nonzero.
    """
    mask = np.zeros((side, side), dtype=bool)
    segs = []
    for poly in polygons:
        nxt = np.roll(poly, -1, axis=0)
        segs.append(np.column_stack([poly, nxt]))
    if not segs:
        return mask
    x0, y0, x1, y1 = np.concatenate(segs, axis=0).T
    keep = y0 != y1
    x0, y0, x1, y1 = x0[keep], y0[keep], x1[keep], y1[keep]
    if len(x0) == 0:
        return mask
    for r in range(side):
        yc = r + 0.5
        up = (y0 <= yc) & (yc < y1)
        dn = (y1 <= yc) & (yc < y0)
        sel = up | dn
        if not sel.any():
            continue
        t = (yc - y0[sel]) / (y1[sel] - y0[sel])
        xs = x0[sel] + t * (x1[sel] - x0[sel])
        signs = np.where(up[sel], 1, -1)
        order = np.argsort(xs, kind="stable")
        xs = xs[order]
        wind = np.cumsum(signs[order])
        if len(wind) < 2:
            continue
        # fill spans between consecutive crossings with nonzero winding
        for i in np.flatnonzero(wind[:-1] != 0):
            a = int(np.ceil(xs[i] - 0.5))
            b = int(np.ceil(xs[i + 1] - 0.5))
            if b > a:
                mask[r, max(a, 0) : min(b, side)] = True
    return mask


def rasterize(sem, size=CANVAS):
    """Render the semantic model to a (size, size) float bitmap.

    An empty model, or one whose paths all have zero area, yields a
    blank bitmap.
    """
    s = SUPERSAMPLE
    side = size * s
    if sem.is_empty():
        return np.zeros((size, size), dtype=np.float32)
    # canvas pixel centers sit at integers; supersample cell (r, c)
    # covers [r, r+1) x [c, c+1), so the affine map is u = s * (x + 1/2)
    polygons = [(_flatten_path(p) + 0.5) * s for p in sem.paths]
    acc = _fill_nonzero(polygons, side)
    out = acc.reshape(size, s, size, s).mean(axis=(1, 3))
    return out.astype(np.float32)


def iou(a, b, level=0.5):
    """Intersection over union of two bitmaps binarized at ``level``."""
    fa = np.asarray(a) >= level
    fb = np.asarray(b) >= level
    union = np.logical_or(fa, fb).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(fa, fb).sum() / union)
