"""Bitmap -> control points: binarize, trace contours, simplify, fit cubics.

Pipeline: threshold the grayscale bitmap at 0.5, extract iso-contours of
the padded binary mask (marching squares via skimage), pick knot points
with Douglas-Peucker, then least-squares fit one cubic Bezier per knot
span with endpoints pinned, splitting spans whose parametric deviation
exceeds FIT_TOLERANCE pixels.  Deterministic for a given bitmap.
"""

import numpy as np
from skimage import measure

from .semantic import DigitSemantic

BINARIZE_LEVEL = 0.5
DP_TOLERANCE = 0.6     # px; knot sparsity of the simplified polygon
FIT_TOLERANCE = 0.8    # px; max parametric deviation of a fitted cubic
MIN_CONTOUR_POINTS = 8
MIN_CONTOUR_AREA = 1.5


class EmptyBitmapError(ValueError):
    """No foreground pixels after binarization."""


def _polygon_area(points):
    x, y = points[:, 0], points[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _perp_distances(points, a, b):
    """Distance of each point to the segment (a, b), degenerate-safe."""
    ab = b - a
    denom = np.hypot(*ab)
    if denom < 1e-12:
        return np.hypot(*(points - a).T)
    rel = points - a
    return np.abs(ab[0] * rel[:, 1] - ab[1] * rel[:, 0]) / denom


def _douglas_peucker(points, tolerance):
    """Indices kept by DP simplification of an open polyline."""
    keep = np.zeros(len(points), dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, len(points) - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        d = _perp_distances(points[lo + 1 : hi], points[lo], points[hi])
        k = int(np.argmax(d))
        if d[k] > tolerance:
            mid = lo + 1 + k
            keep[mid] = True
            stack.append((lo, mid))
            stack.append((mid, hi))
    return np.flatnonzero(keep)


def _closed_knots(points, tolerance):
    """Knot indices for a closed polyline (first point not repeated)."""
    n = len(points)
    # split at the two mutually farthest of four spread candidates, so
    # both DP halves are open chains with meaningful endpoints
    start = int(np.argmax(((points - points.mean(axis=0)) ** 2).sum(axis=1)))
    far = int(np.argmax(((points - points[start]) ** 2).sum(axis=1)))
    a, b = sorted((start, far))
    if a == b:
        b = (a + n // 2) % n
        a, b = sorted((a, b))
    chain1 = points[a : b + 1]
    chain2 = np.concatenate([points[b:], points[: a + 1]], axis=0)
    k1 = _douglas_peucker(chain1, tolerance) + a
    k2 = _douglas_peucker(chain2, tolerance)
    k2 = (k2 + b) % n
    knots = sorted(set(k1.tolist()) | set(k2.tolist()))
    return knots


def _fit_cubic(points):
    """LSQ cubic through points with fixed endpoints.

    Returns (C1, C2, max deviation at the chord parameters).
    """
    p0, p3 = points[0], points[-1]
    if len(points) == 2:
        c1 = p0 + (p3 - p0) / 3.0
        c2 = p0 + 2.0 * (p3 - p0) / 3.0
        return c1, c2, 0.0
    chords = np.hypot(*(np.diff(points, axis=0).T))
    t = np.concatenate([[0.0], np.cumsum(chords)])
    if t[-1] <= 0:
        return p0.copy(), p3.copy(), 0.0
    t /= t[-1]
    b0 = (1 - t) ** 3
    b1 = 3 * (1 - t) ** 2 * t
    b2 = 3 * (1 - t) * t**2
    b3 = t**3
    rhs = points - np.outer(b0, p0) - np.outer(b3, p3)
    design = np.column_stack([b1, b2])
    gram = design.T @ design
    if abs(np.linalg.det(gram)) < 1e-9:
        c1 = p0 + (p3 - p0) / 3.0
        c2 = p0 + 2.0 * (p3 - p0) / 3.0
    else:
        sol = np.linalg.solve(gram, design.T @ rhs)
        c1, c2 = sol[0], sol[1]
        span = np.linalg.norm(p3 - p0) + t[-1]
        limit = 3.0 * max(span, 1.0)
        if (
            np.linalg.norm(c1 - p0) > limit
            or np.linalg.norm(c2 - p3) > limit
        ):
            c1 = p0 + (p3 - p0) / 3.0
            c2 = p0 + 2.0 * (p3 - p0) / 3.0
    curve = (
        np.outer(b0, p0) + np.outer(b1, c1) + np.outer(b2, c2) + np.outer(b3, p3)
    )
    dev = np.hypot(*(curve - points).T)
    return c1, c2, float(dev.max())


def _fit_span(points, out):
    """Append (anchor, C1, C2) triplets covering ``points``, splitting
    until the fit tolerance holds."""
    c1, c2, dev = _fit_cubic(points)
    if dev <= FIT_TOLERANCE or len(points) <= 3:
        out.append((points[0], c1, c2))
        return
    residual = _curve_devs(points, c1, c2)
    split = int(np.argmax(residual[1:-1])) + 1
    _fit_span(points[: split + 1], out)
    _fit_span(points[split:], out)


def _curve_devs(points, c1, c2):
    p0, p3 = points[0], points[-1]
    chords = np.hypot(*(np.diff(points, axis=0).T))
    t = np.concatenate([[0.0], np.cumsum(chords)])
    t /= max(t[-1], 1e-12)
    curve = (
        np.outer((1 - t) ** 3, p0)
        + np.outer(3 * (1 - t) ** 2 * t, c1)
        + np.outer(3 * (1 - t) * t**2, c2)
        + np.outer(t**3, p3)
    )
    return np.hypot(*(curve - points).T)


def _path_from_contour(contour):
    knots = _closed_knots(contour, DP_TOLERANCE)
    if len(knots) < 2:
        knots = [0, len(contour) // 2]
    triplets = []
    for i, a in enumerate(knots):
        b = knots[(i + 1) % len(knots)]
        if b > a:
            span = contour[a : b + 1]
        else:
            span = np.concatenate([contour[a:], contour[: b + 1]], axis=0)
        if len(span) < 2:
            continue
        _fit_span(span, triplets)
    if len(triplets) < 2:
        return None
    return np.concatenate([np.stack(t) for t in triplets], axis=0)


def vectorize(bitmap):
    """Extract the closed-path control-point model of a digit bitmap."""
    img = np.asarray(bitmap, dtype=np.float64)
    if img.dtype == np.float64 and img.max() > 1.5:
        img = img / 255.0
    binary = img >= BINARIZE_LEVEL
    if not binary.any():
        raise EmptyBitmapError("bitmap has no foreground after binarization")
    padded = np.pad(binary.astype(np.float64), 1)
    contours = measure.find_contours(padded, 0.5)
    paths = []
    for contour in contours:
        # (row, col) -> (x, y), undo the pad offset; drop repeated endpoint
        pts = np.column_stack([contour[:, 1] - 1.0, contour[:, 0] - 1.0])
        if len(pts) > 1 and np.allclose(pts[0], pts[-1]):
            pts = pts[:-1]
        if len(pts) < MIN_CONTOUR_POINTS or _polygon_area(pts) < MIN_CONTOUR_AREA:
            continue
        path = _path_from_contour(pts)
        if path is not None:
            paths.append(path)
    if not paths:
        raise EmptyBitmapError("no traceable contour in bitmap")
    return DigitSemantic(tuple(paths))
