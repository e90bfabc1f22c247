"""Control-point representation of a digit: closed cubic Bezier paths.

Each closed path with n segments is stored as a flat (3n, 2) float array
ordered anchor, handle-out, handle-in per segment:

    [A0, C1_0, C2_0, A1, C1_1, C2_1, ...]

where segment i runs from anchor A_i over handles C1_i, C2_i to anchor
A_{(i+1) mod n}.  Every stored point, anchor or handle, is an eligible
mutation target.  Displacing an anchor carries its two adjacent handles
rigidly with it so the local shape survives the move; displacing a
handle moves only that handle.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

CANVAS = 28
MARGIN = 4.0  # coordinates may leave the canvas by this much


class ControlPointRef(NamedTuple):
    index: int
    xy: tuple


@dataclass(frozen=True)
class DigitSemantic:
    paths: tuple

    def __post_init__(self):
        for p in self.paths:
            if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] % 3 or p.shape[0] < 6:
                raise ValueError("each path must be (3n, 2) with n >= 2 segments")

    @property
    def control_points(self):
        """All points as one (N, 2) array, paths concatenated in order."""
        if not self.paths:
            return np.zeros((0, 2))
        return np.concatenate(self.paths, axis=0)

    @property
    def point_count(self):
        return sum(len(p) for p in self.paths)

    def is_empty(self):
        return not self.paths

    def locate(self, index):
        """Map a flat point index to (path number, index within path)."""
        if index < 0:
            raise IndexError(index)
        for pi, p in enumerate(self.paths):
            if index < len(p):
                return pi, index
            index -= len(p)
        raise IndexError("control point index out of range")

    def point(self, index):
        pi, local = self.locate(index)
        return self.paths[pi][local].copy()

    def ref(self, index):
        return ControlPointRef(index, tuple(self.point(index)))

    def is_anchor(self, index):
        _, local = self.locate(index)
        return local % 3 == 0

    def segments(self):
        """Yield (P0, C1, C2, P3) per cubic segment across all paths."""
        for p in self.paths:
            n = len(p) // 3
            for i in range(n):
                yield p[3 * i], p[3 * i + 1], p[3 * i + 2], p[(3 * i + 3) % len(p)]


def displace(sem, index, direction, extent):
    """Move one control point by extent * direction.

    Returns (new semantic, clamped flag).  Anchor moves drag the two
    neighboring handles along; handle moves are solitary.  Coordinates
    are clamped to the canvas margin and the clamp is reported, not
    raised.
    """
    if extent < 0:
        raise ValueError("extent must be >= 0")
    direction = np.asarray(direction, dtype=np.float64)
    delta = extent * direction
    pi, local = sem.locate(index)
    path = sem.paths[pi].copy()
    n = len(path)
    if local % 3 == 0:
        moved = [local, (local - 1) % n, local + 1]
    else:
        moved = [local]
    clamped = False
    for m in moved:
        target = path[m] + delta
        limited = np.clip(target, -MARGIN, CANVAS + MARGIN)
        if not np.array_equal(target, limited):
            clamped = True
        path[m] = limited
    paths = tuple(path if i == pi else sem.paths[i] for i in range(len(sem.paths)))
    return DigitSemantic(paths), clamped


def to_svg(sem, scale=1.0):
    """Render the paths as a minimal SVG document (debugging aid)."""
    size = CANVAS * scale
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">'
    ]
    for p in sem.paths:
        n = len(p) // 3
        d = [f"M {p[0][0]:.3f} {p[0][1]:.3f}"]
        for i in range(n):
            c1, c2 = p[3 * i + 1], p[3 * i + 2]
            a = p[(3 * i + 3) % len(p)]
            d.append(
                f"C {c1[0]:.3f} {c1[1]:.3f} {c2[0]:.3f} {c2[1]:.3f} {a[0]:.3f} {a[1]:.3f}"
            )
        d.append("Z")
        parts.append(f'<path d="{" ".join(d)}" fill="white" fill-rule="evenodd"/>')
    parts.append("</svg>")
    return "\n".join(parts)
