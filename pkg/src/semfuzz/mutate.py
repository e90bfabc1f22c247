"""One guided or random mutation of a digit's control points.

Selection uses window weights, cluster weights, or a uniform draw (the
unguided baseline).  Direction is either the unit vector toward the
selected cluster's attention attractor, or a uniformly random angle
(also what the baseline uses).  Extent is drawn uniformly from
[0, extent_max].  Random draws happen in a fixed order (concept,
direction, extent) so a seeded rng replays a campaign exactly.
"""

from dataclasses import dataclass, field

import numpy as np

from . import focus
from .digits.semantic import displace

SELECTIONS = ("window", "cluster", "uniform")
DIRECTIONS = ("attractor", "random")
DIGIT_EXTENT_MAX = 1.2
ATTRACTOR_EPS = 1e-6


class PolicyError(ValueError):
    """Illegal selection/direction combination."""


@dataclass(frozen=True)
class MutationPolicy:
    selection: str = "cluster"
    direction: str = "attractor"
    extent_max: float = DIGIT_EXTENT_MAX
    window_half_width: int = focus.DEFAULT_WINDOW_HALF_WIDTH

    def __post_init__(self):
        if self.selection not in SELECTIONS:
            raise PolicyError(f"unknown selection {self.selection!r}")
        if self.direction not in DIRECTIONS:
            raise PolicyError(f"unknown direction {self.direction!r}")
        if self.direction == "attractor" and self.selection != "cluster":
            raise PolicyError("attractor direction requires cluster selection")
        if self.extent_max < 0:
            raise PolicyError("extent_max must be >= 0")


def baseline_policy():
    """Uniform concept choice plus random direction: the unguided operator."""
    return MutationPolicy(selection="uniform", direction="random")


@dataclass
class MutationRecord:
    index: int
    direction: tuple
    extent: float
    direction_mode: str          # "attractor" or "random"
    attractor: tuple = None      # set when an attractor directed the move
    weights_degenerate: bool = False
    clamped: bool = False
    extra: dict = field(default_factory=dict)


def _random_direction(rng):
    angle = rng.uniform(0.0, 2.0 * np.pi)
    return np.array([np.cos(angle), np.sin(angle)])


def mutate_digit(sem, h, policy, rng):
    """Displace exactly one control point of ``sem``; returns the new
    semantic model and a record of what moved where.

    ``h`` must be the thresholded heatmap of the bitmap ``sem`` was
    derived from (ignored by the uniform baseline selection).
    """
    points = sem.control_points
    if len(points) == 0:
        raise ValueError("cannot mutate an empty semantic model")

    assign = None
    if policy.selection == "uniform":
        n = len(points)
        weights = focus.WeightVector(np.full(n, 1.0 / n))
    elif policy.selection == "window":
        weights = focus.window_weights(h, points, policy.window_half_width)
    else:
        assign = focus.cluster_partition(h, points)
        weights = focus.cluster_weights(assign, h)

    index = focus.sample_concept(weights, rng)

    mode = policy.direction
    target = None
    if mode == "attractor":
        target = None if assign.degenerate else focus.attractor(assign, h, index)
        if target is not None:
            offset = target - points[index]
            dist = float(np.hypot(*offset))
            if dist < ATTRACTOR_EPS:
                target = None
        if target is None:
            mode = "random"  # no usable attractor; fall back
        else:
            direction = offset / dist
    if mode == "random":
        direction = _random_direction(rng)

    extent = float(rng.uniform(0.0, policy.extent_max))
    mutated, clamped = displace(sem, index, direction, extent)
    record = MutationRecord(
        index=index,
        direction=(float(direction[0]), float(direction[1])),
        extent=extent,
        direction_mode=mode,
        attractor=None if target is None else (float(target[0]), float(target[1])),
        weights_degenerate=weights.degenerate,
        clamped=clamped,
    )
    return mutated, record
