"""Campaign driver: screen seeds, then mutate-and-test each until failure
or budget exhaustion.

Seed screening plays the role of the pre-mutation test: a seed the
system already fails on is discarded.  From there, iteration i tests
the input after i mutations; a failing input moves its seed into the
failure set and the seed stops.  The loop always mutates the current
(already mutated) input, re-deriving the semantic representation from
the bitmap each round, so the control-point count may drift.

Per-seed rng streams are spawned from (campaign seed, seed id), which
makes results identical whether seeds run sequentially or in a process
pool.  result.csv holds only deterministic columns; wall-clock numbers
go to timings.csv so a re-run from the same manifest reproduces
result.csv byte for byte.
"""

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .digits.rasterize import rasterize
from .digits.vectorize import EmptyBitmapError, vectorize
from .mutate import MutationPolicy, mutate_digit
from .xai import XaiConfig, explain, heatmap_stats, save_pgm, threshold

ACTIVE = "active"
FAILED = "failed"
EXHAUSTED = "exhausted"
DISCARDED = "discarded"
ERRORED = "errored"


@dataclass
class Seed:
    id: int
    bitmap: np.ndarray = None   # digit case
    label: int = None
    road: object = None         # road case
    status: str = ACTIVE


@dataclass
class CampaignConfig:
    case: str = "digit"                 # "digit" | "road"
    xai: XaiConfig = field(default_factory=XaiConfig)
    policy: MutationPolicy = field(default_factory=MutationPolicy)
    budget: int = 200
    rng_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.case not in ("digit", "road"):
            raise ValueError(f"unknown case {self.case!r}")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")

    @property
    def guided(self):
        return self.policy.selection != "uniform"


@dataclass
class IterationRecord:
    iteration: int
    failure: bool
    predicted: object
    confidence: float
    mutation: object = None
    xai_ms: float = 0.0
    total_ms: float = 0.0
    hm_mean: float = 0.0
    hm_entropy: float = 0.0
    extra: dict = field(default_factory=dict)


@dataclass
class SeedResult:
    seed_id: int
    status: str
    failure_iteration: int = None
    records: list = field(default_factory=list)
    failing_input: object = None


@dataclass
class CampaignResult:
    case: str
    config: dict
    seed_results: list = field(default_factory=list)
    discarded_ids: list = field(default_factory=list)

    @property
    def failures(self):
        return [r for r in self.seed_results if r.status == FAILED]

    @property
    def n_seeds(self):
        return len(self.seed_results)

    def failure_iterations(self, censor_at=None):
        """Per-seed failure iteration; non-failing seeds are censored at
        budget + 1 (or ``censor_at``)."""
        budget = int(self.config["budget"])
        censor = censor_at if censor_at is not None else budget + 1
        out = []
        for r in self.seed_results:
            out.append(r.failure_iteration if r.status == FAILED else censor)
        return out


def seed_stream(campaign_seed, seed_id):
    """Independent, reproducible rng for one seed of one campaign."""
    return np.random.default_rng(np.random.SeedSequence([campaign_seed, seed_id]))


def failure_criterion(case, output, truth):
    """digit: argmax disagrees with the label (ties take the lowest
    class index); road: the trace left the drivable corridor."""
    if case == "digit":
        return int(np.argmax(output)) != int(truth)
    return bool(output.oob)


def screen_seeds(seeds, system, case="digit"):
    """Split seeds into (active, discarded) by testing the originals."""
    active, discarded = [], []
    for seed in seeds:
        if case == "digit":
            out = system.forward(seed.bitmap[None])
            bad = failure_criterion("digit", out, seed.label)
        else:
            trace = system.drive(seed.road)
            bad = failure_criterion("road", trace, seed.road)
        if bad:
            seed.status = DISCARDED
            discarded.append(seed)
        else:
            active.append(seed)
    return active, discarded


def select_digit_seeds(images, labels, n, rng):
    """Sample ``n`` seeds from a labeled pool, classes round-robin."""
    by_class = {c: np.flatnonzero(labels == c) for c in range(10)}
    for c, idx in by_class.items():
        by_class[c] = rng.permutation(idx)
    seeds = []
    cursor = {c: 0 for c in range(10)}
    c = 0
    while len(seeds) < n:
        idx = by_class[c % 10]
        if cursor[c % 10] < len(idx):
            i = idx[cursor[c % 10]]
            cursor[c % 10] += 1
            img = images[i].astype(np.float32)
            if img.max() > 1.5:
                img = img / 255.0
            seeds.append(Seed(id=len(seeds), bitmap=img, label=int(labels[i])))
        c += 1
        if c > 20 * n:
            raise ValueError("seed pool exhausted before reaching n")
    return seeds


def _fuzz_digit_seed(seed, net, cfg):
    rng = seed_stream(cfg.rng_seed, seed.id)
    result = SeedResult(seed_id=seed.id, status=ACTIVE)
    t = seed.bitmap
    for it in range(1, cfg.budget + 1):
        t_start = time.perf_counter()
        try:
            sem = vectorize(t)
        except EmptyBitmapError:
            result.status = ERRORED
            break
        xai_ms = hm_mean = hm_entropy = 0.0
        h = None
        if cfg.guided:
            x0 = time.perf_counter()
            h = explain(net, t[None], cfg.xai, rng=rng, target=seed.label)
            hm_mean, hm_entropy = heatmap_stats(h)
            h = threshold(h, cfg.xai.epsilon)
            xai_ms = (time.perf_counter() - x0) * 1000.0
        mutated, record = mutate_digit(sem, h, cfg.policy, rng)
        t = rasterize(mutated)
        out = net.forward(t[None])
        predicted = int(np.argmax(out))
        confidence = float(out[predicted])
        failed = failure_criterion("digit", out, seed.label)
        total_ms = (time.perf_counter() - t_start) * 1000.0
        result.records.append(
            IterationRecord(
                iteration=it,
                failure=failed,
                predicted=predicted,
                confidence=confidence,
                mutation=record,
                xai_ms=xai_ms,
                total_ms=total_ms,
                hm_mean=hm_mean,
                hm_entropy=hm_entropy,
            )
        )
        if failed:
            result.status = FAILED
            result.failure_iteration = it
            result.failing_input = t
            break
    else:
        result.status = EXHAUSTED
    return result


def _digit_worker(args):
    seed, net, cfg = args
    return _fuzz_digit_seed(seed, net, cfg)


def run_digit_campaign(seeds, net, cfg):
    """Run the mutate-and-test loop over screened digit seeds."""
    snapshot = config_snapshot(cfg)
    result = CampaignResult(case="digit", config=snapshot)
    if cfg.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            outs = list(pool.map(_digit_worker, ((s, net, cfg) for s in seeds), chunksize=4))
    else:
        outs = [_fuzz_digit_seed(s, net, cfg) for s in seeds]
    result.seed_results = sorted(outs, key=lambda r: r.seed_id)
    return result


def config_snapshot(cfg):
    return {
        "case": cfg.case,
        "budget": str(cfg.budget),
        "rng_seed": str(cfg.rng_seed),
        "jobs": str(cfg.jobs),
        "selection": cfg.policy.selection,
        "direction": cfg.policy.direction,
        "extent_max": repr(cfg.policy.extent_max),
        "window_half_width": str(cfg.policy.window_half_width),
        "xai_method": cfg.xai.method,
        "n_samples": str(cfg.xai.n_samples),
        "sigma": repr(cfg.xai.sigma),
        "ig_steps": str(cfg.xai.ig_steps),
        "epsilon": repr(cfg.xai.epsilon),
    }


# -- persistence ---------------------------------------------------------

DIGIT_COLUMNS = [
    "seed_id", "iteration", "failure", "predicted", "confidence",
    "mut_index", "dir_x", "dir_y", "extent", "direction_mode",
    "weights_degenerate", "clamped", "hm_mean", "hm_entropy",
]

ROAD_COLUMNS = [
    "seed_id", "iteration", "failure", "steps", "max_cte",
    "mut_index", "lateral", "extent", "direction_mode",
    "weights_degenerate", "dqd_max_cte", "dqd_steering", "dqd_flagged",
]

TIMING_COLUMNS = ["seed_id", "iteration", "xai_ms", "total_ms"]


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format(v, ".10g")
    return str(v)


def _digit_row(seed_id, rec):
    m = rec.mutation
    return [
        seed_id, rec.iteration, rec.failure, rec.predicted, rec.confidence,
        m.index, m.direction[0], m.direction[1], m.extent, m.direction_mode,
        m.weights_degenerate, m.clamped, rec.hm_mean, rec.hm_entropy,
    ]


def _road_row(seed_id, rec):
    m = rec.mutation
    e = rec.extra
    return [
        seed_id, rec.iteration, rec.failure, e.get("steps", 0), e.get("max_cte", 0.0),
        m["index"], m["lateral"], m["extent"], m["direction_mode"],
        m["weights_degenerate"], e.get("dqd_max_cte", 0.0), e.get("dqd_steering", 0.0),
        e.get("dqd_flagged", False),
    ]


def write_campaign(result, out_dir, save_failures=True):
    """Emit result.csv, timings.csv, config and failure dumps."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    columns = DIGIT_COLUMNS if result.case == "digit" else ROAD_COLUMNS
    make_row = _digit_row if result.case == "digit" else _road_row

    with open(out / "result.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for sr in result.seed_results:
            for rec in sr.records:
                w.writerow([_fmt(v) for v in make_row(sr.seed_id, rec)])

    with open(out / "timings.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(TIMING_COLUMNS)
        for sr in result.seed_results:
            for rec in sr.records:
                w.writerow(
                    [_fmt(v) for v in (sr.seed_id, rec.iteration, rec.xai_ms, rec.total_ms)]
                )

    with open(out / "config", "w") as f:
        for k, v in result.config.items():
            f.write(f"{k}={v}\n")

    with open(out / "seeds.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["seed_id", "status", "failure_iteration"])
        for sr in result.seed_results:
            w.writerow(
                [sr.seed_id, sr.status, "" if sr.failure_iteration is None else sr.failure_iteration]
            )

    if save_failures:
        fail_dir = out / "failures"
        fail_dir.mkdir(exist_ok=True)
        for sr in result.seed_results:
            if sr.status != FAILED or sr.failing_input is None:
                continue
            if result.case == "digit":
                save_pgm(fail_dir / f"seed_{sr.seed_id:05d}_iter_{sr.failure_iteration}.pgm",
                         sr.failing_input)
            else:
                sr.failing_input.save(
                    fail_dir / f"seed_{sr.seed_id:05d}_iter_{sr.failure_iteration}.road"
                )
