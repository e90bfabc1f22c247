"""Weight strategies vs brute-force oracles."""

import numpy as np
import pytest

from semfuzz.focus import (
    ClusterAssignment,
    WeightVector,
    attractor,
    cluster_partition,
    cluster_weights,
    cluster_weights_raw,
    sample_concept,
    window_weights,
    window_weights_raw,
)
from semfuzz.xai import Heatmap, normalize


def _random_instance(rng, size=None, n_points=None):
    h_side = size or int(rng.integers(8, 29))
    w_side = size or int(rng.integers(8, 29))
    raw = rng.random((h_side, w_side))
    raw[raw < 0.4] = 0.0  # some cold area
    hm = Heatmap(raw.astype(np.float32), raw_mean=float(raw.mean()))
    n = n_points or int(rng.integers(1, 14))
    pts = np.column_stack(
        [rng.uniform(-2, w_side + 1, n), rng.uniform(-2, h_side + 1, n)]
    )
    return hm, pts


def oracle_window(hm, pts, d):
    """Direct summation over the clipped square window."""
    height, width = hm.values.shape
    out = np.zeros(len(pts))
    for k, (x, y) in enumerate(pts):
        cx = int(np.floor(x + 0.5))
        cy = int(np.floor(y + 0.5))
        acc, cnt = 0.0, 0
        for yy in range(cy - d, cy + d + 1):
            for xx in range(cx - d, cx + d + 1):
                if 0 <= yy < height and 0 <= xx < width:
                    acc += float(hm.values[yy, xx])
                    cnt += 1
        out[k] = acc / cnt if cnt else 0.0
    return out


def oracle_partition(hm, pts):
    """Exhaustive nearest-point assignment with low-index tie-break."""
    labels = np.full(hm.values.shape, -1, dtype=np.int64)
    height, width = hm.values.shape
    for yy in range(height):
        for xx in range(width):
            if hm.values[yy, xx] <= 0:
                continue
            best, best_d = -1, np.inf
            for k, (px, py) in enumerate(pts):
                d = (xx - px) ** 2 + (yy - py) ** 2
                if d < best_d:
                    best, best_d = k, d
            labels[yy, xx] = best
    return labels


def oracle_cluster_weights(labels, hm, pts):
    out = np.zeros(len(pts))
    height, width = hm.values.shape
    for yy in range(height):
        for xx in range(width):
            k = labels[yy, xx]
            if k < 0:
                continue
            d = max(1.0, float(np.hypot(xx - pts[k][0], yy - pts[k][1])))
            out[k] += float(hm.values[yy, xx]) / d
    return out


def oracle_attractor(labels, hm, k):
    num = np.zeros(2)
    den = 0.0
    height, width = hm.values.shape
    for yy in range(height):
        for xx in range(width):
            if labels[yy, xx] == k:
                v = float(hm.values[yy, xx])
                num += v * np.array([xx, yy])
                den += v
    return None if den == 0 else num / den


class TestWindowWeights:
    def test_constant_heatmap_uniform(self):
        hm = Heatmap(np.full((10, 10), 0.5, dtype=np.float32), raw_mean=0.5)
        pts = np.array([[2.0, 2.0], [5.0, 5.0], [8.0, 8.0]])
        w = window_weights(hm, pts, 1)
        assert np.allclose(w.weights, 1 / 3)

    def test_single_hot_center(self):
        values = np.zeros((9, 9), dtype=np.float32)
        values[4, 4] = 0.9
        hm = Heatmap(values, raw_mean=float(values.mean()))
        raw = window_weights_raw(hm, np.array([[4.0, 4.0]]), 1)
        assert raw[0] == pytest.approx(0.1, abs=1e-7)  # 0.9 over 9 cells

    def test_border_clipping(self):
        values = np.full((6, 6), 0.8, dtype=np.float32)
        hm = Heatmap(values, raw_mean=0.8)
        raw = window_weights_raw(hm, np.array([[0.0, 0.0]]), 1)
        assert raw[0] == pytest.approx(0.8)  # 2x2 in-bounds mean

    def test_matches_oracle(self):
        rng = np.random.default_rng(31)
        for _ in range(60):
            hm, pts = _random_instance(rng)
            d = int(rng.integers(0, 4))
            got = window_weights_raw(hm, pts, d)
            want = oracle_window(hm, pts, d)
            assert np.abs(got - want).max() <= 1e-9

    def test_cold_map_uniform_fallback(self):
        hm = Heatmap(np.zeros((8, 8), dtype=np.float32), raw_mean=0.0)
        w = window_weights(hm, np.array([[1.0, 1.0], [5.0, 5.0]]), 1)
        assert w.degenerate
        assert np.allclose(w.weights, 0.5)


class TestClusterPartition:
    def test_single_point_takes_all(self):
        rng = np.random.default_rng(0)
        hm, _ = _random_instance(rng, size=12)
        assign = cluster_partition(hm, np.array([[6.0, 6.0]]))
        hot = hm.values > 0
        assert np.array_equal(assign.labels >= 0, hot)
        assert set(np.unique(assign.labels[hot])) == {0}

    def test_nearest_point_wins(self):
        values = np.zeros((4, 12), dtype=np.float32)
        values[0, 2] = 1.0
        hm = Heatmap(values, raw_mean=float(values.mean()))
        assign = cluster_partition(hm, np.array([[0.0, 0.0], [10.0, 0.0]]))
        assert assign.labels[0, 2] == 0

    def test_matches_oracle(self):
        rng = np.random.default_rng(77)
        for _ in range(25):
            hm, pts = _random_instance(rng, size=28)
            got = cluster_partition(hm, pts).labels
            want = oracle_partition(hm, pts)
            assert np.array_equal(got, want)

    def test_cold_map_degenerate(self):
        hm = Heatmap(np.zeros((5, 5), dtype=np.float32), raw_mean=0.0)
        assign = cluster_partition(hm, np.array([[2.0, 2.0]]))
        assert assign.degenerate
        assert np.all(assign.labels == -1)


class TestClusterWeights:
    def test_pixel_on_point_clamped_divisor(self):
        values = np.zeros((7, 7), dtype=np.float32)
        values[3, 3] = 0.75
        hm = Heatmap(values, raw_mean=float(values.mean()))
        assign = cluster_partition(hm, np.array([[3.0, 3.0]]))
        raw = cluster_weights_raw(assign, hm)
        assert raw[0] == pytest.approx(0.75, abs=1e-12)

    def test_distance_two_contributes_half(self):
        values = np.zeros((7, 7), dtype=np.float32)
        values[3, 5] = 1.0
        hm = Heatmap(values, raw_mean=float(values.mean()))
        assign = cluster_partition(hm, np.array([[3.0, 3.0]]))
        raw = cluster_weights_raw(assign, hm)
        assert raw[0] == pytest.approx(0.5, abs=1e-12)

    def test_matches_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            hm, pts = _random_instance(rng)
            assign = cluster_partition(hm, pts)
            got = cluster_weights_raw(assign, hm)
            want = oracle_cluster_weights(assign.labels, hm, pts)
            assert np.abs(got - want).max() <= 1e-9

    def test_empty_cluster_zero_weight(self):
        values = np.zeros((6, 6), dtype=np.float32)
        values[0, 0] = 1.0
        hm = Heatmap(values, raw_mean=float(values.mean()))
        pts = np.array([[0.0, 0.0], [5.0, 5.0]])
        raw = cluster_weights_raw(cluster_partition(hm, pts), hm)
        assert raw[1] == 0.0


class TestAttractor:
    def test_midpoint_of_equal_pixels(self):
        values = np.zeros((5, 5), dtype=np.float32)
        values[0, 0] = 0.6
        values[0, 2] = 0.6
        hm = Heatmap(values, raw_mean=float(values.mean()))
        assign = cluster_partition(hm, np.array([[1.0, 0.0]]))
        c = attractor(assign, hm, 0)
        assert np.allclose(c, [1.0, 0.0])

    def test_single_pixel(self):
        values = np.zeros((5, 5), dtype=np.float32)
        values[4, 2] = 0.3
        hm = Heatmap(values, raw_mean=float(values.mean()))
        assign = cluster_partition(hm, np.array([[2.0, 4.0]]))
        assert np.allclose(attractor(assign, hm, 0), [2.0, 4.0])

    def test_matches_oracle_and_stays_in_bbox(self):
        rng = np.random.default_rng(13)
        for _ in range(40):
            hm, pts = _random_instance(rng)
            assign = cluster_partition(hm, pts)
            for k in range(len(pts)):
                got = attractor(assign, hm, k)
                want = oracle_attractor(assign.labels, hm, k)
                if want is None:
                    assert got is None
                    continue
                assert np.abs(got - want).max() <= 1e-9
                pix, _, _ = assign.pixels(k)
                assert pix[:, 0].min() - 1e-9 <= got[0] <= pix[:, 0].max() + 1e-9
                assert pix[:, 1].min() - 1e-9 <= got[1] <= pix[:, 1].max() + 1e-9

    def test_empty_cluster_none(self):
        hm = Heatmap(np.zeros((4, 4), dtype=np.float32), raw_mean=0.0)
        assign = cluster_partition(hm, np.array([[1.0, 1.0]]))
        assert attractor(assign, hm, 0) is None


class TestScaleInvariance:
    def test_argmax_stable_under_raw_scaling(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            raw = rng.random((14, 14))
            raw[raw < 0.5] = 0
            pts = np.column_stack([rng.uniform(0, 14, 6), rng.uniform(0, 14, 6)])
            for c in (0.037, 1.0, 215.0):
                hm = normalize(raw * c)
                w1 = window_weights(hm, pts, 1)
                w2 = cluster_weights(cluster_partition(hm, pts), hm)
                if c == 0.037:
                    ref1, ref2 = w1.weights.argmax(), w2.weights.argmax()
                else:
                    assert w1.weights.argmax() == ref1
                    assert w2.weights.argmax() == ref2


class TestSampleConcept:
    def test_deterministic_weight_one(self):
        w = WeightVector(np.array([1.0, 0.0, 0.0]))
        rng = np.random.default_rng(0)
        assert all(sample_concept(w, rng) == 0 for _ in range(100))

    def test_even_split_frequencies(self):
        w = WeightVector(np.array([0.5, 0.5]))
        rng = np.random.default_rng(123)
        draws = np.array([sample_concept(w, rng) for _ in range(10000)])
        frac = (draws == 0).mean()
        assert 0.47 <= frac <= 0.53

    def test_seeded_sequence_reproducible(self):
        w = WeightVector(np.array([0.2, 0.3, 0.5]))
        a = [sample_concept(w, np.random.default_rng(9)) for _ in range(1)]
        seq1 = [sample_concept(w, rng) for rng in [np.random.default_rng(9)] for _ in range(5)]
        rng1 = np.random.default_rng(9)
        rng2 = np.random.default_rng(9)
        assert [sample_concept(w, rng1) for _ in range(20)] == [
            sample_concept(w, rng2) for _ in range(20)
        ]


class TestWeightVector:
    def test_validation(self):
        with pytest.raises(ValueError):
            WeightVector(np.array([0.5, 0.6]))
        with pytest.raises(ValueError):
            WeightVector(np.array([-0.1, 1.1]))
        with pytest.raises(ValueError):
            WeightVector(np.array([]))
