"""Semantic digit model: vectorize / rasterize / displace."""

import numpy as np
import pytest

from semfuzz.digits import (
    DigitSemantic,
    EmptyBitmapError,
    build_corpus,
    displace,
    iou,
    rasterize,
    to_svg,
    vectorize,
)


@pytest.fixture(scope="module")
def digit_bitmaps():
    imgs, _ = build_corpus(100, np.random.default_rng(202))
    return imgs.astype(np.float32) / 255.0


def _square_blob():
    bm = np.zeros((28, 28), dtype=np.float32)
    bm[8:20, 7:21] = 1.0
    return bm


class TestVectorize:
    def test_square_blob(self):
        sem = vectorize(_square_blob())
        assert len(sem.paths) == 1
        assert sem.point_count >= 4
        assert iou(_square_blob(), rasterize(sem)) >= 0.9

    def test_deterministic(self, digit_bitmaps):
        a = vectorize(digit_bitmaps[0])
        b = vectorize(digit_bitmaps[0])
        assert len(a.paths) == len(b.paths)
        for p, q in zip(a.paths, b.paths):
            assert np.array_equal(p, q)

    def test_round_trip_iou_over_corpus(self, digit_bitmaps):
        scores = [iou(bm, rasterize(vectorize(bm))) for bm in digit_bitmaps]
        assert float(np.mean(scores)) >= 0.9

    def test_empty_bitmap_rejected(self):
        with pytest.raises(EmptyBitmapError):
            vectorize(np.zeros((28, 28), dtype=np.float32))

    def test_paths_are_closed_triplets(self, digit_bitmaps):
        sem = vectorize(digit_bitmaps[1])
        for p in sem.paths:
            assert len(p) % 3 == 0 and len(p) >= 6


class TestRasterize:
    def test_empty_semantic_blank(self):
        blank = rasterize(DigitSemantic(()))
        assert blank.shape == (28, 28)
        assert np.all(blank == 0)

    def test_values_in_unit_range(self, digit_bitmaps):
        out = rasterize(vectorize(digit_bitmaps[2]))
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_translation_moves_centroid(self, digit_bitmaps):
        sem = vectorize(digit_bitmaps[3])
        shifted = DigitSemantic(tuple(p + np.array([1.0, 0.0]) for p in sem.paths))
        a = rasterize(sem)
        b = rasterize(shifted)

        def centroid_x(img):
            total = img.sum()
            return float((img * np.arange(28)[None, :]).sum() / total)

        assert centroid_x(b) - centroid_x(a) == pytest.approx(1.0, abs=0.2)


class TestDisplace:
    def test_extent_zero_identity(self, digit_bitmaps):
        sem = vectorize(digit_bitmaps[4])
        moved, clamped = displace(sem, 0, np.array([1.0, 0.0]), 0.0)
        assert not clamped
        assert np.array_equal(moved.control_points, sem.control_points)
        assert moved.point_count == sem.point_count

    def test_displace_then_inverse(self, digit_bitmaps):
        sem = vectorize(digit_bitmaps[5])
        d = np.array([0.6, -0.8])
        fwd, _ = displace(sem, 2, d, 0.9)
        back, _ = displace(fwd, 2, -d, 0.9)
        assert np.abs(back.control_points - sem.control_points).max() <= 1e-6

    def test_exact_offset(self):
        sem = vectorize(_square_blob())
        idx = 1  # a handle: moves alone
        before = sem.point(idx)
        moved, _ = displace(sem, idx, np.array([1.0, 0.0]), 1.2)
        after = moved.point(idx)
        assert after[0] - before[0] == pytest.approx(1.2, abs=1e-9)
        assert after[1] == before[1]

    def test_anchor_carries_handles(self):
        sem = vectorize(_square_blob())
        anchors = [i for i in range(sem.point_count) if sem.is_anchor(i)]
        idx = anchors[1]
        moved, _ = displace(sem, idx, np.array([0.0, 1.0]), 1.0)
        diff = np.abs(moved.control_points - sem.control_points).sum(axis=1)
        changed = set(np.flatnonzero(diff > 0).tolist())
        pi, local = sem.locate(idx)
        base = sum(len(p) for p in sem.paths[:pi])
        n = len(sem.paths[pi])
        expected = {base + local, base + (local - 1) % n, base + local + 1}
        assert changed == expected

    def test_handle_moves_alone(self):
        sem = vectorize(_square_blob())
        handles = [i for i in range(sem.point_count) if not sem.is_anchor(i)]
        idx = handles[0]
        moved, _ = displace(sem, idx, np.array([1.0, 0.0]), 0.5)
        diff = np.abs(moved.control_points - sem.control_points).sum(axis=1)
        assert set(np.flatnonzero(diff > 0).tolist()) == {idx}

    def test_clamped_at_margin(self):
        sem = vectorize(_square_blob())
        moved, clamped = displace(sem, 0, np.array([1.0, 0.0]), 500.0)
        assert clamped
        assert moved.control_points.max() <= 32.0

    def test_negative_extent_rejected(self):
        sem = vectorize(_square_blob())
        with pytest.raises(ValueError):
            displace(sem, 0, np.array([1.0, 0.0]), -1.0)


class TestSvg:
    def test_export_mentions_paths(self, digit_bitmaps):
        sem = vectorize(digit_bitmaps[6])
        doc = to_svg(sem)
        assert doc.startswith("<svg")
        assert doc.count("<path") == len(sem.paths)
        assert "C " in doc
