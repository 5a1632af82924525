import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import bfs_components, soft_cldice_reference, two_pass_stats
from vesseltopo.exceptions import DomainError, EmptyInputError, ShapeError
from vesseltopo.metrics import (
    MetricReport,
    aggregate,
    betti0_normalized,
    cldice,
    dice,
    iou,
    mse,
    relative_improvement,
    soft_cldice_loss,
    soft_skeleton,
)

pairs = st.tuples(st.integers(1, 30), st.integers(1, 30)).flatmap(
    lambda hw: st.tuples(arrays(np.bool_, hw), arrays(np.bool_, hw))
)


def _counts_pair():
    # |X| = 3, |Y| = 5, |X & Y| = 2
    x = np.zeros((4, 4), bool)
    y = np.zeros((4, 4), bool)
    x[0, :3] = True
    y[0, 1:4] = True
    y[1, :2] = True
    return x, y


def line_and_branch():
    """10-px line, and the same line with a 5-px branch hanging off it."""
    pred = np.zeros((16, 16), bool)
    pred[8, 3:13] = True
    gt = pred.copy()
    gt[9:14, 7] = True
    return pred, gt


# Both masks are already 1 px wide, so each is its own Zhang-Suen skeleton:
# Tprec = 10/10, Tsens = 10/15, clDice = 2 * (2/3) / (5/3) = 0.8.
LINE_BRANCH_CLDICE = 0.8

# soft_cldice_reference(SOFT_PRED, SOFT_GT, 10) from tests/oracles.py
SOFT_PAIR_LOSS = 0.19238095753839413


def soft_pair():
    pred = np.zeros((16, 16))
    gt = np.zeros((16, 16))
    pred[3:6, 2:14] = 1.0
    pred[6:13, 7:9] = 0.8
    pred[10, 10] = 0.5
    gt[3:6, 2:14] = 1.0
    gt[6:14, 7:9] = 1.0
    gt[12:14, 9:13] = 0.6
    return pred, gt


class TestOverlap:
    def test_identical(self, rng):
        m = rng.random((10, 10)) < 0.5
        assert dice(m, m) == 1.0 and iou(m, m) == 1.0

    def test_counts(self):
        x, y = _counts_pair()
        assert dice(x, y) == 0.5
        assert iou(x, y) == pytest.approx(1 / 3, abs=1e-15)

    def test_disjoint(self):
        x = np.zeros((3, 3), bool)
        y = np.zeros((3, 3), bool)
        x[0, 0] = y[2, 2] = True
        assert dice(x, y) == 0.0 and iou(x, y) == 0.0

    def test_both_empty(self):
        z = np.zeros((3, 3), bool)
        assert dice(z, z) == 1.0 and iou(z, z) == 1.0

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            dice(np.zeros((3, 3)), np.zeros((3, 4)))
        with pytest.raises(ShapeError):
            cldice(np.zeros((3, 3)), np.zeros((4, 3)))

    def test_identity_on_random_pairs(self, rng):
        for _ in range(1000):
            x = rng.random((12, 9)) < 0.5
            y = rng.random((12, 9)) < 0.5
            j = iou(x, y)
            assert abs(dice(x, y) - 2 * j / (1 + j)) <= 1e-12

    @settings(max_examples=80, deadline=None)
    @given(pairs)
    def test_symmetry_and_range(self, xy):
        x, y = xy
        assert dice(x, y) == dice(y, x)
        assert iou(x, y) == iou(y, x)
        assert 0.0 <= iou(x, y) <= dice(x, y) <= 1.0


class TestClDice:
    def test_self(self, rng):
        m = rng.random((20, 20)) < 0.5
        assert cldice(m, m) == 1.0

    def test_line_and_branch(self):
        pred, gt = line_and_branch()
        assert cldice(pred, gt) == pytest.approx(LINE_BRANCH_CLDICE, abs=1e-15)

    def test_one_empty(self):
        _, gt = line_and_branch()
        assert cldice(np.zeros_like(gt), gt) == 0.0
        assert cldice(gt, np.zeros_like(gt)) == 0.0

    def test_both_empty(self):
        z = np.zeros((4, 4), bool)
        assert cldice(z, z) == 1.0

    def test_disjoint_skeletons(self):
        a = np.zeros((8, 8), bool)
        b = np.zeros((8, 8), bool)
        a[1, 1:6] = True
        b[6, 1:6] = True
        assert cldice(a, b) == 0.0


class TestBetti:
    def test_self(self, rng):
        m = rng.random((70, 90)) < 0.4
        assert betti0_normalized(m, m) == 0.0

    def test_single_patch(self):
        pred = np.zeros((64, 64), bool)
        gt = np.zeros((64, 64), bool)
        pred[10, 5:20] = True
        for y in (10, 30, 50):
            gt[y, 5:20] = True
        assert betti0_normalized(pred, gt) == 2.0

    def test_two_patches(self):
        pred = np.zeros((64, 128), bool)
        gt = np.zeros((64, 128), bool)
        gt[10, 5:20] = gt[40, 5:20] = True
        pred[10, 5:20] = True
        gt[20, 70:90] = pred[20, 70:90] = True
        assert betti0_normalized(pred, gt) == 0.5

    def test_whole_image_patch(self, rng):
        pred = rng.random((50, 40)) < 0.4
        gt = rng.random((50, 40)) < 0.4
        expected = abs(bfs_components(pred, 8)[1] - bfs_components(gt, 8)[1])
        assert betti0_normalized(pred, gt, patch_size=100) == expected

    def test_connectivity_option(self):
        pred = np.eye(4, dtype=bool)
        gt = np.zeros((4, 4), bool)
        gt[0, 0] = True
        assert betti0_normalized(pred, gt, connectivity=8) == 0.0
        assert betti0_normalized(pred, gt, connectivity=4) == 3.0

    @settings(max_examples=50, deadline=None)
    @given(pairs, st.integers(1, 16))
    def test_nonnegative(self, xy, p):
        x, y = xy
        assert betti0_normalized(x, y, p) >= 0.0
        assert betti0_normalized(x, x, p) == 0.0


class TestSoft:
    def test_mse(self):
        ones, zeros = np.ones((4, 4)), np.zeros((4, 4))
        assert mse(ones, ones) == 0.0
        assert mse(ones, zeros) == 1.0
        half = zeros.copy()
        half[:2] = 0.5
        assert mse(half, zeros) == 0.125

    def test_soft_range_validation(self):
        with pytest.raises(ValueError):
            mse(np.full((2, 2), 1.5), np.zeros((2, 2)))

    def test_soft_skeleton_zero(self):
        assert not soft_skeleton(np.zeros((6, 6)), 5).any()

    def test_soft_skeleton_line(self):
        m = np.zeros((7, 12))
        m[3, 2:10] = 1.0
        for it in (1, 3, 10):
            assert np.array_equal(soft_skeleton(m, it), m)

    def test_soft_skeleton_zero_iterations(self, rng):
        assert not soft_skeleton(rng.random((5, 5)), 0).any()

    def test_soft_skeleton_range(self, rng):
        for _ in range(20):
            s = soft_skeleton(rng.random((15, 15)), 10)
            assert s.min() >= 0.0 and s.max() <= 1.0

    def test_soft_cldice_self(self, rng):
        m = (rng.random((32, 32)) < 0.5).astype(float)
        assert soft_cldice_loss(m, m, 10) <= 1e-6

    def test_soft_cldice_disjoint(self):
        a = np.zeros((16, 16))
        b = np.zeros((16, 16))
        a[2:5, 1:15] = 1.0
        b[10:13, 1:15] = 1.0
        assert soft_cldice_loss(a, b, 10) >= 1 - 1e-6

    def test_soft_cldice_fixture(self):
        pred, gt = soft_pair()
        assert soft_cldice_loss(pred, gt, 10) == pytest.approx(SOFT_PAIR_LOSS, abs=1e-12)

    def test_soft_cldice_matches_reference_on_random_inputs(self, rng):
        for it in (1, 4):
            p, g = rng.random((9, 11)), rng.random((9, 11))
            ref = soft_cldice_reference(p.tolist(), g.tolist(), it)
            assert soft_cldice_loss(p, g, it) == pytest.approx(ref, abs=1e-12)


class TestArithmetic:
    def test_headline_improvement(self):
        assert relative_improvement(0.52, 0.34) == pytest.approx(34.6, abs=0.05)

    def test_no_change(self):
        assert relative_improvement(0.7, 0.7) == 0.0

    def test_ablation(self):
        assert 0.48 - 0.34 == pytest.approx(0.14, abs=1e-12)
        assert relative_improvement(0.48, 0.34) == pytest.approx(29.2, abs=0.05)

    @pytest.mark.parametrize("base", [0.0, -1.0])
    def test_domain(self, base):
        with pytest.raises(DomainError):
            relative_improvement(base, 0.1)


class TestAggregate:
    def test_single_row(self):
        agg = aggregate([("a", 0.9, 0.8, 0.7, 0.25)])
        assert agg["dice"] == (0.9, 0.0) and agg["beta0"] == (0.25, 0.0)

    def test_population_std(self):
        agg = aggregate([(0, 0, 0, 0), (1, 1, 1, 1)])
        assert agg["iou"] == (0.5, 0.5)

    def test_sample_std(self):
        agg = aggregate([(0, 0, 0, 0), (1, 1, 1, 1)], ddof=1)
        assert agg["iou"][1] == pytest.approx(np.sqrt(0.5))

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            aggregate([])

    def test_random_rows_match_two_pass(self, rng):
        rows = [(f"img{i}",) + tuple(rng.random(4)) for i in range(100)]
        agg = aggregate(rows)
        for k, name in enumerate(("dice", "iou", "cldice", "beta0")):
            mean, std = two_pass_stats([r[k + 1] for r in rows])
            assert agg[name][0] == pytest.approx(mean, abs=1e-12)
            assert agg[name][1] == pytest.approx(std, abs=1e-12)

    def test_report_recomputable(self, rng):
        rows = [(f"i{i}",) + tuple(rng.random(4)) for i in range(7)]
        report = MetricReport.from_rows(rows)
        assert report.aggregate == aggregate(report.per_image)
        assert report.n == 7
