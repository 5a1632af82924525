import numpy as np
import pytest

from oracles import normal_cdf_series
from vesseltopo.exceptions import ShapeError
from vesseltopo.kernels import (
    AdapterWeights,
    adapter_grad_check,
    feature_adapter,
    gelu,
    normal_cdf,
    spatial_adapter,
)

GELU_ONE = 0.841344746068543  # Phi(1), standard normal tables

W1 = np.array([[1.0], [2.0], [0.0], [-1.0]])
W2 = np.array([[1.0, -1.0, 2.0, 0.0]])
# x = e1 -> x @ W1 = 1 -> gelu(1) * W2
FEATURE_FIXTURE = np.array([GELU_ONE, -GELU_ONE, 2 * GELU_ONE, 0.0])


def test_gelu_points():
    assert gelu(0.0) == 0.0
    assert abs(gelu(10.0) - 10.0) <= 1e-9
    assert gelu(1.0) == pytest.approx(GELU_ONE, abs=1e-15)
    assert gelu(1.0) == pytest.approx(normal_cdf_series(1.0), abs=1e-14)


def test_gelu_matches_series_on_grid():
    xs = np.linspace(-4, 4, 81)
    ref = np.array([x * normal_cdf_series(x) for x in xs])
    assert np.allclose(gelu(xs), ref, atol=1e-12, rtol=0)


def test_gelu_definition_on_dense_grid():
    xs = np.linspace(-8, 8, 4001)
    assert np.max(np.abs(gelu(xs) - xs * normal_cdf(xs))) <= 1e-12


def test_gelu_monotone_above_its_minimum():
    # x * Phi(x) has its only minimum near -0.7518
    xs = np.linspace(-0.75, 6, 2001)
    assert (np.diff(gelu(xs)) >= 0).all()


def test_feature_fixture():
    x = np.array([1.0, 0.0, 0.0, 0.0])
    w = AdapterWeights(W1, W2)
    assert np.allclose(feature_adapter(x, w), FEATURE_FIXTURE, atol=1e-15)
    assert np.allclose(spatial_adapter(x, w), FEATURE_FIXTURE + x, atol=1e-15)


def test_zero_weights():
    w = AdapterWeights.zeros(8)
    x = np.random.default_rng(0).standard_normal(8)
    assert not feature_adapter(x, w).any()
    assert np.array_equal(spatial_adapter(x, w), x)


def test_residual_difference(rng):
    w = AdapterWeights.random(16, rng)
    x = rng.standard_normal(16)
    assert np.allclose(spatial_adapter(x, w) - feature_adapter(x, w), x, atol=1e-12)


def test_nonlinear():
    w = AdapterWeights(W1, W2)
    x = np.array([1.0, 0.0, 0.0, 0.0])
    assert not np.allclose(feature_adapter(2 * x, w), 2 * feature_adapter(x, w))


def test_shapes():
    with pytest.raises(ShapeError):
        AdapterWeights(np.zeros((6, 1)), np.zeros((1, 6)))
    with pytest.raises(ShapeError):
        AdapterWeights(np.zeros((4, 2)), np.zeros((2, 4)))
    with pytest.raises(ShapeError):
        feature_adapter(np.zeros(3), AdapterWeights.zeros(4))


def test_grad_check_zero_weights():
    x = np.random.default_rng(1).standard_normal(8)
    assert adapter_grad_check(AdapterWeights.zeros(8), x) <= 1e-7


def test_grad_check_random_d8():
    rng = np.random.default_rng(0)
    w = AdapterWeights.random(8, rng)
    assert adapter_grad_check(w, rng.standard_normal(8)) <= 1e-5
    assert adapter_grad_check(w, rng.standard_normal(8), residual=False) <= 1e-5


def test_grad_check_detects_large_step():
    rng = np.random.default_rng(0)
    w = AdapterWeights.random(8, rng)
    assert adapter_grad_check(w, rng.standard_normal(8), h=1e-1) > 1e-3
