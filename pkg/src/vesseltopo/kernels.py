"""Bias-free bottleneck adapters with exact-erf GELU and their gradients.

Vectors are rows: ``x`` has length ``d``, ``w1`` is ``d x d/4`` and ``w2``
is ``d/4 x d``, so an adapter computes ``gelu(x @ w1) @ w2``.
"""

from dataclasses import dataclass
from math import erf, pi, sqrt

import numpy as np

from .exceptions import ShapeError

_SQRT2 = sqrt(2.0)
_INV_SQRT_2PI = 1.0 / sqrt(2.0 * pi)

REL_FLOOR = 1e-3

_erf = np.vectorize(erf, otypes=[np.float64])


def normal_cdf(x):
    return 0.5 * (1.0 + _erf(np.asarray(x, dtype=np.float64) / _SQRT2))


def gelu(x):
    """``x * Phi(x)`` with Phi the standard normal CDF. Works on scalars and arrays."""
    if np.isscalar(x):
        return x * 0.5 * (1.0 + erf(x / _SQRT2))
    x = np.asarray(x, dtype=np.float64)
    return x * normal_cdf(x)


def gelu_grad(x):
    x = np.asarray(x, dtype=np.float64)
    return normal_cdf(x) + x * _INV_SQRT_2PI * np.exp(-0.5 * x * x)


@dataclass(frozen=True)
class AdapterWeights:
    w1: np.ndarray
    w2: np.ndarray

    def __post_init__(self):
        w1 = np.asarray(self.w1, dtype=np.float64)
        w2 = np.asarray(self.w2, dtype=np.float64)
        if w1.ndim != 2 or w2.ndim != 2:
            raise ShapeError("adapter weights must be matrices")
        d = w1.shape[0]
        if d <= 0 or d % 4:
            raise ShapeError(f"feature dimension must be a positive multiple of 4, got {d}")
        if w1.shape != (d, d // 4) or w2.shape != (d // 4, d):
            raise ShapeError(f"expected shapes {(d, d // 4)} and {(d // 4, d)}, got {w1.shape} and {w2.shape}")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)

    @property
    def d(self):
        return self.w1.shape[0]

    @classmethod
    def zeros(cls, d):
        return cls(np.zeros((d, d // 4)), np.zeros((d // 4, d)))

    @classmethod
    def random(cls, d, rng=None, scale=1.0):
        rng = np.random.default_rng(rng)
        return cls(scale * rng.standard_normal((d, d // 4)), scale * rng.standard_normal((d // 4, d)))


def _check_input(x, w):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (w.d,):
        raise ShapeError(f"input must have shape {(w.d,)}, got {x.shape}")
    return x


def feature_adapter(x, w):
    x = _check_input(x, w)
    return gelu(x @ w.w1) @ w.w2


def spatial_adapter(x, w):
    """Residual adapter; the identity map when both weight matrices are zero."""
    x = _check_input(x, w)
    return x + feature_adapter(x, w)


def adapter_gradients(x, w, residual=True):
    """Analytic gradients of ``sum(adapter(x))`` w.r.t. ``x``, ``w1`` and ``w2``."""
    x = _check_input(x, w)
    pre = x @ w.w1
    hidden = gelu(pre)
    d_hidden = w.w2.sum(axis=1)
    d_pre = d_hidden * gelu_grad(pre)
    grad_x = w.w1 @ d_pre
    if residual:
        grad_x = grad_x + 1.0
    grad_w1 = np.outer(x, d_pre)
    grad_w2 = np.outer(hidden, np.ones(w.d))
    return grad_x, grad_w1, grad_w2


def _numeric_gradient(f, arr, h):
    grad = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        orig = arr[idx]
        arr[idx] = orig + h
        up = f()
        arr[idx] = orig - h
        down = f()
        arr[idx] = orig
        grad[idx] = (up - down) / (2.0 * h)
    return grad


def _relative_error(a, b):
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), REL_FLOOR)
    return float(np.max(np.abs(a - b) / scale))


def adapter_grad_check(w, x, h=1e-5, residual=True):
    """Largest relative error between analytic and central-difference gradients.

    Each entry contributes ``|a - n| / max(|a|, |n|, REL_FLOOR)``; the floor
    keeps saturated units, whose true gradient is ~1e-20, from turning
    round-off into a relative error of 1.
    """
    x = _check_input(x, w).copy()
    w1 = w.w1.copy()
    w2 = w.w2.copy()
    adapter = spatial_adapter if residual else feature_adapter

    def probe():
        return float(adapter(x, AdapterWeights(w1, w2)).sum())

    analytic = adapter_gradients(x, w, residual)
    numeric = (
        _numeric_gradient(probe, x, h),
        _numeric_gradient(probe, w1, h),
        _numeric_gradient(probe, w2, h),
    )
    return max(_relative_error(a, n) for a, n in zip(analytic, numeric))
