"""Input validation helpers in the spirit of ``sklearn.utils.validation``.

Masks are plain 2-D numpy arrays indexed ``[row, column]``; pixel
coordinates elsewhere in the package are ``(x, y)`` = ``(column, row)``.
"""

import numpy as np

from .exceptions import BoundsError, ShapeError


def check_mask(mask, name="mask"):
    """Return ``mask`` as a C-contiguous boolean array.

    Accepts boolean arrays and integer/float arrays whose values are
    exactly 0 or 1. Anything else raises.
    """
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ShapeError(f"{name} must have positive width and height, got {arr.shape}")
    if arr.dtype == np.bool_:
        return np.ascontiguousarray(arr)
    if not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    return np.ascontiguousarray(arr != 0)


def check_soft_mask(mask, name="mask"):
    """Return ``mask`` as a float64 array with every value in [0, 1]."""
    arr = np.asarray(mask, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ShapeError(f"{name} must have positive width and height, got {arr.shape}")
    if not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} values must lie in [0, 1]")
    return arr


def check_same_shape(a, b, names=("pred", "gt")):
    if a.shape != b.shape:
        raise ShapeError(
            f"{names[0]} has shape {a.shape} but {names[1]} has shape {b.shape}"
        )


def check_point(point, shape, name="point"):
    """Validate an ``(x, y)`` pixel coordinate against an array shape."""
    x, y = int(point[0]), int(point[1])
    if not (0 <= x < shape[1] and 0 <= y < shape[0]):
        raise BoundsError(f"{name} {(x, y)} outside {shape[1]}x{shape[0]} image")
    return x, y


def check_mask_collection(X, name="X"):
    """Validate a list (or 3-D stack) of masks for the estimator API."""
    if isinstance(X, np.ndarray) and X.ndim == 2:
        raise ShapeError(f"{name} must be a sequence of 2-D masks; wrap a single mask in a list")
    return [check_mask(m, f"{name}[{i}]") for i, m in enumerate(X)]
