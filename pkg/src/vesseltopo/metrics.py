"""Overlap and topology scores for vessel masks, plus the loss values.

Hard metrics take boolean masks; ``mse``, ``soft_skeleton`` and
``soft_cldice_loss`` take soft masks with values in [0, 1].
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .exceptions import DomainError, EmptyInputError
from .raster import tile_patches
from .topology import DEFAULT_CONNECTIVITY, patch_component_counts, skeletonize
from .validation import check_mask, check_same_shape, check_soft_mask

SOFT_EPS = 1e-8
SOFT_ITERATIONS = 10
METRIC_NAMES = ("dice", "iou", "cldice", "beta0")


def _pair(x, y):
    x = check_mask(x, "x")
    y = check_mask(y, "y")
    check_same_shape(x, y, ("x", "y"))
    return x, y


def dice(x, y):
    """``2|X & Y| / (|X| + |Y|)``; two empty masks score 1."""
    x, y = _pair(x, y)
    total = int(np.count_nonzero(x)) + int(np.count_nonzero(y))
    if total == 0:
        return 1.0
    return 2.0 * np.count_nonzero(x & y) / total


def iou(x, y):
    """``|X & Y| / |X | Y|``; two empty masks score 1."""
    x, y = _pair(x, y)
    union = int(np.count_nonzero(x | y))
    if union == 0:
        return 1.0
    return np.count_nonzero(x & y) / union


def cldice(pred, gt):
    """Centerline Dice: harmonic mean of topology precision and sensitivity.

    Both skeletons empty gives 1.0; exactly one empty gives 0.0.
    """
    pred, gt = _pair(pred, gt)
    skel_p = skeletonize(pred)
    skel_g = skeletonize(gt)
    n_p = int(np.count_nonzero(skel_p))
    n_g = int(np.count_nonzero(skel_g))
    if n_p == 0 and n_g == 0:
        return 1.0
    if n_p == 0 or n_g == 0:
        return 0.0
    tprec = np.count_nonzero(skel_p & gt) / n_p
    tsens = np.count_nonzero(skel_g & pred) / n_g
    if tprec + tsens == 0:
        return 0.0
    return 2.0 * tprec * tsens / (tprec + tsens)


def betti0_normalized(pred, gt, patch_size=64, connectivity=DEFAULT_CONNECTIVITY):
    """Mean over patches of the absolute difference in component counts."""
    pred, gt = _pair(pred, gt)
    grid = tile_patches(pred.shape[1], pred.shape[0], patch_size)
    diff = np.abs(
        patch_component_counts(pred, patch_size, connectivity)
        - patch_component_counts(gt, patch_size, connectivity)
    )
    return float(diff.sum()) / grid.count


def mse(pred, gt):
    pred = check_soft_mask(pred, "pred")
    gt = check_soft_mask(gt, "gt")
    check_same_shape(pred, gt)
    return float(np.mean((pred - gt) ** 2))


def soft_skeleton(mask, iterations=SOFT_ITERATIONS):
    """Differentiable skeleton surrogate built from 3x3 min/max filters."""
    img = check_soft_mask(mask)
    skel = np.zeros_like(img)
    for _ in range(int(iterations)):
        eroded = ndimage.minimum_filter(img, size=3, mode="nearest")
        opened = ndimage.maximum_filter(eroded, size=3, mode="nearest")
        skel += np.maximum(img - opened, 0.0) * (1.0 - skel)
        img = eroded
    return np.clip(skel, 0.0, 1.0)


def soft_cldice_loss(pred, gt, iterations=SOFT_ITERATIONS):
    """``1 - soft clDice``, in [0, 1]."""
    pred = check_soft_mask(pred, "pred")
    gt = check_soft_mask(gt, "gt")
    check_same_shape(pred, gt)
    skel_p = soft_skeleton(pred, iterations)
    skel_g = soft_skeleton(gt, iterations)
    tprec = (skel_p * gt).sum() / (skel_p.sum() + SOFT_EPS)
    tsens = (skel_g * pred).sum() / (skel_g.sum() + SOFT_EPS)
    return float(1.0 - 2.0 * tprec * tsens / (tprec + tsens + SOFT_EPS))


def relative_improvement(baseline, value):
    """Percentage reduction of ``value`` relative to ``baseline``."""
    if not baseline > 0:
        raise DomainError(f"baseline must be positive, got {baseline!r}")
    return 100.0 * (baseline - value) / baseline


def score_pair(pred, gt, patch_size=64, connectivity=DEFAULT_CONNECTIVITY):
    """All four per-image metrics as a dict keyed by :data:`METRIC_NAMES`."""
    pred, gt = _pair(pred, gt)
    return {
        "dice": dice(pred, gt),
        "iou": iou(pred, gt),
        "cldice": cldice(pred, gt),
        "beta0": betti0_normalized(pred, gt, patch_size, connectivity),
    }


@dataclass
class MetricReport:
    """Per-image rows ``(image_id, dice, iou, cldice, beta0)`` and their summary.

    ``aggregate`` maps each metric name to ``(mean, std)``.
    """

    per_image: list
    aggregate: dict = field(default_factory=dict)
    ddof: int = 0

    @classmethod
    def from_rows(cls, rows, ddof=0):
        rows = list(rows)
        return cls(rows, aggregate(rows, ddof=ddof), ddof)

    @property
    def n(self):
        return len(self.per_image)

    def mean(self, metric):
        return self.aggregate[metric][0]

    def std(self, metric):
        return self.aggregate[metric][1]


def aggregate(rows, ddof=0):
    """Mean and standard deviation of every metric column.

    ``rows`` are ``(image_id, dice, iou, cldice, beta0)`` tuples or bare
    4-tuples of values. ``ddof=0`` gives the population deviation; ``ddof=1``
    the sample deviation.
    """
    rows = list(rows)
    if not rows:
        raise EmptyInputError("cannot aggregate an empty list of rows")
    values = np.array([r[-len(METRIC_NAMES):] for r in rows], dtype=np.float64)
    if ddof and len(rows) <= ddof:
        std = np.zeros(len(METRIC_NAMES))
    else:
        std = values.std(axis=0, ddof=ddof)
    mean = values.mean(axis=0)
    return {name: (float(mean[i]), float(std[i])) for i, name in enumerate(METRIC_NAMES)}
