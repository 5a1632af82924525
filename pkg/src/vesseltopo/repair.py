"""Rule-based reconnection of broken vessels.

Skeleton tips that face each other across a short gap are bridged; tips
that do not point at one another are left apart, which keeps genuinely
separate vessels separate.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .raster import bresenham, distance_transform, stamp
from .topology import find_endpoints, skeletonize
from .validation import check_mask, check_mask_collection

BRIDGE_CSV_COLUMNS = ("ax", "ay", "bx", "by", "gap", "score", "radius")


@dataclass(frozen=True)
class RepairParams:
    d_max: float = 20.0
    cos_min: float = 0.5
    width_mode: str = "distance-transform"
    fixed_radius: int = 1

    def __post_init__(self):
        if not self.d_max > 0:
            raise ValueError("d_max must be positive")
        if not -1.0 <= self.cos_min <= 1.0:
            raise ValueError("cos_min must lie in [-1, 1]")
        if self.width_mode not in ("distance-transform", "fixed"):
            raise ValueError("width_mode must be 'distance-transform' or 'fixed'")
        if self.fixed_radius < 0:
            raise ValueError("fixed_radius must be non-negative")


@dataclass(frozen=True)
class BridgeProposal:
    a: object
    b: object
    gap: float
    score: float
    radius: int = 0

    def as_row(self):
        (ax, ay), (bx, by) = self.a.position, self.b.position
        return (ax, ay, bx, by, self.gap, self.score, self.radius)


def _alignment(a, b):
    """``min`` of the two tips' cosines toward each other."""
    (ax, ay), (bx, by) = a.position, b.position
    vx, vy = bx - ax, by - ay
    norm = np.hypot(vx, vy)
    if norm == 0:
        return -1.0
    ux, uy = vx / norm, vy / norm
    cos_a = a.direction[0] * ux + a.direction[1] * uy
    cos_b = -(b.direction[0] * ux + b.direction[1] * uy)
    return float(min(cos_a, cos_b))


def _candidates(endpoints, params):
    # endpoints arrive in raster order, so i < j keeps ``a`` first in raster order
    found = []
    for i, a in enumerate(endpoints):
        for j in range(i + 1, len(endpoints)):
            b = endpoints[j]
            gap = float(np.hypot(b.position[0] - a.position[0], b.position[1] - a.position[1]))
            if gap > params.d_max:
                continue
            score = _alignment(a, b)
            if score >= params.cos_min:
                found.append((gap, -score, i, j, score))
    return found


def pair_endpoints(pred, params=RepairParams()):
    """Greedy shortest-gap-first matching of mutually aligned skeleton tips."""
    pred = check_mask(pred, "pred")
    endpoints = find_endpoints(skeletonize(pred))
    used = set()
    proposals = []
    for gap, _, i, j, score in sorted(_candidates(endpoints, params)):
        if i in used or j in used:
            continue
        used.update((i, j))
        proposals.append(BridgeProposal(endpoints[i], endpoints[j], gap, score))
    return proposals


def bridge_radius(dist, proposal, params):
    """Disk radius for a bridge.

    On a skeleton pixel the distance to the background is the vessel
    half-width plus one pixel, so one is subtracted to match the caliber.
    """
    if params.width_mode == "fixed":
        return int(params.fixed_radius)
    (ax, ay), (bx, by) = proposal.a.position, proposal.b.position
    return max(int(round(0.5 * (dist[ay, ax] + dist[by, bx]))) - 1, 0)


def repair_mask(pred, params=RepairParams()):
    """Bridge every accepted proposal; returns the repaired mask and the proposals.

    Proposals come back with their ``radius`` filled in.
    """
    pred = check_mask(pred, "pred")
    proposals = pair_endpoints(pred, params)
    out = pred.copy()
    if not proposals:
        return out, proposals
    dist = distance_transform(pred)
    drawn = []
    for prop in proposals:
        radius = bridge_radius(dist, prop, params)
        pts = bresenham(prop.a.position, prop.b.position)
        stamp(out, pts[:, 0], pts[:, 1], radius)
        drawn.append(BridgeProposal(prop.a, prop.b, prop.gap, prop.score, radius))
    return out, drawn


class MorphologicalRepair(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`repair_mask`.

    ``width`` is ``"dt"`` (bridge radius from the distance transform) or
    ``"fixed"``, in which case ``fixed_radius`` is used. ``proposals_``
    holds the bridges drawn for each mask of the last ``transform`` call.
    """

    def __init__(self, d_max=20.0, cos_min=0.5, width="dt", fixed_radius=1):
        self.d_max = d_max
        self.cos_min = cos_min
        self.width = width
        self.fixed_radius = fixed_radius

    def _params(self):
        mode = {"dt": "distance-transform"}.get(self.width, self.width)
        return RepairParams(self.d_max, self.cos_min, mode, self.fixed_radius)

    def fit(self, X, y=None):
        check_mask_collection(X)
        self.params_ = self._params()
        return self

    def transform(self, X):
        masks = check_mask_collection(X)
        params = self._params()
        out, self.proposals_ = [], []
        for m in masks:
            fixed, props = repair_mask(m, params)
            out.append(fixed)
            self.proposals_.append(props)
        return out
