"""Synthetic vessel breaks for building repair training and evaluation pairs.

Cuts are disks centred on the skeleton of an intact mask. A cut is kept
only when it genuinely disconnects the vessel, so every sample is a real
repair exercise. Randomness comes from a PCG32 stream so outputs are
bit-identical across platforms.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .exceptions import BoundsError, EmptyInputError
from .raster import disk_offsets, stamp
from .topology import count_components, skeletonize
from .validation import check_mask, check_mask_collection

ATTEMPTS_PER_BREAK = 50

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1


class PCG32:
    """PCG-XSH-RR with 64-bit state and 32-bit output.

    Seeding follows the reference ``pcg32_srandom_r``. The default stream
    uses the reference increment 1442695040888963407.
    """

    MULTIPLIER = 6364136223846793005
    INCREMENT = 1442695040888963407

    def __init__(self, seed, stream=None):
        self.inc = self.INCREMENT if stream is None else ((stream << 1) | 1) & _MASK64
        self.state = 0
        self.next_u32()
        self.state = (self.state + (seed & _MASK64)) & _MASK64
        self.next_u32()

    def next_u32(self):
        old = self.state
        self.state = (old * self.MULTIPLIER + self.inc) & _MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & _MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & _MASK32

    def bounded(self, bound):
        """Unbiased integer in ``[0, bound)`` by rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = ((1 << 32) - bound) % bound
        while True:
            r = self.next_u32()
            if r >= threshold:
                return r % bound


@dataclass(frozen=True)
class FragmentParams:
    breaks: int = 3
    min_radius: int = 2
    max_radius: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.breaks < 0:
            raise ValueError("breaks must be non-negative")
        if not 1 <= self.min_radius <= self.max_radius:
            raise ValueError("need 1 <= min_radius <= max_radius")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class BreakRecord:
    center: tuple
    radius: int
    components_before: int
    components_after: int

    def as_row(self):
        return (self.center[0], self.center[1], self.radius,
                self.components_before, self.components_after)


BREAK_CSV_COLUMNS = ("center_x", "center_y", "radius", "cc_before", "cc_after")


def _disk(shape, center, radius):
    region = np.zeros(shape, dtype=bool)
    return stamp(region, np.array([center[0]]), np.array([center[1]]), radius)


def generate_breaks(gt, params):
    """Cut up to ``params.breaks`` disconnecting disks out of ``gt``.

    Returns the fragmented mask and the accepted :class:`BreakRecord` list
    in acceptance order.
    """
    gt = check_mask(gt, "gt")
    if not gt.any():
        raise EmptyInputError("ground-truth mask is empty")
    out = gt.copy()
    records = []
    if params.breaks == 0:
        return out, records

    ys, xs = np.nonzero(skeletonize(gt))
    rng = PCG32(params.seed)
    used = np.zeros(gt.shape, dtype=bool)
    components = count_components(out)
    span = params.max_radius - params.min_radius + 1
    for _ in range(ATTEMPTS_PER_BREAK * params.breaks):
        if len(records) == params.breaks:
            break
        k = rng.bounded(len(xs))
        radius = params.min_radius + rng.bounded(span)
        center = (int(xs[k]), int(ys[k]))
        disk = _disk(gt.shape, center, radius)
        if (disk & used).any():
            continue
        trial = out & ~disk
        after = count_components(trial)
        if after <= components:
            continue
        records.append(BreakRecord(center, radius, components, after))
        out = trial
        used |= disk
        components = after
    return out, records


def break_region_mask(records, width, height):
    """Union of the break disks: the region a repair model has to fill in."""
    region = np.zeros((height, width), dtype=bool)
    for rec in records:
        x, y = rec.center
        if not (0 <= x < width and 0 <= y < height):
            raise BoundsError(f"break centre {(x, y)} outside {width}x{height} image")
        stamp(region, np.array([x]), np.array([y]), rec.radius)
    return region


class VesselFragmenter(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`generate_breaks`.

    ``transform`` takes a sequence of masks and returns the fragmented
    masks; the break records of the last call are kept in ``records_``.
    """

    def __init__(self, breaks=3, min_radius=2, max_radius=5, seed=0):
        self.breaks = breaks
        self.min_radius = min_radius
        self.max_radius = max_radius
        self.seed = seed

    def _params(self):
        return FragmentParams(self.breaks, self.min_radius, self.max_radius, self.seed)

    def fit(self, X, y=None):
        check_mask_collection(X)
        self.params_ = self._params()
        return self

    def transform(self, X):
        masks = check_mask_collection(X)
        params = self._params()
        out, self.records_ = [], []
        for m in masks:
            frag, recs = generate_breaks(m, params)
            out.append(frag)
            self.records_.append(recs)
        return out


# ------------------------------------------------------------ shape corpus


def _polyline_mask(shape, points, width):
    """Pixels whose centre lies within ``width / 2`` of the polyline."""
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    best = np.full(shape, np.inf)
    pts = np.asarray(points, dtype=np.float64)
    for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
        dx, dy = x1 - x0, y1 - y0
        t = ((xx - x0) * dx + (yy - y0) * dy) / max(dx * dx + dy * dy, 1e-12)
        t = np.clip(t, 0.0, 1.0)
        best = np.minimum(best, np.hypot(xx - (x0 + t * dx), yy - (y0 + t * dy)))
    return best <= width / 2.0


def _curve(fx, fy, n=200):
    t = np.linspace(0.0, 1.0, n)
    return np.column_stack([fx(t), fy(t)])


def vessel_shapes(size=128):
    """Ten synthetic vessel masks: lines, curves, bifurcations, a ring, parallels.

    Widths range from 2 to 4 pixels. The corpus is fixed, so downstream
    fragment/repair experiments are reproducible.
    """
    s = float(size)
    shape = (size, size)
    shapes = {}

    shapes["line"] = _polyline_mask(shape, [(8, 20), (s - 8, s - 30)], 3)
    shapes["sine"] = _polyline_mask(
        shape, _curve(lambda t: 6 + t * (s - 12), lambda t: s / 2 + 25 * np.sin(2 * np.pi * t)), 3
    )
    trunk = _polyline_mask(shape, [(s / 2, s - 4), (s / 2, s / 2)], 4)
    left = _polyline_mask(shape, [(s / 2, s / 2), (s / 4, 8)], 3)
    right = _polyline_mask(shape, [(s / 2, s / 2), (3 * s / 4, 8)], 3)
    shapes["bifurcation"] = trunk | left | right

    tree = _polyline_mask(shape, [(s / 2, s - 2), (s / 2, 0.7 * s)], 4)
    for sx in (-1, 1):
        bx = s / 2 + sx * s / 4
        tree |= _polyline_mask(shape, [(s / 2, 0.7 * s), (bx, 0.4 * s)], 3)
        for tx in (-1, 1):
            tree |= _polyline_mask(shape, [(bx, 0.4 * s), (bx + tx * s / 9, 4)], 2)
    shapes["tree"] = tree

    upper = _curve(lambda t: 4 + t * (s - 8), lambda t: 0.4 * s + 6 * np.sin(np.pi * t))
    lower = upper + np.array([0.0, 14.0])
    shapes["parallel"] = _polyline_mask(shape, upper, 3) | _polyline_mask(shape, lower, 3)

    shapes["arc"] = _polyline_mask(
        shape, _curve(lambda t: 8 + 0.8 * s * np.cos(t * np.pi / 2), lambda t: 8 + 0.8 * s * np.sin(t * np.pi / 2)), 3
    )
    shapes["crossing"] = _polyline_mask(shape, [(10, 10), (s - 10, s - 10)], 3) | _polyline_mask(
        shape, [(s - 10, 10), (10, s - 10)], 3
    )
    shapes["ring"] = _polyline_mask(
        shape, _curve(lambda t: s / 2 + 0.35 * s * np.cos(2 * np.pi * t), lambda t: s / 2 + 0.35 * s * np.sin(2 * np.pi * t)), 3
    )
    zig = [(6 + i * (s - 12) / 6, s / 2 + (20 if i % 2 else -20)) for i in range(7)]
    shapes["zigzag"] = _polyline_mask(shape, zig, 2.5)

    main = _curve(lambda t: s / 2 + 0.3 * s * np.sin(3 * np.pi * t), lambda t: 4 + t * (s - 8))
    branch = _curve(lambda t: s / 2 + 0.3 * s * np.sin(1.5 * np.pi) + t * 0.35 * s, lambda t: s / 2 + t * 0.3 * s)
    shapes["tortuous"] = _polyline_mask(shape, main, 4) | _polyline_mask(shape, branch, 2)
    return shapes
