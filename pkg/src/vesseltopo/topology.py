"""Connected components, Zhang-Suen thinning and skeleton endpoints."""

from dataclasses import dataclass

import numpy as np

from . import _jit
from .exceptions import ContractError
from .validation import check_mask, check_point

DEFAULT_CONNECTIVITY = 8
DIRECTION_DEPTH = 5

# clockwise from east; used when walking along a skeleton
_NEIGHBOURS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))


@dataclass(frozen=True)
class LabelMap:
    labels: np.ndarray
    component_count: int

    @property
    def width(self):
        return self.labels.shape[1]

    @property
    def height(self):
        return self.labels.shape[0]


@dataclass(frozen=True)
class Endpoint:
    """A skeleton tip and the outward unit direction of the vessel there.

    ``valid`` is False when the tip is an isolated pixel, in which case
    ``direction`` is ``(0.0, 0.0)``.
    """

    position: tuple
    direction: tuple
    valid: bool = True


def _check_connectivity(connectivity):
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity!r}")
    return connectivity == 8


def connected_components(mask, connectivity=DEFAULT_CONNECTIVITY):
    """Label foreground components with a two-pass union-find scan.

    Labels run from 1 in the raster order of each component's first pixel.
    """
    mask = check_mask(mask)
    labels, count = _jit.label(mask, _check_connectivity(connectivity))
    return LabelMap(labels, int(count))


def count_components(mask, connectivity=DEFAULT_CONNECTIVITY):
    return connected_components(mask, connectivity).component_count


def patch_component_counts(mask, patch_size, connectivity=DEFAULT_CONNECTIVITY):
    """Component counts of every tile of ``tile_patches``, in the same order.

    Equivalent to calling :func:`connected_components` on each tile, in a
    single pass over the image.
    """
    mask = check_mask(mask)
    if patch_size <= 0:
        raise ValueError("patch_size must be positive")
    return _jit.patch_component_counts(mask, _check_connectivity(connectivity), int(patch_size))


def skeletonize(mask):
    """Zhang-Suen thinning run to its fixpoint."""
    mask = check_mask(mask)
    padded = np.zeros((mask.shape[0] + 2, mask.shape[1] + 2), dtype=np.uint8)
    padded[1:-1, 1:-1] = mask
    _jit.zhang_suen(padded)
    return padded[1:-1, 1:-1].astype(bool)


def _skeleton_neighbours(skel, x, y):
    h, w = skel.shape
    out = []
    for dx, dy in _NEIGHBOURS:
        nx, ny = x + dx, y + dy
        if 0 <= nx < w and 0 <= ny < h and skel[ny, nx]:
            out.append((nx, ny))
    return out


def neighbour_counts(skel):
    """Number of 8-neighbours set, for every pixel."""
    padded = np.pad(skel.astype(np.uint8), 1)
    h, w = skel.shape
    total = np.zeros((h, w), dtype=np.uint8)
    for dy in range(3):
        for dx in range(3):
            if dx != 1 or dy != 1:
                total += padded[dy : dy + h, dx : dx + w]
    return total


def endpoint_direction(skeleton, tip, depth=DIRECTION_DEPTH):
    """Outward unit direction of the skeleton at ``tip``.

    Walks up to ``depth`` steps inward along the skeleton, stopping at a
    junction or a dead end, and returns ``(direction, valid)``.
    """
    skel = check_mask(skeleton, "skeleton")
    x, y = check_point(tip, skel.shape, "tip")
    if not skel[y, x]:
        raise ContractError(f"tip {(x, y)} is not a skeleton pixel")
    nbrs = _skeleton_neighbours(skel, x, y)
    if len(nbrs) > 1:
        raise ContractError(f"tip {(x, y)} has {len(nbrs)} skeleton neighbours")
    visited = {(x, y)}
    cur = (x, y)
    steps = 0
    while steps < depth:
        nxt = [p for p in _skeleton_neighbours(skel, *cur) if p not in visited]
        if len(nxt) == 2 and max(abs(nxt[0][0] - nxt[1][0]), abs(nxt[0][1] - nxt[1][1])) == 1:
            # staircase corner, not a junction: take the 4-adjacent pixel
            nxt = [p for p in nxt if abs(p[0] - cur[0]) + abs(p[1] - cur[1]) == 1]
        if len(nxt) != 1:
            break
        cur = nxt[0]
        visited.add(cur)
        steps += 1
    if steps == 0:
        return (0.0, 0.0), False
    vx, vy = x - cur[0], y - cur[1]
    norm = float(np.hypot(vx, vy))
    return (vx / norm, vy / norm), True


def find_endpoints(skeleton, depth=DIRECTION_DEPTH):
    """Every skeleton pixel with exactly one 8-neighbour, in raster order."""
    skel = check_mask(skeleton, "skeleton")
    counts = neighbour_counts(skel)
    ys, xs = np.nonzero(skel & (counts == 1))
    endpoints = []
    for x, y in zip(xs.tolist(), ys.tolist()):
        direction, valid = endpoint_direction(skel, (x, y), depth)
        endpoints.append(Endpoint((x, y), direction, valid))
    return endpoints
