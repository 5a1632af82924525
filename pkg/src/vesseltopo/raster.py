"""Mask I/O, patch tiling, bridge rasterization and the distance transform.

Masks are 2-D boolean numpy arrays of shape ``(height, width)``. Pixel
coordinates are ``(x, y)`` tuples, ``x`` being the column.
"""

from dataclasses import dataclass
from math import ceil

import numpy as np

from . import _jit
from .exceptions import ParseError, TruncatedError
from .validation import check_mask, check_point

P5_THRESHOLD = 128

_WHITESPACE = b" \t\n\r\v\f"


def _read_header(data, count):
    """Read ``count`` integer tokens after the magic; return them and the payload offset."""
    pos = 2
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and (data[pos] in _WHITESPACE or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        tok = data[start:pos]
        if not tok:
            raise ParseError("header ends before all fields were read")
        if not tok.isdigit():
            raise ParseError(f"non-numeric header field {tok!r}")
        tokens.append(int(tok))
    if pos >= n or data[pos] not in _WHITESPACE:
        if pos >= n:
            raise TruncatedError("no payload after header")
        raise ParseError("header must be followed by a single whitespace byte")
    return tokens, pos + 1


def load_pgm(data):
    """Decode a binary PBM (``P4``) or PGM (``P5``) byte string into a mask.

    P4 bits set to 1 become foreground. P5 samples ``>= 128`` become
    foreground whatever the declared maxval.
    """
    data = bytes(data)
    magic = data[:2]
    if magic == b"P4":
        (width, height), off = _read_header(data, 2)
    elif magic == b"P5":
        (width, height, maxval), off = _read_header(data, 3)
        if not 0 < maxval <= 255:
            raise ParseError(f"unsupported maxval {maxval}")
    else:
        raise ParseError(f"unsupported magic {magic!r}")
    if width <= 0 or height <= 0:
        raise ParseError(f"invalid dimensions {width}x{height}")

    payload = np.frombuffer(data, dtype=np.uint8, offset=off)
    if magic == b"P4":
        row_bytes = (width + 7) // 8
        need = row_bytes * height
        if payload.size < need:
            raise TruncatedError(f"need {need} payload bytes, got {payload.size}")
        rows = payload[:need].reshape(height, row_bytes)
        return np.unpackbits(rows, axis=1)[:, :width].astype(bool)
    need = width * height
    if payload.size < need:
        raise TruncatedError(f"need {need} payload bytes, got {payload.size}")
    return payload[:need].reshape(height, width) >= P5_THRESHOLD


def save_pgm(mask, format="P5"):
    """Encode a mask as ``P4`` (packed bits) or ``P5`` (0/255 bytes)."""
    mask = check_mask(mask)
    height, width = mask.shape
    if format == "P4":
        header = f"P4\n{width} {height}\n".encode("ascii")
        return header + np.packbits(mask, axis=1).tobytes()
    if format == "P5":
        header = f"P5\n{width} {height}\n255\n".encode("ascii")
        return header + (mask.astype(np.uint8) * 255).tobytes()
    raise ValueError(f"format must be 'P4' or 'P5', got {format!r}")


def read_mask(path):
    with open(path, "rb") as fh:
        return load_pgm(fh.read())


def write_mask(path, mask, format=None):
    """Write ``mask`` to ``path``; ``.pbm`` files default to P4, others to P5."""
    if format is None:
        format = "P4" if str(path).lower().endswith(".pbm") else "P5"
    with open(path, "wb") as fh:
        fh.write(save_pgm(mask, format))


@dataclass(frozen=True)
class PatchGrid:
    """Row-major tiling of an image into ``patch_size`` squares.

    Border tiles are truncated to the image rather than padded.
    """

    width: int
    height: int
    patch_size: int
    patches: tuple

    @property
    def count(self):
        return len(self.patches)

    def slices(self):
        for x0, y0, w, h in self.patches:
            yield slice(y0, y0 + h), slice(x0, x0 + w)


def tile_patches(width, height, patch_size=64):
    if width <= 0 or height <= 0 or patch_size <= 0:
        raise ValueError("width, height and patch_size must be positive")
    patches = []
    for y0 in range(0, height, patch_size):
        for x0 in range(0, width, patch_size):
            patches.append(
                (x0, y0, min(patch_size, width - x0), min(patch_size, height - y0))
            )
    assert len(patches) == ceil(width / patch_size) * ceil(height / patch_size)
    return PatchGrid(width, height, patch_size, tuple(patches))


def distance_transform(mask, squared=False):
    """Exact Euclidean distance from each foreground pixel to the background.

    Pixels beyond the image border count as background. With
    ``squared=True`` the exact integer squared distances are returned.
    """
    mask = check_mask(mask)
    sq = _jit.squared_edt(mask)
    if squared:
        return sq
    return np.sqrt(sq)


def bresenham(p, q):
    """Integer points of the Bresenham segment from ``p`` to ``q`` inclusive."""
    x0, y0 = p
    x1, y1 = q
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    points = []
    while True:
        points.append((x0, y0))
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
    return np.array(points, dtype=np.int64)


def disk_offsets(radius):
    """``(dx, dy)`` offsets with ``dx**2 + dy**2 <= radius**2``."""
    r = int(np.floor(radius))
    d = np.arange(-r, r + 1)
    dx, dy = np.meshgrid(d, d)
    keep = dx * dx + dy * dy <= radius * radius
    return dx[keep], dy[keep]


def stamp(mask, xs, ys, radius, value=True):
    """Set every pixel within ``radius`` of any ``(xs[i], ys[i])`` in place."""
    h, w = mask.shape
    for dx, dy in zip(*disk_offsets(radius)):
        x = xs + dx
        y = ys + dy
        ok = (x >= 0) & (x < w) & (y >= 0) & (y < h)
        mask[y[ok], x[ok]] = value
    return mask


def draw_bridge(mask, p, q, radius):
    """Return a copy of ``mask`` with a thick Bresenham segment from ``p`` to ``q``."""
    mask = check_mask(mask)
    p = check_point(p, mask.shape, "p")
    q = check_point(q, mask.shape, "q")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    pts = bresenham(p, q)
    return stamp(mask.copy(), pts[:, 0], pts[:, 1], radius)
