"""Compiled raster kernels.

Everything here works on plain numpy arrays and is wrapped by the public
modules, which do the validation. Kernels release the GIL so callers may
run them from a thread pool.
"""

import numba
import numpy as np

_JIT = dict(cache=True, nogil=True)


# ---------------------------------------------------------------- union-find


@numba.njit(**_JIT)
def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


@numba.njit(**_JIT)
def _union(parent, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return ra
    # the smaller label is the one seen first in raster order
    if ra < rb:
        parent[rb] = ra
        return ra
    parent[ra] = rb
    return rb


@numba.njit(**_JIT)
def _provisional_labels(mask, conn8, patch):
    """First raster pass. Unions never cross a ``patch``-aligned boundary."""
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    parent = np.zeros(h * w // 2 + 2, dtype=np.int32)
    n = 0
    for y in range(h):
        top = y % patch != 0
        for x in range(w):
            if not mask[y, x]:
                continue
            left = x % patch != 0
            right = x + 1 < w and (x + 1) % patch != 0
            cur = 0
            if left and mask[y, x - 1]:
                cur = labels[y, x - 1]
            if top:
                if mask[y - 1, x]:
                    cur = labels[y - 1, x] if cur == 0 else _union(parent, cur, labels[y - 1, x])
                if conn8:
                    if left and mask[y - 1, x - 1]:
                        lab = labels[y - 1, x - 1]
                        cur = lab if cur == 0 else _union(parent, cur, lab)
                    if right and mask[y - 1, x + 1]:
                        lab = labels[y - 1, x + 1]
                        cur = lab if cur == 0 else _union(parent, cur, lab)
            if cur == 0:
                n += 1
                if n >= parent.shape[0]:
                    grown = np.zeros(parent.shape[0] * 2, dtype=np.int32)
                    grown[: parent.shape[0]] = parent
                    parent = grown
                parent[n] = n
                cur = n
            labels[y, x] = cur
    return labels, parent, n


@numba.njit(**_JIT)
def label(mask, conn8):
    """Return ``(labels, count)`` with labels numbered by first raster pixel."""
    h, w = mask.shape
    labels, parent, n = _provisional_labels(mask, conn8, max(h, w) + 1)
    final = np.zeros(n + 1, dtype=np.int32)
    count = 0
    for i in range(1, n + 1):
        r = _find(parent, i)
        if r == i:
            count += 1
            final[i] = count
        else:
            final[i] = final[r]
    for y in range(h):
        for x in range(w):
            if labels[y, x]:
                labels[y, x] = final[labels[y, x]]
    return labels, count


@numba.njit(**_JIT)
def patch_component_counts(mask, conn8, patch):
    """Component count of every ``patch``-sized tile, in row-major tile order."""
    h, w = mask.shape
    ny = (h + patch - 1) // patch
    nx = (w + patch - 1) // patch
    labels, parent, n = _provisional_labels(mask, conn8, patch)
    counts = np.zeros(ny * nx, dtype=np.int64)
    seen = np.zeros(n + 1, dtype=np.uint8)
    for y in range(h):
        for x in range(w):
            lab = labels[y, x]
            if lab and not seen[lab]:
                seen[lab] = 1
                if _find(parent, lab) == lab:
                    counts[(y // patch) * nx + x // patch] += 1
    return counts


# ------------------------------------------------------------ Zhang-Suen


@numba.njit(**_JIT)
def _thinning_tables():
    # bit k of a code is neighbour P(k+2) in the clockwise order N, NE, E, SE, S, SW, W, NW
    lut = np.zeros((2, 256), dtype=np.uint8)
    for code in range(256):
        p = np.zeros(8, dtype=np.int64)
        for k in range(8):
            p[k] = (code >> k) & 1
        b = p.sum()
        a = 0
        for k in range(8):
            if p[k] == 0 and p[(k + 1) % 8] == 1:
                a += 1
        if b < 2 or b > 6 or a != 1:
            continue
        p2, p4, p6, p8 = p[0], p[2], p[4], p[6]
        if p2 * p4 * p6 == 0 and p4 * p6 * p8 == 0:
            lut[0, code] = 1
        if p2 * p4 * p8 == 0 and p2 * p6 * p8 == 0:
            lut[1, code] = 1
    return lut


@numba.njit(**_JIT)
def _neighbour_code(img, y, x):
    return (
        img[y - 1, x]
        | (img[y - 1, x + 1] << 1)
        | (img[y, x + 1] << 2)
        | (img[y + 1, x + 1] << 3)
        | (img[y + 1, x] << 4)
        | (img[y + 1, x - 1] << 5)
        | (img[y, x - 1] << 6)
        | (img[y - 1, x - 1] << 7)
    )


@numba.njit(**_JIT)
def zhang_suen(img):
    """Thin a zero-padded uint8 image in place to its Zhang-Suen fixpoint.

    Only pixels touching the background can ever be deleted, so each
    sub-iteration visits a shrinking frontier instead of the whole image.
    """
    h, w = img.shape
    lut = _thinning_tables()
    flat = img.reshape(h * w)
    nfg = 0
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            nfg += img[y, x]
    cand = np.empty(nfg, dtype=np.int64)
    dels = np.empty(nfg, dtype=np.int64)
    queued = np.zeros(h * w, dtype=np.uint8)
    n = 0
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            if img[y, x] and _neighbour_code(img, y, x) != 255:
                cand[n] = y * w + x
                queued[y * w + x] = 1
                n += 1
    sub = 0
    idle = 0
    while idle < 2 and n > 0:
        ndel = 0
        for i in range(n):
            idx = cand[i]
            y = idx // w
            x = idx - y * w
            if lut[sub, _neighbour_code(img, y, x)]:
                dels[ndel] = idx
                ndel += 1
        if ndel == 0:
            idle += 1
        else:
            idle = 0
            for i in range(ndel):
                flat[dels[i]] = 0
            m = 0
            for i in range(n):
                if flat[cand[i]]:
                    cand[m] = cand[i]
                    m += 1
            for i in range(ndel):
                idx = dels[i]
                for dy in range(-1, 2):
                    for dx in range(-1, 2):
                        nb = idx + dy * w + dx
                        if flat[nb] and not queued[nb]:
                            queued[nb] = 1
                            cand[m] = nb
                            m += 1
            n = m
        sub ^= 1
    return img


# ------------------------------------------------ exact Euclidean distance


@numba.njit(**_JIT)
def _lower_envelope(f, n, out, v, z):
    k = 0
    v[0] = 0
    z[0] = -np.inf
    z[1] = np.inf
    for q in range(1, n):
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        while s <= z[k]:
            k -= 1
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        d = q - v[k]
        out[q] = d * d + f[v[k]]


@numba.njit(**_JIT)
def squared_edt(mask):
    """Squared distance from each pixel to the nearest zero, outside = zero."""
    h, w = mask.shape
    big = 1e30
    H = h + 2
    W = w + 2
    grid = np.empty((H, W), dtype=np.float64)
    for y in range(H):
        for x in range(W):
            grid[y, x] = 0.0
    for y in range(h):
        for x in range(w):
            if mask[y, x]:
                grid[y + 1, x + 1] = big
    m = max(H, W)
    f = np.empty(m, dtype=np.float64)
    out = np.empty(m, dtype=np.float64)
    v = np.empty(m, dtype=np.int64)
    z = np.empty(m + 1, dtype=np.float64)
    for x in range(W):
        for y in range(H):
            f[y] = grid[y, x]
        _lower_envelope(f, H, out, v, z)
        for y in range(H):
            grid[y, x] = out[y]
    for y in range(H):
        for x in range(W):
            f[x] = grid[y, x]
        _lower_envelope(f, W, out, v, z)
        for x in range(W):
            grid[y, x] = out[x]
    res = np.empty((h, w), dtype=np.int64)
    for y in range(h):
        for x in range(w):
            res[y, x] = np.int64(grid[y + 1, x + 1]) if mask[y, x] else 0
    return res
