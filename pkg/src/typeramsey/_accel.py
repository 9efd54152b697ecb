"""Hot search kernels: numba-compiled, with a pure-numpy fallback.

Set ``TYPERAMSEY_DISABLE_NUMBA=1`` to force the numpy path.  Both paths
return identical results; ``benchmarks/bench_kernels.py`` compares them.
"""

from __future__ import annotations

import itertools
import logging
import os

import numpy as np

logger = logging.getLogger(__name__)

USE_NUMBA = os.environ.get("TYPERAMSEY_DISABLE_NUMBA", "0").lower() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        logger.warning("numba unavailable, falling back to numpy kernels")
        USE_NUMBA = False

CHUNK = 1 << 16


# copy search ---------------------------------------------------------------

def _copy_exists_np(f_n, t_n, arities, f_data, f_off, t_data, t_off, monotone, reflect):
    if f_n > t_n:
        return False
    if f_n == 0:
        return True
    gen = itertools.combinations(range(t_n), f_n) if monotone else itertools.permutations(range(t_n), f_n)
    maps = np.fromiter(itertools.chain.from_iterable(gen), dtype=np.int64).reshape(-1, f_n)
    ok = np.ones(len(maps), dtype=bool)
    for k, r in enumerate(arities):
        grid = np.array(list(itertools.product(range(f_n), repeat=int(r))), dtype=np.int64)
        fvals = f_data[f_off[k] + (grid * (f_n ** np.arange(r - 1, -1, -1))).sum(axis=1)]
        tidx = np.zeros((len(maps), len(grid)), dtype=np.int64)
        for j in range(r):
            tidx = tidx * t_n + maps[:, grid[:, j]]
        tvals = t_data[t_off[k] + tidx]
        if reflect:
            ok &= (tvals == fvals).all(axis=1)
        else:
            ok &= (tvals >= fvals).all(axis=1)
    return bool(ok.any())


def _copy_exists_py(f_n, t_n, arities, f_data, f_off, t_data, t_off, monotone, reflect):
    # Reference loop compiled by numba; kept importable for the benchmark.
    if f_n > t_n:
        return False
    if f_n == 0:
        return True
    vm = np.zeros(f_n, dtype=np.int64)
    used = np.zeros(t_n, dtype=np.uint8)
    grid = np.zeros(8, dtype=np.int64)
    i = 0
    vm[0] = -1
    while i >= 0:
        if vm[i] >= 0:
            used[vm[i]] = 0
            x = vm[i] + 1
        elif monotone and i > 0:
            x = vm[i - 1] + 1
        else:
            x = 0
        while x < t_n and used[x] == 1:
            x += 1
        if x >= t_n or (monotone and t_n - x < f_n - i):
            vm[i] = -1
            i -= 1
            continue
        vm[i] = x
        used[x] = 1
        if i + 1 < f_n:
            i += 1
            vm[i] = -1
            continue
        good = True
        for k in range(arities.shape[0]):
            r = arities[k]
            total = f_n ** r
            for code in range(total):
                c = code
                for j in range(r - 1, -1, -1):
                    grid[j] = c % f_n
                    c //= f_n
                tid = 0
                for j in range(r):
                    tid = tid * t_n + vm[grid[j]]
                fv = f_data[f_off[k] + code]
                tv = t_data[t_off[k] + tid]
                if (reflect and fv != tv) or (not reflect and fv > tv):
                    good = False
                    break
            if not good:
                break
        if good:
            return True
    return False


# colouring search ----------------------------------------------------------

def _first_bad_np(copies, ndom, k, l, start, stop):
    """Scan colourings ``start..stop-1`` (base-k, domain index 0 most
    significant); skip non-canonical ones (colour-permutation reduction).
    Returns (first bad colouring index or -1, canonical colourings checked)."""
    powers = k ** np.arange(ndom - 1, -1, -1, dtype=np.int64)
    pad = copies < 0
    safe = np.where(pad, 0, copies)
    checked = 0
    for lo in range(start, stop, CHUNK):
        xs = np.arange(lo, min(stop, lo + CHUNK), dtype=np.int64)
        digits = (xs[:, None] // powers[None, :]) % k
        if ndom:
            prev_max = np.maximum.accumulate(digits, axis=1)
            canon = digits[:, 0] == 0
            if ndom > 1:
                canon &= (digits[:, 1:] <= prev_max[:, :-1] + 1).all(axis=1)
        else:
            canon = np.ones(len(xs), dtype=bool)
        checked += int(canon.sum())
        if copies.shape[0] == 0:
            good = np.zeros(len(xs), dtype=bool)
        else:
            bits = np.where(pad[None], 0, np.left_shift(1, digits[:, safe]))
            masks = np.bitwise_or.reduce(bits, axis=2) if copies.shape[1] else np.zeros((len(xs), copies.shape[0]), np.int64)
            good = (np.bitwise_count(masks.astype(np.uint64)) <= l).any(axis=1)
        bad = np.flatnonzero(canon & ~good)
        if bad.size:
            checked -= int(canon[bad[0] + 1:].sum())
            return int(xs[bad[0]]), checked
    return -1, checked


def _first_bad_py(copies, ndom, k, l, start, stop):
    digits = np.zeros(max(ndom, 1), dtype=np.int64)
    checked = 0
    for x in range(start, stop):
        c = x
        for j in range(ndom - 1, -1, -1):
            digits[j] = c % k
            c //= k
        canon = True
        mx = -1
        for j in range(ndom):
            if digits[j] > mx + 1:
                canon = False
                break
            if digits[j] > mx:
                mx = digits[j]
        if not canon:
            continue
        checked += 1
        good = False
        for b in range(copies.shape[0]):
            mask = 0
            for j in range(copies.shape[1]):
                p = copies[b, j]
                if p >= 0:
                    mask |= 1 << digits[p]
            cnt = 0
            while mask:
                mask &= mask - 1
                cnt += 1
            if cnt <= l:
                good = True
                break
        if not good:
            return x, checked
    return -1, checked


if USE_NUMBA:
    _copy_exists_nb = njit(cache=True)(_copy_exists_py)
    _first_bad_nb = njit(cache=True)(_first_bad_py)


def copy_exists(f_n, t_n, arities, f_data, f_off, t_data, t_off, monotone, reflect) -> bool:
    """Is there an injective (increasing if ``monotone``) map of the small
    table into the big one preserving tuples (and reflecting if ``reflect``)?"""
    args = (int(f_n), int(t_n), np.asarray(arities, dtype=np.int64), f_data, f_off, t_data, t_off,
            bool(monotone), bool(reflect))
    if USE_NUMBA:
        return bool(_copy_exists_nb(*args))
    return _copy_exists_np(*args)


def first_bad_coloring(copies: np.ndarray, ndom: int, k: int, l: int, start: int = 0, stop: int | None = None):
    copies = np.ascontiguousarray(copies, dtype=np.int64)
    if copies.ndim != 2:
        copies = copies.reshape(len(copies), -1 if len(copies) else 0)
    if stop is None:
        stop = k ** ndom
    if USE_NUMBA:
        x, checked = _first_bad_nb(copies, int(ndom), int(k), int(l), int(start), int(stop))
        return int(x), int(checked)
    return _first_bad_np(copies, int(ndom), int(k), int(l), int(start), int(stop))
