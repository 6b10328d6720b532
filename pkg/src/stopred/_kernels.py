"""Numba kernels for the single-word (n <= 64) fast path.

Subsets are ``uint64`` masks.  ``rows`` holds the rows of a parity-check
matrix as masks; ``cols`` holds the columns of a row-reduced basis of the
same row space (``r <= 64`` bits each), which is what independence tests
need.
"""

from __future__ import annotations

import numba
import numpy as np
from numba import njit, prange

# the bundled TBB is too old for numba; skip the probe and its warning
if numba.config.THREADING_LAYER == "default":
    numba.config.THREADING_LAYER = "omp"

_DEBRUIJN = np.uint64(0x03F79D71B4CB0A89)
_DEBRUIJN_TABLE = np.array(
    [0, 1, 48, 2, 57, 49, 28, 3, 61, 58, 50, 42, 38, 29, 17, 4,
     62, 55, 59, 36, 53, 51, 43, 22, 45, 39, 33, 30, 24, 18, 12, 5,
     63, 47, 56, 27, 60, 41, 37, 16, 54, 35, 52, 21, 44, 32, 23, 11,
     46, 26, 40, 15, 34, 20, 31, 10, 25, 14, 19, 9, 13, 8, 7, 6],
    dtype=np.int64,
)

DEC_ITERATIVE = 0
DEC_ML = 1


def binom_table(nmax: int = 64) -> np.ndarray:
    from math import comb

    t = np.zeros((nmax + 1, nmax + 1), dtype=np.uint64)
    for a in range(nmax + 1):
        for b in range(a + 1):
            t[a, b] = comb(a, b)
    return t


BINOM = binom_table()


@njit(cache=True, inline="always")
def ctz(x):
    low = x & (~x + np.uint64(1))
    return _DEBRUIJN_TABLE[(low * _DEBRUIJN) >> np.uint64(58)]


@njit(cache=True, inline="always")
def popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True, inline="always")
def single_bit(x):
    return x != np.uint64(0) and (x & (x - np.uint64(1))) == np.uint64(0)


@njit(cache=True)
def is_stopping(rows, s):
    for h in rows:
        if single_bit(h & s):
            return False
    return True


@njit(cache=True)
def is_independent(cols, s):
    basis = np.empty(64, dtype=np.uint64)
    nb = 0
    rest = s
    while rest != np.uint64(0):
        j = ctz(rest)
        rest &= rest - np.uint64(1)
        v = cols[j]
        for k in range(nb):
            b = basis[k]
            if v & (b & (~b + np.uint64(1))):
                v ^= b
        if v == np.uint64(0):
            return False
        basis[nb] = v
        nb += 1
    return True


@njit(cache=True)
def peel_residual(rows, e):
    changed = True
    while changed and e != np.uint64(0):
        changed = False
        for h in rows:
            x = h & e
            if single_bit(x):
                e ^= x
                changed = True
    return e


@njit(cache=True)
def unrank_colex(rank, k, binom):
    """k-subset with colexicographic rank ``rank`` as a mask."""
    mask = np.uint64(0)
    rank = np.uint64(rank)
    for pos in range(k, 0, -1):
        c = pos - 1
        while binom[c + 1, pos] <= rank:
            c += 1
        mask |= np.uint64(1) << np.uint64(c)
        rank -= binom[c, pos]
    return mask


@njit(cache=True, inline="always")
def next_comb(x):
    c = x & (~x + np.uint64(1))
    r = x + c
    return (((r ^ x) >> np.uint64(2)) // c) | r


def chunk_bounds(total: int, chunks: int) -> np.ndarray:
    chunks = max(1, min(chunks, total)) if total else 1
    return np.linspace(0, total, chunks + 1).astype(np.int64)


@njit(cache=True, parallel=True)
def count_stopping(rows, cols, k, coverable_only, bounds, binom):
    nchunks = bounds.shape[0] - 1
    out = np.zeros(nchunks, dtype=np.int64)
    for c in prange(nchunks):
        lo = bounds[c]
        hi = bounds[c + 1]
        if hi <= lo:
            continue
        s = unrank_colex(lo, k, binom)
        cnt = 0
        for _ in range(hi - lo):
            if is_stopping(rows, s):
                if not coverable_only or is_independent(cols, s):
                    cnt += 1
            s = next_comb(s)
        out[c] = cnt
    return out.sum()


@njit(cache=True)
def _fails(rows, cols, s, decoder):
    if decoder == DEC_ML:
        return not is_independent(cols, s)
    return peel_residual(rows, s) != np.uint64(0)


@njit(cache=True, parallel=True)
def count_failures(rows, cols, k, decoder, bounds, binom):
    nchunks = bounds.shape[0] - 1
    out = np.zeros(nchunks, dtype=np.int64)
    for c in prange(nchunks):
        lo = bounds[c]
        hi = bounds[c + 1]
        if hi <= lo:
            continue
        s = unrank_colex(lo, k, binom)
        cnt = 0
        for _ in range(hi - lo):
            if _fails(rows, cols, s, decoder):
                cnt += 1
            s = next_comb(s)
        out[c] = cnt
    return out.sum()


@njit(cache=True, parallel=True)
def count_failures_masks(rows, cols, masks, decoder):
    n = masks.shape[0]
    flags = np.zeros(n, dtype=np.int64)
    for t in prange(n):
        if _fails(rows, cols, masks[t], decoder):
            flags[t] = 1
    return flags.sum()


@njit(cache=True, parallel=True)
def compare_exhaustive(rows, cols, k, bounds, binom):
    """Per chunk: (iterative failures, ML failures, disagreements)."""
    nchunks = bounds.shape[0] - 1
    out = np.zeros((nchunks, 3), dtype=np.int64)
    for c in prange(nchunks):
        lo = bounds[c]
        hi = bounds[c + 1]
        if hi <= lo:
            continue
        s = unrank_colex(lo, k, binom)
        for _ in range(hi - lo):
            it = peel_residual(rows, s) != np.uint64(0)
            ml = not is_independent(cols, s)
            if it:
                out[c, 0] += 1
            if ml:
                out[c, 1] += 1
            if it != ml:
                out[c, 2] += 1
            s = next_comb(s)
    return out.sum(axis=0)


@njit(cache=True, parallel=True)
def compare_masks(rows, cols, masks):
    n = masks.shape[0]
    out = np.zeros((n, 3), dtype=np.int64)
    for t in prange(n):
        s = masks[t]
        it = peel_residual(rows, s) != np.uint64(0)
        ml = not is_independent(cols, s)
        out[t, 0] = it
        out[t, 1] = ml
        out[t, 2] = it != ml
    return out.sum(axis=0)


@njit(cache=True, parallel=True)
def coverable_stopping_flags(rows, cols, masks):
    n = masks.shape[0]
    flags = np.zeros(n, dtype=np.uint8)
    for t in prange(n):
        s = masks[t]
        if is_stopping(rows, s) and is_independent(cols, s):
            flags[t] = 1
    return flags


@njit(cache=True)
def fill_independent(cols, k, total, binom, out):
    """Write every independent k-subset mask (colex order) into ``out``."""
    s = unrank_colex(0, k, binom)
    n = 0
    for _ in range(total):
        if is_independent(cols, s):
            out[n] = s
            n += 1
        s = next_comb(s)
    return n


@njit(cache=True)
def count_independent(cols, k, total, binom):
    s = unrank_colex(0, k, binom)
    n = 0
    for _ in range(total):
        if is_independent(cols, s):
            n += 1
        s = next_comb(s)
    return n


# ----------------------------------------------------------------------
# row-restriction tests (estimators): each trial is a list of rows of H_S
# packed as i-bit ints

@njit(cache=True, parallel=True)
def restricted_coverable_stopping(restricted, i):
    ntrials, nrows = restricted.shape
    flags = np.zeros(ntrials, dtype=np.uint8)
    for t in prange(ntrials):
        ok = True
        for q in range(nrows):
            if single_bit(restricted[t, q]):
                ok = False
                break
        if not ok:
            continue
        basis = np.empty(64, dtype=np.uint64)
        nb = 0
        for q in range(nrows):
            v = restricted[t, q]
            for b in range(nb):
                bb = basis[b]
                if v & (bb & (~bb + np.uint64(1))):
                    v ^= bb
            if v != np.uint64(0):
                basis[nb] = v
                nb += 1
                if nb == i:
                    break
        if nb == i:
            flags[t] = 1
    return flags


@njit(cache=True, parallel=True)
def restrict_rows(dense, subsets):
    """Rows of ``dense`` restricted to each subset, packed as ints.

    ``subsets`` is (trials, i) of column indices; bit ``k`` of the result
    is the entry in column ``subsets[t, k]``.
    """
    ntrials, i = subsets.shape
    m = dense.shape[0]
    out = np.zeros((ntrials, m), dtype=np.uint64)
    for t in prange(ntrials):
        for q in range(m):
            v = np.uint64(0)
            for k in range(i):
                if dense[q, subsets[t, k]]:
                    v |= np.uint64(1) << np.uint64(k)
            out[t, q] = v
    return out


# ----------------------------------------------------------------------
# greedy covering: candidate rows are the nonzero dual codewords indexed by
# their coefficient vector ``a`` over a basis G (r rows); ``gcols[j]`` is
# column j of G as an r-bit int.

@njit(cache=True)
def covering_coefficients(s, gcols, r, span, out):
    """Coefficient vectors of all codewords meeting ``s`` in one position.

    Returns the number written to ``out`` (``|s| * 2**(r-|s|)``), or -1 when
    the columns of ``s`` are dependent (nothing covers it).  ``span`` is
    scratch space of length ``2**r``.
    """
    vecs = np.empty(64, dtype=np.uint64)
    tags = np.empty(64, dtype=np.uint64)
    pbits = np.empty(64, dtype=np.uint64)
    nb = 0
    rest = s
    eq = 0
    while rest != np.uint64(0):
        j = ctz(rest)
        rest &= rest - np.uint64(1)
        v = gcols[j]
        tg = np.uint64(1) << np.uint64(eq)
        eq += 1
        for k in range(nb):
            if v & pbits[k]:
                v ^= vecs[k]
                tg ^= tags[k]
        if v == np.uint64(0):
            return -1
        pb = v & (~v + np.uint64(1))
        for k in range(nb):
            if vecs[k] & pb:
                vecs[k] ^= v
                tags[k] ^= tg
        vecs[nb] = v
        tags[nb] = tg
        pbits[nb] = pb
        nb += 1
    i = nb
    pivmask = np.uint64(0)
    for k in range(i):
        pivmask |= pbits[k]
    # kernel basis, then its span via Gray code
    kern = np.empty(64, dtype=np.uint64)
    nk = 0
    for f in range(r):
        fb = np.uint64(1) << np.uint64(f)
        if pivmask & fb:
            continue
        kv = fb
        for k in range(i):
            if vecs[k] & fb:
                kv |= pbits[k]
        kern[nk] = kv
        nk += 1
    size = 1 << nk
    span[0] = np.uint64(0)
    for g in range(1, size):
        span[g] = span[g - 1] ^ kern[ctz(np.uint64(g))]
    n = 0
    for a in range(i):
        abit = np.uint64(1) << np.uint64(a)
        base = np.uint64(0)
        for k in range(i):
            if tags[k] & abit:
                base |= pbits[k]
        for g in range(size):
            out[n] = base ^ span[g]
            n += 1
    return n


@njit(cache=True)
def accumulate_scores(masks, sizes, gcols, r, score, sign):
    span = np.empty(1 << r, dtype=np.uint64)
    buf = np.empty(64 << r, dtype=np.uint64)
    for t in range(masks.shape[0]):
        n = covering_coefficients(masks[t], gcols, r, span, buf)
        w = sign * np.int64(sizes[t])
        for q in range(n):
            score[buf[q]] += w


@njit(cache=True)
def remove_covered(h, masks, sizes, length, gcols, r, score):
    """Drop every set covered by ``h`` from the live prefix, updating scores.

    Compacts ``masks[:length]``/``sizes[:length]`` in place and returns the
    new live length.
    """
    span = np.empty(1 << r, dtype=np.uint64)
    buf = np.empty(64 << r, dtype=np.uint64)
    keep = 0
    for t in range(length):
        s = masks[t]
        if single_bit(h & s):
            n = covering_coefficients(s, gcols, r, span, buf)
            w = np.int64(sizes[t])
            for q in range(n):
                score[buf[q]] -= w
        else:
            masks[keep] = s
            sizes[keep] = sizes[t]
            keep += 1
    return keep


@njit(cache=True)
def uncovered_coverable(rows, cols, k, total, binom):
    """Number of k-subsets that are stopping sets of ``rows`` yet independent."""
    s = unrank_colex(0, k, binom)
    n = 0
    for _ in range(total):
        if is_stopping(rows, s) and is_independent(cols, s):
            n += 1
        s = next_comb(s)
    return n


@njit(cache=True)
def kappa_chain(p0, jstart, x, c):
    """Steps of ``P <- floor(P * (x - j - c) / (x - j))`` until P = 0.

    ``j`` runs over ``jstart + 1, jstart + 2, ...``; integer arithmetic,
    caller guarantees ``p0 * x`` fits in int64.
    """
    p = p0
    j = 0
    while p > 0:
        j += 1
        jj = jstart + j
        den = x - jj
        num = den - c
        if num <= 0:
            return j
        p = (p * num) // den
    return j


@njit(cache=True)
def kappa_chain_float(p0, jstart, x, c):
    p = np.floor(p0)
    j = 0
    while p > 0.0:
        j += 1
        den = x - (jstart + j)
        num = den - c
        if num <= 0.0:
            return j
        p = np.floor(p * (num / den))
    return j
