"""Upper bounds on stopping redundancy and on the stopping redundancy
hierarchy.

Notation: ``X = 2**R`` where ``R`` is the rank parameter (``r`` or ``m``),
``c_i = i * 2**(R - i)`` and

    pi(R, i, j) = 1 - c_i / (X - j).

The hierarchy bounds need running products ``prod_{j=a+1}^{a+t} pi(R, i, j)``;
every such factor is a ratio of integers, so the specific-code bounds keep
them exact as long as the denominators stay manageable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import mpmath
import numpy as np

from . import _kernels as K
from .counting import count_fullrank_no_weight1
from .stopping import StoppingSpectrum

EXACT_BITS_LIMIT = 200_000
UNIT_SCAN_LIMIT = 1_000_000
PREFIX_SCAN = 10_000
WINDOW = 1_000
CHUNK = 1 << 15


@dataclass
class BoundReport:
    name: str
    value: int | float
    witness: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        v = self.value
        return {
            "name": self.name,
            "value": str(v) if isinstance(v, int) else repr(float(v)),
            "witness": dict(self.witness),
            "params": dict(self.params),
        }


def _counts(u, ell: int | None = None) -> list:
    counts = list(u.counts if isinstance(u, StoppingSpectrum) else u)
    if ell is not None:
        if ell > len(counts):
            raise ValueError(f"spectrum covers sizes up to {len(counts)}, ell={ell} requested")
        counts = counts[:ell]
    if not counts:
        raise ValueError("empty spectrum")
    return counts


def _c(a: int, b: int) -> int:
    if a < 0 or b < 0 or b > a:
        return 0
    return comb(a, b)


# ----------------------------------------------------------------------
# pi

def pi(r: int, i: int, j: int) -> float:
    if r < 1 or i < 1 or j < 1:
        raise ValueError("r, i, j must be positive")
    if j >= 1 << r:
        raise ValueError("j must be below 2**r")
    return 1.0 - (i / 2.0 ** i) / (1.0 - j / (1 << r))


def pi_exact(r: int, i: int, j: int) -> Fraction:
    if r < 1 or i < 1 or j < 1:
        raise ValueError("r, i, j must be positive")
    X = 1 << r
    if j >= X:
        raise ValueError("j must be below 2**r")
    return 1 - Fraction(i, 1 << i) / (1 - Fraction(j, X))


# ----------------------------------------------------------------------
# closed forms

def sv_bound(r: int, d: int) -> int:
    """``sum_{i=1}^{d-2} C(r, i)``."""
    if d < 2:
        raise ValueError("d must be at least 2")
    return sum(comb(r, i) for i in range(1, d - 1))


def _hs_log_excess(n: int, d: int, t: float) -> float:
    terms = [math.log(comb(n, i)) + t * math.log1p(-i / 2.0 ** i) for i in range(1, d)]
    top = max(terms)
    return top + math.log(sum(math.exp(x - top) for x in terms))


def _hs_excess_exact(n: int, d: int, t: int) -> mpmath.mpf:
    with mpmath.workdps(60):
        return mpmath.fsum(comb(n, i) * (1 - mpmath.mpf(i) / 2 ** i) ** t for i in range(1, d))


def hs_bound(n: int, d: int, r: int) -> int:
    """Smallest ``t`` with ``sum_{i<d} C(n,i)(1 - i/2^i)^t < 1``, plus ``r - d + 1``.

    For ``d <= 3`` every parity-check matrix already has stopping distance
    ``d``, so ``r`` is returned.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    if r < d - 1:
        raise ValueError("need r >= d - 1")
    if d <= 3:
        return r
    hi = 1
    while _hs_log_excess(n, d, hi) >= 0:
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _hs_log_excess(n, d, mid) < 0:
            hi = mid
        else:
            lo = mid
    t = hi
    # settle the boundary in high precision
    while t > 0 and _hs_excess_exact(n, d, t - 1) < 1:
        t -= 1
    while _hs_excess_exact(n, d, t) >= 1:
        t += 1
    return t + r - d + 1


# ----------------------------------------------------------------------
# tau-row spectra

def u_single_row(n: int, w: int, ell: int) -> StoppingSpectrum:
    """Subsets of size ``1..ell`` not covered by a single weight-``w`` row."""
    if not 1 <= w <= n:
        raise ValueError("need 1 <= w <= n")
    counts = [comb(n, i) - w * _c(n - w, i - 1) for i in range(1, ell + 1)]
    return StoppingSpectrum(n, counts, coverable_only=False, exact=True, meta={"rows": 1, "w": w})


def u_two_rows(n: int, w: int, delta: int, ell: int) -> StoppingSpectrum:
    """Subsets not covered by either of two weight-``w`` rows overlapping in ``delta``."""
    if not 0 <= delta <= w or 2 * w - delta > n or w < 1:
        raise ValueError("need 0 <= delta <= w and 2w - delta <= n")
    rest = n - 2 * w + delta
    counts = [
        comb(n, i) - 2 * w * _c(n - w, i - 1) + delta * _c(rest, i - 1) + (w - delta) ** 2 * _c(rest, i - 2)
        for i in range(1, ell + 1)
    ]
    return StoppingSpectrum(n, counts, coverable_only=False, exact=True, meta={"rows": 2, "w": w, "delta": delta})


# ----------------------------------------------------------------------
# running products

def _scan_products(u: Sequence, R: int, a: int):
    """Yield ``(t, floor(D_t), exact)`` for ``D_t = sum u_i prod_{j=a+1}^{a+t} pi(R,i,j)``.

    Numerators and the common denominator are big integers until the
    denominator exceeds ``EXACT_BITS_LIMIT`` bits; after that the products
    are carried as float logarithms and ``exact`` turns False.
    """
    X = 1 << R
    cs = [i << (R - i) for i in range(1, len(u) + 1)]
    weights = [Fraction(x) for x in u]
    A = [1] * len(u)
    B = 1
    logs = None
    t = 0
    while True:
        if logs is None:
            num = sum(wt * Aq for wt, Aq in zip(weights, A) if wt and Aq)
            yield t, int(num // B), True
        else:
            D = math.fsum(float(wt) * math.exp(lq) for wt, lq in zip(weights, logs) if wt and lq > -math.inf)
            yield t, int(math.floor(D)), False
        t += 1
        den = X - (a + t)
        if den <= 0:
            raise ValueError("product index ran past 2**R")
        if logs is None:
            B *= den
            for q, c in enumerate(cs):
                if A[q]:
                    A[q] = A[q] * (den - c) if den > c else 0
            if B.bit_length() > EXACT_BITS_LIMIT:
                lb = math.log(B)
                logs = [math.log(Aq) - lb if Aq else -math.inf for Aq in A]
        else:
            for q, c in enumerate(cs):
                if logs[q] > -math.inf:
                    logs[q] = logs[q] + math.log1p(-c / den) if den > c else -math.inf


def _kappa(P0: int, jstart: int, X: int, c: int) -> int:
    """Steps until ``P <- floor(P * pi(R, ell, jstart + j))`` reaches zero."""
    if P0 <= 0:
        return 0
    if X < 1 << 62 and P0 * X < 1 << 62:
        return int(K.kappa_chain(np.int64(P0), np.int64(jstart), np.int64(X), np.int64(c)))
    P, j = P0, 0
    while P > 0:
        j += 1
        den = X - jstart - j
        num = den - c
        if num <= 0:
            return j
        P = P * num // den
    return j


def _log_product(R: int, c: int, a: int, t: float) -> float:
    """``log prod_{j=a+1}^{a+t} (1 - c/(2^R - j))``, any real ``t >= 0``."""
    if t <= 0:
        return 0.0
    X = 1 << R
    if X - a - c - t <= 0 and float(t).is_integer():
        return -math.inf
    if X - a - c - t <= 0:
        return -math.inf
    if (a + t) < 1e-9 * X:
        return t * math.log1p(-c / (X - a - (t + 1) / 2))
    dps = 25 + int(R * 0.30103) + len(str(int(t)))
    with mpmath.workdps(dps):
        Xa = mpmath.mpf(X - a)
        tt = mpmath.mpf(t)
        v = (mpmath.loggamma(Xa - c) - mpmath.loggamma(Xa - c - tt)
             + mpmath.loggamma(Xa - tt) - mpmath.loggamma(Xa))
        return float(v)


def _window(R: int, cs: Sequence[int], a: int, t0: int, lp0: np.ndarray, length: int) -> np.ndarray:
    """Log products for ``t = t0 .. t0+length-1`` given their values at ``t0``."""
    X = 1 << R
    j = a + np.arange(t0 + 1, t0 + length, dtype=np.float64)
    Xf = float(X)
    out = np.empty((len(cs), length))
    for q, c in enumerate(cs):
        den = Xf - j
        with np.errstate(divide="ignore", invalid="ignore"):
            steps = np.where(den > c, np.log1p(-np.minimum(c / den, 1.0)), -np.inf)
        out[q, 0] = lp0[q]
        if length > 1:
            out[q, 1:] = lp0[q] + np.cumsum(steps)
    return out


def _objective_real(u: np.ndarray, lp: np.ndarray, t: np.ndarray) -> np.ndarray:
    with np.errstate(under="ignore"):
        return t + (u[:, None] * np.exp(lp)).sum(axis=0)


def _minimize_real(u: Sequence[float], R: int, a: int) -> tuple[float, int, dict]:
    """``min_t t + sum u_i prod_{j=a+1}^{a+t} pi(R,i,j)`` over integers ``t >= 0``.

    Unit steps first (exact stopping rule: the objective is at least ``t``);
    beyond ``UNIT_SCAN_LIMIT`` a log-gamma evaluation, a geometric grid,
    golden-section search and a unit-step window around the continuous
    optimum take over.
    """
    u = np.asarray([float(x) for x in u])
    cs = [i << (R - i) for i in range(1, len(u) + 1)]
    best, tbest = math.inf, 0
    lp = np.zeros(len(u))
    t0 = 0
    limit = max(UNIT_SCAN_LIMIT, PREFIX_SCAN)
    while t0 < best and t0 < limit:
        W = _window(R, cs, a, t0, lp, CHUNK + 1)
        ts = np.arange(t0, t0 + CHUNK + 1, dtype=np.float64)
        F = _objective_real(u, W, ts)
        k = int(np.argmin(F))
        if F[k] < best:
            best, tbest = float(F[k]), t0 + k
        lp = W[:, -1]
        t0 += CHUNK
    info = {"method": "scan", "scanned_to": t0}
    if t0 >= best:
        return best, tbest, info

    def f(t: float) -> float:
        lps = np.array([_log_product(R, c, a, t) for c in cs])
        with np.errstate(under="ignore"):
            return t + float((u * np.exp(lps)).sum())

    lo, hi = float(t0), float(best)
    grid = np.unique(np.geomspace(lo, hi, 240))
    vals = [f(t) for t in grid]
    k = int(np.argmin(vals))
    gl, gh = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    phi = (math.sqrt(5) - 1) / 2
    x1, x2 = gh - phi * (gh - gl), gl + phi * (gh - gl)
    f1, f2 = f(x1), f(x2)
    while gh - gl > 1.0:
        if f1 < f2:
            gh, x2, f2 = x2, x1, f1
            x1 = gh - phi * (gh - gl)
            f1 = f(x1)
        else:
            gl, x1, f1 = x1, x2, f2
            x2 = gl + phi * (gh - gl)
            f2 = f(x2)
    tc = int(round((gl + gh) / 2))
    start = max(int(lo), tc - WINDOW)
    length = min(int(hi), tc + WINDOW) - start + 1
    lp0 = np.array([_log_product(R, c, a, start) for c in cs])
    W = _window(R, cs, a, start, lp0, max(length, 1))
    F = _objective_real(u, W, np.arange(start, start + W.shape[1], dtype=np.float64))
    k = int(np.argmin(F))
    if F[k] < best:
        best, tbest = float(F[k]), start + k
    info.update(method="fast", grid_points=len(grid), window=(start, start + W.shape[1] - 1))
    return best, tbest, info


# ----------------------------------------------------------------------
# hierarchy bounds

def hierarchy_bound_xi1(u, rank_param: int, tau: int, rank_tau: int, ell: int,
                        method: str = "auto") -> BoundReport:
    """Bound on the ``ell``-th stopping redundancy from ``tau`` seed rows.

    ``u`` counts the stopping sets (of the seed matrix) of sizes
    ``1..ell`` that remain to be covered.  ``method`` is ``exact`` (integer
    products and floors), ``approximate`` (continuous products without the
    inner floors; never below the exact value) or ``auto``.
    """
    counts = _counts(u, ell)
    R = rank_param
    if tau < 1:
        raise ValueError("tau must be at least 1")
    if not 1 <= ell <= R:
        raise ValueError("need 1 <= ell <= rank_param")
    if method == "auto":
        method = "exact" if R <= 62 else "approximate"
    X = 1 << R
    c_ell = ell << (R - ell)
    delta = max(0, R - max(rank_tau, ell))
    params = {"rank_param": R, "tau": tau, "rank_tau": rank_tau, "ell": ell}
    if method == "exact":
        best = None
        exact = True
        for t, P0, ok in _scan_products(counts, R, tau):
            if best is not None and t >= best:
                break
            exact &= ok
            kap = _kappa(P0, tau + t, X, c_ell)
            if best is None or t + kap < best:
                best, t_star, k_star = t + kap, t, kap
        witness = {"tau": tau, "t_star": t_star, "kappa_at_t_star": k_star, "delta": delta,
                   "method": "exact" if exact else "float"}
        return BoundReport("xi1", tau + best + delta, witness, params)
    if method != "approximate":
        raise ValueError(f"unknown method {method!r}")
    best, t_star, k_star = _xi1_approximate(counts, R, tau, ell)
    witness = {"tau": tau, "t_star": t_star, "kappa_at_t_star": k_star, "delta": delta, "method": "approximate"}
    return BoundReport("xi1", tau + best + delta, witness, params)


def _kappa_approx(logP: float, ell: int, tail: int = 4096) -> int:
    """Floor-chain length for ``2**R`` far above every index in play.

    There ``pi(R, ell, j)`` sits just above ``1 - q`` with ``q = ell/2**ell``
    and one floor step maps ``P`` to ``P - floor(P q) - 1``.  While
    ``P q > tail`` the drift ``dP = -(q P + 1/2)`` is integrated in closed
    form; the rest runs exactly, grouped by the value of ``floor(P q)``.
    """
    if logP < 0:
        return 0
    q = ell / 2.0 ** ell
    rate = -math.log1p(-q)
    steps = 0
    if logP > math.log(tail / q):
        off = 0.5 / q
        target = tail / q
        log_start = logP + math.log1p(off * math.exp(-logP))
        steps = max(0, math.ceil((log_start - math.log(target + off)) / rate))
        P = int(math.exp(log_start - steps * rate) - off)
    else:
        P = int(math.floor(math.exp(logP)))
    while P > 0:
        k = (P * ell) >> ell
        if k == 0:
            steps += P
            break
        lo = -(-(k << ell) // ell)
        s = (P - lo) // (k + 1) + 1
        steps += s
        P -= s * (k + 1)
    return steps


def _xi1_approximate(counts: Sequence, R: int, tau: int, ell: int) -> tuple[int, int, int]:
    cs = [i << (R - i) for i in range(1, len(counts) + 1)]
    logu = [math.log(x) if x > 0 else -math.inf for x in counts]

    def kappa(t: int) -> int:
        terms = [lu + _log_product(R, c, tau, t) for lu, c in zip(logu, cs) if lu > -math.inf]
        terms = [x for x in terms if x > -math.inf]
        if not terms:
            return 0
        top = max(terms)
        logD = top + math.log(sum(math.exp(x - top) for x in terms))
        return _kappa_approx(logD, ell)

    best, t_star, k_star = None, 0, 0

    def consider(t: int):
        nonlocal best, t_star, k_star
        k = kappa(t)
        if best is None or t + k < best:
            best, t_star, k_star = t + k, t, k
        return t + k

    t = 0
    while t < PREFIX_SCAN and (best is None or t < best):
        consider(t)
        t += 1
    if best is not None and t >= best:
        return best, t_star, k_star
    grid = np.unique(np.geomspace(t, best, 240).astype(np.int64))
    vals = [consider(int(g)) for g in grid]
    k = int(np.argmin(vals))
    gl, gh = int(grid[max(k - 1, 0)]), int(grid[min(k + 1, len(grid) - 1)])
    while gh - gl > 2 * WINDOW:
        m1 = gl + (gh - gl) // 3
        m2 = gh - (gh - gl) // 3
        if consider(m1) <= consider(m2):
            gh = m2
        else:
            gl = m1
    for t in range(max(0, (gl + gh) // 2 - WINDOW), (gl + gh) // 2 + WINDOW + 1):
        consider(t)
    return best, t_star, k_star


def xi2_bound(u, m: int, ell: int) -> BoundReport:
    """``m + min_t (t + sum_i u_i prod_{j=m+1}^{m+t} pi(m,i,j))``, as an integer.

    ``t`` is an integer, so the floor of the minimum equals
    ``m + min_t (t + floor(D_t))``, which is what gets computed.
    """
    counts = _counts(u, ell)
    if not 1 <= ell <= m:
        raise ValueError("need 1 <= ell <= m")
    best = None
    exact = True
    for t, P0, ok in _scan_products(counts, m, m):
        if best is not None and t >= best:
            break
        exact &= ok
        if best is None or t + P0 < best:
            best, t_star, d_star = t + P0, t, P0
    witness = {"t_star": t_star, "floor_sum_at_t_star": d_star, "method": "exact" if exact else "float"}
    return BoundReport("xi2", m + best, witness, {"m": m, "ell": ell})


def ensemble_bound(u_bar, m: int, ell: int) -> BoundReport:
    """Real-valued version of :func:`xi2_bound` for ensemble-average spectra."""
    counts = _counts(u_bar, ell)
    if not 1 <= ell <= m:
        raise ValueError("need 1 <= ell <= m")
    best, t_star, info = _minimize_real(counts, m, m)
    witness = {"t_star": t_star, **info}
    return BoundReport("ensemble_xi2", m + best, witness, {"m": m, "ell": ell})


def sre_mean_fractions(n: int, m: int, ell: int) -> list[Fraction]:
    if not 1 <= ell <= m:
        raise ValueError("need 1 <= ell <= m")
    return [Fraction(comb(n, i) * count_fullrank_no_weight1(m, i), 1 << (m * i)) for i in range(1, ell + 1)]


def sre_mean_spectrum(n: int, m: int, ell: int) -> StoppingSpectrum:
    """Expected coverable stopping-set counts over ``m x n`` fair-coin matrices."""
    fr = sre_mean_fractions(n, m, ell)
    return StoppingSpectrum(n, [float(x) for x in fr], coverable_only=True, exact=False,
                            meta={"ensemble": "sre", "m": m, "analytic": True})


# ----------------------------------------------------------------------
# optimal first-row weight

@dataclass(frozen=True)
class WeightCandidates:
    candidates: tuple[int, int]
    values: tuple[int, int]


def f_weight(n: int, ell: int, w: int) -> int:
    return w * sum(_c(n - w, i) for i in range(ell))


def w_opt_candidates(n: int, ell: int) -> WeightCandidates:
    if not 2 <= ell <= n:
        raise ValueError("need 2 <= ell <= n")
    a, b = (n + 1) // ell, -(-n // ell)
    return WeightCandidates((a, b), (f_weight(n, ell, a), f_weight(n, ell, b)))
