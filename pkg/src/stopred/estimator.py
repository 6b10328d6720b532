"""Monte Carlo estimates of coverable stopping-set counts with a
second-order corrected one-sided upper confidence limit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
from numba import njit, prange

from . import _kernels as K
from .codes import EnsembleSpec, LinearCode, make_generator
from .stopping import StoppingSpectrum, pack, random_subset_indices, random_subset_masks

TRIAL_BLOCK = 100_000

# Acklam's rational approximation of the normal quantile
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def inverse_normal_cdf(q: float) -> float:
    """``Phi^{-1}(q)``: rational approximation plus one Halley step."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly between 0 and 1")
    if q < _P_LOW:
        s = math.sqrt(-2.0 * math.log(q))
        x = (((((_C[0] * s + _C[1]) * s + _C[2]) * s + _C[3]) * s + _C[4]) * s + _C[5]) / \
            ((((_D[0] * s + _D[1]) * s + _D[2]) * s + _D[3]) * s + 1.0)
    elif q > 1.0 - _P_LOW:
        s = math.sqrt(-2.0 * math.log1p(-q))
        x = -(((((_C[0] * s + _C[1]) * s + _C[2]) * s + _C[3]) * s + _C[4]) * s + _C[5]) / \
            ((((_D[0] * s + _D[1]) * s + _D[2]) * s + _D[3]) * s + 1.0)
    else:
        s = q - 0.5
        r = s * s
        x = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * s / \
            (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
    # upper tail: work with the complement to keep relative accuracy
    if q > 0.5:
        e = 0.5 * math.erfc(x / math.sqrt(2.0)) - (1.0 - q)
        e = -e
    else:
        e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - q
    u = e * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


def confidence_fraction(x_bar: float, N: int, epsilon: float) -> float:
    """Upper confidence limit for a binomial proportion (as a fraction)."""
    if not 0.0 <= x_bar <= 1.0:
        raise ValueError("x_bar must lie in [0, 1]")
    if N < 1:
        raise ValueError("N must be positive")
    kappa = inverse_normal_cdf(1.0 - epsilon)
    k2 = kappa * kappa
    eta = k2 / 3.0 + 1.0 / 6.0
    x_t = (N * x_bar + eta) / (N + 2.0 * eta)
    g1 = -13.0 / 18.0 * k2 - 17.0 / 18.0
    g2 = k2 / 18.0 + 7.0 / 36.0
    V = x_bar * (1.0 - x_bar)
    var = V / N + (g1 * V + g2) / (N * N)
    return x_t + kappa * math.sqrt(max(var, 0.0))


def upper_confidence_count(x_bar: float, N: int, epsilon: float, total: int) -> int:
    """``floor(total * upper limit)``, capped at ``total``."""
    frac = confidence_fraction(x_bar, N, epsilon)
    if frac <= 0:
        return 0
    return min(int(total), math.floor(Fraction(frac) * int(total)))


def epsilon_for_confidence(confidence: float, ell: int) -> float:
    """Per-size ``epsilon`` so that ``ell`` independent limits hold jointly."""
    return 1.0 - confidence ** (1.0 / ell)


@dataclass
class EstimationResult:
    n: int
    ell: int
    N: list
    successes: list
    epsilon: list
    totals: list
    u_hat: list
    seed: int
    source: str = "code"
    meta: dict = field(default_factory=dict)

    @property
    def x_bar(self) -> list[float]:
        return [s / N for s, N in zip(self.successes, self.N)]

    @property
    def kappa(self) -> list[float]:
        return [inverse_normal_cdf(1.0 - e) for e in self.epsilon]

    @property
    def confidence(self) -> float:
        return math.prod(1.0 - e for e in self.epsilon)

    def spectrum(self) -> StoppingSpectrum:
        return StoppingSpectrum(self.n, list(self.u_hat), coverable_only=True, exact=False,
                                meta={"seed": self.seed, "source": self.source})


def _per_size(value, ell: int, name: str) -> list:
    if isinstance(value, (int, float)):
        return [value] * ell
    value = list(value)
    if len(value) != ell:
        raise ValueError(f"{name} needs one entry per size 1..{ell}")
    return value


def _finish(n, ell, Ns, succ, eps, seed, source, meta=None) -> EstimationResult:
    totals = [comb(n, i) for i in range(1, ell + 1)]
    u_hat = [upper_confidence_count(s / N, N, e, tot) for s, N, e, tot in zip(succ, Ns, eps, totals)]
    return EstimationResult(n, ell, Ns, succ, eps, totals, u_hat, seed, source, meta or {})


def _count_code_trials(code: LinearCode, i: int, N: int, rng: np.random.Generator, dense=None) -> int:
    n = code.n
    hits = 0
    if n <= 64:
        p = pack(code.H)
        done = 0
        while done < N:
            b = min(TRIAL_BLOCK, N - done)
            masks = random_subset_masks(rng, n, i, b)
            hits += int(K.coverable_stopping_flags(p.rows, p.cols, masks).sum(dtype=np.int64))
            done += b
        return hits
    done = 0
    while done < N:
        b = min(TRIAL_BLOCK, N - done)
        subsets = random_subset_indices(rng, n, i, b)
        restricted = K.restrict_rows(dense, subsets)
        hits += int(K.restricted_coverable_stopping(restricted, i).sum(dtype=np.int64))
        done += b
    return hits


def estimate_spectrum(code: LinearCode, ell: int, N, epsilon, seed: int) -> EstimationResult:
    """Sample ``N_i`` uniform ``i``-subsets per size and count the coverable
    stopping sets among them.  Size ``i`` draws from stream ``(seed, i)``."""
    if not 1 <= ell <= code.r:
        raise ValueError(f"need 1 <= ell <= r = {code.r}")
    if ell > 64:
        raise ValueError("sizes above 64 are not supported")
    Ns = [int(x) for x in _per_size(N, ell, "N")]
    eps = [float(x) for x in _per_size(epsilon, ell, "epsilon")]
    if min(Ns) < 1:
        raise ValueError("sample sizes must be positive")
    dense = code.H.to_dense() if code.n > 64 else None
    succ = [_count_code_trials(code, i, Ns[i - 1], make_generator(seed, i), dense) for i in range(1, ell + 1)]
    return _finish(code.n, ell, Ns, succ, eps, seed, "code")


@njit(cache=True, parallel=True)
def _gallager_restricted(samples, K_, M):
    """``samples[k, t, b]`` is the column of strip ``k`` hit by bit ``b``."""
    J, N, i = samples.shape
    out = np.zeros((N, J * M), dtype=np.uint64)
    for t in prange(N):
        for k in range(J):
            for b in range(i):
                row = k * M + samples[k, t, b] // K_
                out[t, row] |= np.uint64(1) << np.uint64(b)
    return out


def _ensemble_block(ens: EnsembleSpec, i: int, b: int, rng: np.random.Generator) -> np.ndarray:
    """Rows of ``H_S`` for ``b`` independent pairs ``(H, S)``, packed as ints."""
    if ens.variant == "sre":
        # H_S of an i.i.d. matrix is an i.i.d. m x i block whatever S is
        return rng.integers(0, 1 << i, size=(b, ens.m), dtype=np.uint64)
    # strip 1 sees S itself; strip k >= 2 sees perm_k(S), a uniform ordered
    # sample of distinct columns independent of S
    samples = np.empty((ens.J, b, i), dtype=np.int64)
    for k in range(ens.J):
        sub = random_subset_indices(rng, ens.n, i, b)
        samples[k] = rng.permuted(sub, axis=1) if k else sub
    return _gallager_restricted(samples, ens.K, ens.M)


def estimate_ensemble_spectrum(ens: EnsembleSpec, ell: int, N, epsilon, seed: int) -> EstimationResult:
    """As :func:`estimate_spectrum` but every trial draws a fresh matrix."""
    if not 1 <= ell <= min(ens.m, 64):
        raise ValueError("need 1 <= ell <= min(m, 64)")
    Ns = [int(x) for x in _per_size(N, ell, "N")]
    eps = [float(x) for x in _per_size(epsilon, ell, "epsilon")]
    succ = []
    for i in range(1, ell + 1):
        rng = make_generator(seed, i)
        hits, done = 0, 0
        while done < Ns[i - 1]:
            b = min(TRIAL_BLOCK, Ns[i - 1] - done)
            restricted = _ensemble_block(ens, i, b, rng)
            hits += int(K.restricted_coverable_stopping(restricted, i).sum(dtype=np.int64))
            done += b
        succ.append(hits)
    return _finish(ens.n, ell, Ns, succ, eps, seed, ens.variant, {"m": ens.m, "J": ens.J, "K": ens.K})
