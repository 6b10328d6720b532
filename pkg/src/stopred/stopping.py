"""Stopping-set predicates, exhaustive spectra, undecodable-pattern profiles
and the frame error rate."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .gf2 import BinaryMatrix, BinaryVector, column_submatrix, rank, rank_of_masks, row_basis
from .parallel import chunk_count

DEFAULT_BUDGET = 200_000_000
ITERATIVE = "iterative"
ML = "ml"
DECODERS = (ITERATIVE, ML)


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class ColumnSet:
    """Ascending column indices of a subset of ``[n]`` (0-based)."""

    indices: tuple[int, ...]
    n: int

    def __post_init__(self):
        idx = tuple(sorted(int(j) for j in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate column index")
        if idx and (idx[0] < 0 or idx[-1] >= self.n):
            raise IndexError(f"column index outside 0..{self.n - 1}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "ColumnSet":
        mask = int(mask)
        return cls(tuple(j for j in range(n) if mask >> j & 1), n)

    @property
    def mask(self) -> int:
        out = 0
        for j in self.indices:
            out |= 1 << j
        return out

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, j) -> bool:
        return j in self.indices


def _mask(S, n: int) -> int:
    if isinstance(S, ColumnSet):
        if S.n != n:
            raise ValueError("column set belongs to a different length")
        return S.mask
    return ColumnSet(tuple(S), n).mask


@dataclass
class StoppingSpectrum:
    """Counts ``u[0..ell-1]`` for sizes ``1..ell``.

    Estimated spectra (``exact=False``) hold upper confidence limits and
    may carry real values when produced analytically for an ensemble.
    """

    n: int
    counts: list
    coverable_only: bool = True
    exact: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def ell(self) -> int:
        return len(self.counts)

    def __getitem__(self, i: int):
        """Count for size ``i`` (1-based, as sizes are)."""
        if not 1 <= i <= self.ell:
            raise IndexError(f"size {i} outside 1..{self.ell}")
        return self.counts[i - 1]

    def truncated(self, ell: int) -> "StoppingSpectrum":
        if ell > self.ell:
            raise ValueError(f"spectrum only covers sizes up to {self.ell}")
        return StoppingSpectrum(self.n, list(self.counts[:ell]), self.coverable_only, self.exact, dict(self.meta))


@dataclass
class PatternProfile:
    """Undecodable erasure patterns per weight for one decoder.

    ``exact[w]`` is False where ``psi[w]`` is a sampled estimate; then
    ``samples[w] = (failures, N, seed)`` lets error bars be recomputed.
    """

    n: int
    decoder: str
    psi: list
    exact: list
    samples: dict = field(default_factory=dict)
    matrix_rows: int | None = None

    def total(self, w: int) -> int:
        return comb(self.n, w)

    def stderr(self, w: int) -> float:
        if w not in self.samples:
            return 0.0
        fails, N, _ = self.samples[w]
        x = fails / N
        return comb(self.n, w) * (x * (1 - x) / N) ** 0.5


# ----------------------------------------------------------------------
# predicates

def covers(h: BinaryVector | int, S, n: int | None = None) -> bool:
    if isinstance(h, BinaryVector):
        n, bits = h.length, h.bits
    else:
        if n is None:
            raise ValueError("n is needed when h is given as an int")
        bits = int(h)
    x = bits & _mask(S, n)
    return x != 0 and x & (x - 1) == 0


def is_stopping_set(H: BinaryMatrix, S) -> bool:
    """No row of ``H`` meets ``S`` in exactly one position.

    The empty set is never reported as a stopping set.
    """
    s = _mask(S, H.cols)
    if s == 0:
        return False
    for h in H.row_masks():
        x = h & s
        if x and x & (x - 1) == 0:
            return False
    return True


def is_coverable(H: BinaryMatrix, S) -> bool:
    """Columns of ``H_S`` are linearly independent."""
    s = _mask(S, H.cols)
    idx = [j for j in range(H.cols) if s >> j & 1]
    if len(idx) > H.rows:
        return False
    return rank(column_submatrix(H, idx)) == len(idx)


# ----------------------------------------------------------------------
# fast-path preparation

@dataclass(frozen=True)
class _Packed:
    rows: np.ndarray
    cols: np.ndarray
    r: int


def pack(H: BinaryMatrix) -> _Packed:
    """Row masks plus r-bit columns of a reduced basis (needs ``n <= 64``)."""
    if H.cols > 64:
        raise ValueError("single-word fast path needs n <= 64")
    B = row_basis(H)
    cols = np.array(B.column_masks(), dtype=np.uint64) if B.rows else np.zeros(H.cols, np.uint64)
    return _Packed(H.words64(), cols, B.rows)


def _check_budget(work: int, budget: int | None, what: str):
    if budget is not None and work > budget:
        raise BudgetExceededError(f"{what} needs {work} subset tests, budget is {budget}; raise the budget to force it")


def _bounds(total: int) -> np.ndarray:
    return K.chunk_bounds(total, chunk_count())


def _subsets_mask_list(n: int, k: int) -> Iterable[int]:
    from itertools import combinations

    for c in combinations(range(n), k):
        m = 0
        for j in c:
            m |= 1 << j
        yield m


def _generic_stopping(rows: list[int], s: int) -> bool:
    for h in rows:
        x = h & s
        if x and x & (x - 1) == 0:
            return False
    return True


def _generic_independent(cols: list[int], s: int) -> bool:
    return rank_of_masks(cols[j] for j in range(len(cols)) if s >> j & 1) == s.bit_count()


def spectrum_exhaustive(H: BinaryMatrix, ell: int, coverable_only: bool = True,
                        budget: int | None = DEFAULT_BUDGET) -> StoppingSpectrum:
    """Count stopping sets of each size ``1..ell`` by testing every subset.

    Per-chunk counts are summed, so the result does not depend on the
    number of worker threads.
    """
    n = H.cols
    if ell < 1:
        raise ValueError("ell must be at least 1")
    ell = min(ell, n)
    _check_budget(sum(comb(n, i) for i in range(1, ell + 1)), budget, "exhaustive spectrum")
    counts = []
    if n <= 64:
        p = pack(H)
        for i in range(1, ell + 1):
            total = comb(n, i)
            if coverable_only and i > p.r:
                counts.append(0)
                continue
            counts.append(int(K.count_stopping(p.rows, p.cols, i, coverable_only, _bounds(total), K.BINOM)))
    else:
        rows = H.row_masks()
        cols = row_basis(H).column_masks()
        for i in range(1, ell + 1):
            c = 0
            for s in _subsets_mask_list(n, i):
                if _generic_stopping(rows, s) and (not coverable_only or _generic_independent(cols, s)):
                    c += 1
            counts.append(c)
    return StoppingSpectrum(n, counts, coverable_only, True, {"method": "exhaustive"})


# ----------------------------------------------------------------------
# random subsets

def random_subset_masks(rng: np.random.Generator, n: int, w: int, count: int) -> np.ndarray:
    """``count`` uniform ``w``-subsets of ``[n]`` as ``uint64`` masks (Floyd)."""
    if n > 64:
        raise ValueError("masks need n <= 64")
    masks = np.zeros(count, dtype=np.uint64)
    one = np.uint64(1)
    for j in range(n - w, n):
        t = rng.integers(0, j + 1, size=count).astype(np.uint64)
        tb = one << t
        hit = (masks & tb) != 0
        masks |= np.where(hit, one << np.uint64(j), tb)
    return masks


def random_subset_indices(rng: np.random.Generator, n: int, w: int, count: int) -> np.ndarray:
    """``count`` uniform ``w``-subsets of ``[n]`` as a ``(count, w)`` index array."""
    out = np.empty((count, w), dtype=np.int64)
    for col, j in enumerate(range(n - w, n)):
        t = rng.integers(0, j + 1, size=count)
        dup = (out[:, :col] == t[:, None]).any(axis=1) if col else np.zeros(count, bool)
        out[:, col] = np.where(dup, j, t)
    return out


def masks_to_sets(masks: Sequence[int], n: int) -> list[ColumnSet]:
    return [ColumnSet.from_mask(int(m), n) for m in masks]


# ----------------------------------------------------------------------
# profiles

def _decoder_code(decoder: str) -> int:
    if decoder not in DECODERS:
        raise ValueError(f"decoder must be one of {DECODERS}")
    return K.DEC_ML if decoder == ML else K.DEC_ITERATIVE


def undecodable_profile(H: BinaryMatrix, decoder: str = ITERATIVE, w_max: int | None = None,
                        exhaustive_to: int | None = None, samples: int = 0, seed: int = 0,
                        budget: int | None = DEFAULT_BUDGET) -> PatternProfile:
    """Number of weight-``w`` erasure patterns the decoder fails on.

    Weights up to ``exhaustive_to`` (default ``w_max``) are enumerated; the
    rest up to ``w_max`` are estimated from ``samples`` uniform patterns per
    weight (``psi`` then holds ``fraction * C(n, w)``).  Weights above
    ``rank(H)`` are filled in as ``C(n, w)``.  Weights beyond ``w_max``
    are left as ``None``.
    """
    from .codes import make_generator

    n = H.cols
    if n > 64:
        raise ValueError("profiles use the single-word path (n <= 64)")
    code = _decoder_code(decoder)
    p = pack(H)
    w_max = n if w_max is None else min(w_max, n)
    exhaustive_to = w_max if exhaustive_to is None else min(exhaustive_to, w_max)
    work = sum(comb(n, w) for w in range(1, min(exhaustive_to, p.r) + 1))
    _check_budget(work, budget, "exhaustive profile")
    psi: list = [None] * (n + 1)
    exact = [False] * (n + 1)
    info: dict = {}
    psi[0], exact[0] = 0, True
    for w in range(1, w_max + 1):
        if w > p.r:
            psi[w], exact[w] = comb(n, w), True
        elif w <= exhaustive_to:
            psi[w] = int(K.count_failures(p.rows, p.cols, w, code, _bounds(comb(n, w)), K.BINOM))
            exact[w] = True
        elif samples > 0:
            rng = make_generator(seed, w)
            masks = random_subset_masks(rng, n, w, samples)
            fails = int(K.count_failures_masks(p.rows, p.cols, masks, code))
            psi[w] = fails / samples * comb(n, w)
            info[w] = (fails, samples, seed)
    return PatternProfile(n, decoder, psi, exact, info, H.rows)


def fer(profile: PatternProfile | Sequence, p: float, n: int | None = None) -> float:
    """``sum_w psi[w] p^w (1-p)^(n-w)``; unknown entries count as zero."""
    psi = profile.psi if isinstance(profile, PatternProfile) else list(profile)
    n = len(psi) - 1 if n is None else n
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    total = 0.0
    for w, v in enumerate(psi):
        if v:
            total += float(v) * p ** w * (1.0 - p) ** (n - w)
    return total
