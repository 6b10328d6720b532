"""Peeling and ML erasure decoders and their head-to-head comparison."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .gf2 import BinaryMatrix, column_submatrix, rank, solve_erasure_system
from .stopping import ITERATIVE, ML, ColumnSet, _bounds, pack, random_subset_masks


@dataclass(frozen=True)
class DecodeOutcome:
    success: bool
    residual: ColumnSet
    method: str
    codeword: np.ndarray | None = None


def _as_set(E, n: int) -> ColumnSet:
    return E if isinstance(E, ColumnSet) else ColumnSet(tuple(E), n)


def peel(H: BinaryMatrix, E, received: Sequence | None = None,
         row_order: Sequence[int] | None = None) -> DecodeOutcome:
    """Iterative erasure decoding.

    Each check keeps the number of erased positions it touches and the XOR
    of their indices; a check with count one names its erased position
    directly.  With ``received`` the recovered values are filled in too
    (erased entries may be anything, e.g. ``None``).
    """
    E = _as_set(E, H.cols)
    dense = H.to_dense()
    erased = np.zeros(H.cols, dtype=bool)
    erased[list(E.indices)] = True
    word = None
    if received is not None:
        word = np.array([0 if erased[j] else int(received[j]) for j in range(H.cols)], dtype=np.uint8)
    order = list(range(H.rows)) if row_order is None else list(row_order)
    sub = dense[:, erased]
    count = sub.sum(axis=1).astype(np.int64)
    idx = np.flatnonzero(erased)
    xsum = np.zeros(H.rows, dtype=np.int64)
    for col, j in enumerate(idx):
        xsum[sub[:, col] == 1] ^= j
    col_rows = [np.flatnonzero(dense[:, j]) for j in range(H.cols)]
    queue = deque(i for i in order if count[i] == 1)
    while queue:
        i = queue.popleft()
        if count[i] != 1:
            continue
        j = int(xsum[i])
        if word is not None:
            word[j] = int(np.bitwise_xor.reduce(word[dense[i] == 1])) ^ word[j]
        erased[j] = False
        for q in col_rows[j]:
            count[q] -= 1
            xsum[q] ^= j
            if count[q] == 1:
                queue.append(q)
    residual = ColumnSet(tuple(np.flatnonzero(erased).tolist()), H.cols)
    success = len(residual) == 0
    return DecodeOutcome(success, residual, ITERATIVE, word if success else None)


def ml_decode(H: BinaryMatrix, E, received: Sequence | None = None) -> DecodeOutcome:
    """ML erasure decoding: succeeds iff the columns of ``H_E`` are independent.

    Without ``received`` only the rank test runs (the all-zero word is
    assumed); with it the erased values are solved for.
    """
    E = _as_set(E, H.cols)
    if received is not None:
        sol = solve_erasure_system(H, E.indices, received)
        residual = ColumnSet((), H.cols) if sol.unique else E
        return DecodeOutcome(sol.unique, residual, ML, sol.codeword)
    ok = len(E) <= H.rows and rank(column_submatrix(H, E.indices)) == len(E)
    return DecodeOutcome(ok, ColumnSet((), H.cols) if ok else E, ML)


@dataclass
class ComparisonRow:
    weight: int
    total: int
    tested: int
    exhaustive: bool
    iterative_fail: int
    ml_fail: int
    disagreements: int
    seed: int | None = None


@dataclass
class DecoderComparison:
    n: int
    matrix_rows: int
    rows: list = field(default_factory=list)

    @property
    def disagreements(self) -> int:
        return sum(r.disagreements for r in self.rows)


def compare_decoders(H: BinaryMatrix, weights: Iterable[int], exhaustive_to: int = 8,
                     samples: int = 10**6, seed: int = 0) -> DecoderComparison:
    """Per weight, count patterns where peeling and ML disagree.

    Weights up to ``exhaustive_to`` are enumerated; heavier weights use
    ``samples`` uniform patterns drawn from the ``(seed, w)`` stream.
    """
    from .codes import make_generator

    n = H.cols
    p = pack(H)
    out = DecoderComparison(n, H.rows)
    for w in weights:
        total = comb(n, w)
        if w == 0:
            out.rows.append(ComparisonRow(0, 1, 1, True, 0, 0, 0))
        elif w > p.r:
            out.rows.append(ComparisonRow(w, total, total, True, total, total, 0))
        elif w <= exhaustive_to:
            it, ml, dis = K.compare_exhaustive(p.rows, p.cols, w, _bounds(total), K.BINOM)
            out.rows.append(ComparisonRow(w, total, total, True, int(it), int(ml), int(dis)))
        else:
            masks = random_subset_masks(make_generator(seed, w), n, w, samples)
            it, ml, dis = K.compare_masks(p.rows, p.cols, masks)
            out.rows.append(ComparisonRow(w, total, samples, False, int(it), int(ml), int(dis), seed))
    return out
