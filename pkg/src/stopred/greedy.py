"""Randomized greedy construction of redundant parity-check matrices that
cover every coverable stopping set up to a given size.

Candidate rows are the nonzero dual codewords, indexed by their coefficient
vector ``alpha`` over a reduced basis ``G`` of the row space.  Instead of
testing all ``2**r - 1`` candidates against each set ``S``, the codewords
covering ``S`` are enumerated directly: they solve ``<alpha, g_j> = [j = s]``
for ``j`` in ``S`` and some ``s`` in ``S``, which for independent columns
gives ``|S| * 2**(r - |S|)`` solutions.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import _kernels as K
from .codes import LinearCode, make_generator
from .gf2 import DEFAULT_ROW_SPACE_LIMIT, BinaryMatrix, RowSpaceTooLargeError, rank_of_masks, row_basis, row_space_array
from .stopping import DEFAULT_BUDGET, _check_budget, masks_to_sets, pack


@dataclass
class CoverableList:
    n: int
    ell: int
    masks: np.ndarray
    sizes: np.ndarray

    def __len__(self) -> int:
        return int(self.masks.shape[0])

    def sets(self):
        return masks_to_sets(self.masks, self.n)


def coverable_list(code: LinearCode, ell: int, budget: int | None = DEFAULT_BUDGET) -> CoverableList:
    """All nonempty ``S`` with ``|S| <= ell`` whose columns are independent."""
    n = code.n
    if n > 64:
        raise ValueError("greedy covering uses the single-word path (n <= 64)")
    if ell < 1:
        raise ValueError("ell must be positive")
    p = pack(code.H)
    top = min(ell, p.r)
    _check_budget(sum(comb(n, i) for i in range(1, top + 1)), budget, "coverable list")
    masks, sizes = [], []
    for i in range(1, top + 1):
        total = comb(n, i)
        cnt = int(K.count_independent(p.cols, i, total, K.BINOM))
        buf = np.empty(cnt, dtype=np.uint64)
        K.fill_independent(p.cols, i, total, K.BINOM, buf)
        masks.append(buf)
        sizes.append(np.full(cnt, i, dtype=np.uint8))
    if not masks:
        return CoverableList(n, ell, np.zeros(0, np.uint64), np.zeros(0, np.uint8))
    return CoverableList(n, ell, np.concatenate(masks), np.concatenate(sizes))


@dataclass
class GreedyRun:
    restart: int
    rows: list
    score_trace: list
    remaining_trace: list
    completion_rows: int
    final_rank: int


@dataclass
class GreedyResult:
    matrix: BinaryMatrix
    row_count: int
    ell: int
    seed: int
    best_restart: int
    runs: list = field(default_factory=list)

    def log(self) -> dict:
        return {
            "ell": self.ell,
            "seed": self.seed,
            "row_count": self.row_count,
            "best_restart": self.best_restart,
            "restart_row_counts": [len(r.rows) for r in self.runs],
            "runs": [
                {
                    "restart": r.restart,
                    "rows": [format(h, f"0{self.matrix.cols}b")[::-1] for h in r.rows],
                    "score_trace": r.score_trace,
                    "remaining_trace": r.remaining_trace,
                    "completion_rows": r.completion_rows,
                    "final_rank": r.final_rank,
                }
                for r in self.runs
            ],
        }


def _complete_rank(rows: list[int], basis: list[int]) -> list[int]:
    added = []
    current = rank_of_masks(rows)
    for b in basis:
        if rank_of_masks(rows + added + [b]) > current:
            added.append(b)
            current += 1
    return added


def greedy_extend(code: LinearCode, ell: int, seed: int, restarts: int = 10,
                  row_space_limit: int = DEFAULT_ROW_SPACE_LIMIT, budget: int | None = DEFAULT_BUDGET,
                  progress: bool = False, cover: CoverableList | None = None) -> GreedyResult:
    """Best of ``restarts`` randomized greedy runs (fewest rows wins).

    Each step picks a dual codeword of maximal ``sum_{S in L} |S| [h covers S]``,
    ties broken uniformly at random from stream ``(seed, restart)``, then
    drops the sets it covers.  Once ``L`` is empty, basis rows are appended
    until the matrix has rank ``r``.
    """
    if restarts < 1:
        raise ValueError("restarts must be positive")
    B = row_basis(code.H)
    r = B.rows
    if r > row_space_limit:
        raise RowSpaceTooLargeError(f"row space dimension {r} exceeds limit {row_space_limit}")
    if code.n > 64:
        raise ValueError("greedy covering uses the single-word path (n <= 64)")
    words = row_space_array(code.H, row_space_limit)
    gcols = np.array(B.column_masks(), dtype=np.uint64)
    basis = B.row_masks()
    L = cover if cover is not None else coverable_list(code, ell, budget)
    base_score = np.zeros(1 << r, dtype=np.int64)
    K.accumulate_scores(L.masks, L.sizes, gcols, r, base_score, 1)

    best = None
    runs = []
    for rs in range(restarts):
        rng = make_generator(seed, rs)
        masks = L.masks.copy()
        sizes = L.sizes.copy()
        score = base_score.copy()
        live = len(L)
        rows, strace, ltrace = [], [], []
        while live:
            top = score[1:].max()
            if top <= 0:
                raise RuntimeError("uncoverable set left in the list")
            cand = np.flatnonzero(score[1:] == top) + 1
            alpha = int(cand[rng.integers(len(cand))]) if len(cand) > 1 else int(cand[0])
            h = words[alpha]
            live = int(K.remove_covered(h, masks, sizes, live, gcols, r, score))
            rows.append(int(h))
            strace.append(int(top))
            ltrace.append(live)
        extra = _complete_rank(rows, basis)
        rows += extra
        run = GreedyRun(rs, rows, strace, ltrace, len(extra), rank_of_masks(rows))
        runs.append(run)
        if progress:
            print(f"restart {rs}: {len(rows)} rows", file=sys.stderr)
        if best is None or len(rows) < len(best.rows):
            best = run
    M = BinaryMatrix.from_row_masks(best.rows, code.n)
    return GreedyResult(M, len(best.rows), ell, seed, best.restart, runs)


def audit_cover(H: BinaryMatrix, ell: int) -> int:
    """Number of coverable stopping sets of size ``<= ell`` left in ``H``."""
    from .stopping import spectrum_exhaustive

    return sum(spectrum_exhaustive(H, ell, coverable_only=True, budget=None).counts)
