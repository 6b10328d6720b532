"""Bit-packed linear algebra over GF(2).

Matrices are stored row-major with one ``uint64`` word per 64 columns;
column ``j`` lives in word ``j // 64`` at bit ``j % 64``.  Column indices
are 0-based throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

WORD = 64
DEFAULT_ROW_SPACE_LIMIT = 30


class InconsistentSystemError(ValueError):
    """The fixed coordinates of a received word satisfy no codeword."""


class RowSpaceTooLargeError(ValueError):
    pass


def _words(cols: int) -> int:
    return max(1, (cols + WORD - 1) // WORD)


def popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class BinaryVector:
    """A length-``length`` binary vector packed into a Python int."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits outside the vector length")

    @classmethod
    def from_array(cls, values: Iterable[int]) -> "BinaryVector":
        values = list(values)
        bits = 0
        for j, v in enumerate(values):
            if v not in (0, 1):
                raise ValueError(f"non-binary entry {v!r}")
            if v:
                bits |= 1 << j
        return cls(len(values), bits)

    @property
    def weight(self) -> int:
        return popcount(self.bits)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.length) if self.bits >> j & 1)

    def to_array(self) -> np.ndarray:
        return np.array([self.bits >> j & 1 for j in range(self.length)], dtype=np.uint8)

    def __xor__(self, other: "BinaryVector") -> "BinaryVector":
        if other.length != self.length:
            raise ValueError("length mismatch")
        return BinaryVector(self.length, self.bits ^ other.bits)

    def __str__(self) -> str:
        return "".join("1" if self.bits >> j & 1 else "0" for j in range(self.length))


class BinaryMatrix:
    """Dense GF(2) matrix with packed rows.

    Instances are treated as immutable: every operation returns a fresh
    matrix and never writes into ``data``.
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension")
        nw = _words(cols)
        if data is None:
            data = np.zeros((rows, nw), dtype=np.uint64)
        else:
            data = np.ascontiguousarray(data, dtype=np.uint64).reshape(rows, nw)
            tail = cols % WORD
            if tail and rows and np.any(data[:, -1] >> np.uint64(tail)):
                raise ValueError("padding bits must be zero")
            if cols == 0 and rows and np.any(data):
                raise ValueError("padding bits must be zero")
        data.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self.data = data

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinaryMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, size: int) -> "BinaryMatrix":
        return cls.from_row_masks([1 << j for j in range(size)], size)

    @classmethod
    def from_dense(cls, array) -> "BinaryMatrix":
        a = np.asarray(array)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        if a.size and not np.isin(a, (0, 1)).all():
            raise ValueError("matrix entries must be 0 or 1")
        rows, cols = a.shape
        nw = _words(cols)
        padded = np.zeros((rows, nw * WORD), dtype=np.uint8)
        padded[:, :cols] = a
        # little-endian bit order inside each byte, bytes little-endian in words
        packed = np.packbits(padded, axis=1, bitorder="little")
        data = packed.view("<u8").astype(np.uint64).reshape(rows, nw)
        return cls(rows, cols, data)

    @classmethod
    def from_row_masks(cls, masks: Sequence[int], cols: int) -> "BinaryMatrix":
        nw = _words(cols)
        data = np.zeros((len(masks), nw), dtype=np.uint64)
        limit = 1 << cols
        for i, mask in enumerate(masks):
            mask = int(mask)
            if mask < 0 or mask >= limit:
                raise ValueError("row mask exceeds column count")
            for w in range(nw):
                data[i, w] = (mask >> (WORD * w)) & 0xFFFFFFFFFFFFFFFF
        return cls(len(masks), cols, data)

    @classmethod
    def from_vectors(cls, vectors: Sequence[BinaryVector], cols: int | None = None) -> "BinaryMatrix":
        if cols is None:
            if not vectors:
                raise ValueError("column count needed for an empty vector list")
            cols = vectors[0].length
        if any(v.length != cols for v in vectors):
            raise ValueError("vector length mismatch")
        return cls.from_row_masks([v.bits for v in vectors], cols)

    # views -------------------------------------------------------------
    def to_dense(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        raw = self.data.astype("<u8").view(np.uint8).reshape(self.rows, -1)
        bits = np.unpackbits(raw, axis=1, bitorder="little")
        return bits[:, : self.cols].copy()

    def row_mask(self, i: int) -> int:
        out = 0
        for w, word in enumerate(self.data[i]):
            out |= int(word) << (WORD * w)
        return out

    def row_masks(self) -> list[int]:
        return [self.row_mask(i) for i in range(self.rows)]

    def row(self, i: int) -> BinaryVector:
        return BinaryVector(self.cols, self.row_mask(i))

    def column_masks(self) -> list[int]:
        """Column ``j`` as an int whose bit ``i`` is entry ``(i, j)``."""
        dense = self.to_dense()
        weights = [1 << i for i in range(self.rows)]
        return [sum(w for w, b in zip(weights, dense[:, j]) if b) for j in range(self.cols)]

    def words64(self) -> np.ndarray:
        """Rows as a 1-D ``uint64`` array; only valid when ``cols <= 64``."""
        if self.cols > WORD:
            raise ValueError("single-word fast path needs cols <= 64")
        return np.ascontiguousarray(self.data[:, 0]) if self.rows else np.zeros(0, np.uint64)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def transpose(self) -> "BinaryMatrix":
        return BinaryMatrix.from_dense(self.to_dense().T)

    def vstack(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if other.cols != self.cols:
            raise ValueError("column count mismatch")
        return BinaryMatrix(self.rows + other.rows, self.cols, np.vstack([self.data, other.data]))

    def append_rows(self, masks: Sequence[int]) -> "BinaryMatrix":
        return self.vstack(BinaryMatrix.from_row_masks(list(masks), self.cols))

    def select_rows(self, idx: Sequence[int]) -> "BinaryMatrix":
        return BinaryMatrix(len(idx), self.cols, self.data[list(idx)])

    def row_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=1)

    def column_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.rows}x{self.cols})"

    def __str__(self) -> str:
        return "\n".join("".join("1" if b else "0" for b in r) for r in self.to_dense())


# ----------------------------------------------------------------------
# elimination

def _reduce(data: np.ndarray, cols: int, full: bool = False) -> tuple[np.ndarray, list[int]]:
    """Row-reduce a copy of ``data``; return (reduced rows, pivot columns).

    With ``full`` the result is in reduced row echelon form.
    """
    a = data.copy()
    nrows = a.shape[0]
    pivots: list[int] = []
    rank = 0
    for c in range(cols):
        if rank == nrows:
            break
        w = c // WORD
        bit = np.uint64(1) << np.uint64(c % WORD)
        colbits = a[:, w] & bit
        below = np.flatnonzero(colbits[rank:])
        if below.size == 0:
            continue
        p = rank + int(below[0])
        if p != rank:
            a[[rank, p]] = a[[p, rank]]
            colbits = a[:, w] & bit
        hits = np.flatnonzero(colbits)
        if not full:
            hits = hits[hits > rank]
        else:
            hits = hits[hits != rank]
        if hits.size:
            a[hits] ^= a[rank]
        pivots.append(c)
        rank += 1
    return a[:rank], pivots


def rank(M: BinaryMatrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return len(_reduce(M.data, M.cols)[1])


def rank_of_masks(masks: Iterable[int]) -> int:
    """Rank of vectors given as Python ints (any length)."""
    basis: dict[int, int] = {}
    for v in masks:
        while v:
            top = v.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = v
                break
            v ^= b
    return len(basis)


def row_basis(M: BinaryMatrix) -> BinaryMatrix:
    """Reduced row echelon basis of the row space (``rank(M)`` rows)."""
    if M.rows == 0:
        return BinaryMatrix(0, M.cols)
    reduced, _ = _reduce(M.data, M.cols, full=True)
    return BinaryMatrix(reduced.shape[0], M.cols, reduced)


def nullspace_basis(M: BinaryMatrix) -> BinaryMatrix:
    """Basis of ``{x : M x^T = 0}`` as rows; for a parity-check matrix, a generator matrix."""
    n = M.cols
    if M.rows == 0:
        return BinaryMatrix.identity(n)
    reduced, pivots = _reduce(M.data, n, full=True)
    R = BinaryMatrix(reduced.shape[0], n, reduced).row_masks()
    pivset = set(pivots)
    out = []
    for f in range(n):
        if f in pivset:
            continue
        v = 1 << f
        for row, p in zip(R, pivots):
            if row >> f & 1:
                v |= 1 << p
        out.append(v)
    return BinaryMatrix.from_row_masks(out, n)


def column_submatrix(M: BinaryMatrix, S: Iterable[int]) -> BinaryMatrix:
    """Columns of ``M`` indexed by ``S`` in ascending order, as a new matrix."""
    idx = sorted(set(int(j) for j in S))
    for j in idx:
        if j < 0 or j >= M.cols:
            raise IndexError(f"column {j} out of range for {M.cols} columns")
    if M.rows == 0:
        return BinaryMatrix(0, len(idx))
    return BinaryMatrix.from_dense(M.to_dense()[:, idx].reshape(M.rows, len(idx)))


@dataclass(frozen=True)
class ErasureSolution:
    unique: bool
    codeword: np.ndarray | None = None


def solve_erasure_system(H: BinaryMatrix, E: Iterable[int], received) -> ErasureSolution:
    """Fill the erased positions ``E`` of ``received`` from ``H c^T = 0``.

    ``received`` is a length-``n`` sequence; entries at positions in ``E``
    are ignored (``None`` is allowed there).  Returns the completed codeword
    when the columns of ``H_E`` are independent, otherwise ``unique=False``.
    Raises :class:`InconsistentSystemError` if no codeword agrees with the
    fixed coordinates.
    """
    n = H.cols
    erased = sorted(set(int(j) for j in E))
    if len(received) != n:
        raise ValueError("received word length does not match H")
    for j in erased:
        if j < 0 or j >= n:
            raise IndexError(f"erasure position {j} out of range")
    eset = set(erased)
    known = np.zeros(n, dtype=np.uint8)
    for j, v in enumerate(received):
        if j in eset:
            continue
        if v not in (0, 1):
            raise ValueError(f"position {j} is not erased but holds {v!r}")
        known[j] = v
    dense = H.to_dense()
    syndrome = (dense[:, [j for j in range(n) if j not in eset]].astype(np.int64)
                @ known[[j for j in range(n) if j not in eset]].astype(np.int64)) % 2
    # augmented [H_E | s], solve by elimination on ints
    k = len(erased)
    rows = []
    for i in range(H.rows):
        v = 0
        for col, j in enumerate(erased):
            if dense[i, j]:
                v |= 1 << col
        if syndrome[i]:
            v |= 1 << k
        rows.append(v)
    pivots: list[tuple[int, int]] = []
    for v in rows:
        for p, b in pivots:
            if v >> p & 1:
                v ^= b
        if v == 0:
            continue
        low = (v & -v).bit_length() - 1
        if low == k:
            raise InconsistentSystemError("fixed coordinates are not consistent with any codeword")
        pivots = [(p, b ^ v if b >> low & 1 else b) for p, b in pivots]
        pivots.append((low, v))
    if len(pivots) < k:
        return ErasureSolution(False, None)
    word = known.copy()
    for p, b in pivots:
        word[erased[p]] = b >> k & 1
    return ErasureSolution(True, word)


def row_space_iter(M: BinaryMatrix, limit: int = DEFAULT_ROW_SPACE_LIMIT) -> Iterator[BinaryVector]:
    """Yield every vector of the row space once.

    Order: start at zero, then Gray code over the reduced basis, so step
    ``g`` XORs basis row ``ctz(g)``.
    """
    basis = row_basis(M).row_masks()
    if len(basis) > limit:
        raise RowSpaceTooLargeError(f"row space of dimension {len(basis)} exceeds limit {limit}")
    v = 0
    yield BinaryVector(M.cols, 0)
    for g in range(1, 1 << len(basis)):
        v ^= basis[(g & -g).bit_length() - 1]
        yield BinaryVector(M.cols, v)


def row_space_array(M: BinaryMatrix, limit: int = DEFAULT_ROW_SPACE_LIMIT) -> np.ndarray:
    """Row space as a ``uint64`` array indexed by coefficient vector.

    Entry ``a`` is the XOR of basis rows ``k`` with bit ``k`` of ``a`` set,
    where the basis is :func:`row_basis`.  Needs ``cols <= 64``.
    """
    basis = row_basis(M)
    if basis.rows > limit:
        raise RowSpaceTooLargeError(f"row space of dimension {basis.rows} exceeds limit {limit}")
    out = np.zeros(1, dtype=np.uint64)
    for b in basis.words64():
        out = np.concatenate([out, out ^ b])
    return out
