"""Code containers, the built-in extended Golay matrix, matrix file I/O and
random ensembles."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .gf2 import BinaryMatrix, nullspace_basis, rank

_GOLAY_ROWS = (
    "110000000000011011100010",
    "101000000000001101110001",
    "100100000000010110111000",
    "100010000000001011011100",
    "100001000000000101101110",
    "100000100000000010110111",
    "100000010000010001011011",
    "100000001000011000101101",
    "100000000100011100010110",
    "100000000010001110001011",
    "100000000001010111000101",
    "000000000000111111111111",
)


class MatrixFormatError(ValueError):
    pass


@dataclass(frozen=True)
class LinearCode:
    """A binary linear code given by a parity-check matrix ``H``.

    ``d`` is only ever set by the caller (or by :func:`minimum_distance`);
    it is never inferred on construction.
    """

    H: BinaryMatrix
    d: int | None = None
    name: str = ""

    @property
    def n(self) -> int:
        return self.H.cols

    @property
    def m(self) -> int:
        return self.H.rows

    @cached_property
    def r(self) -> int:
        return rank(self.H)

    @property
    def k(self) -> int:
        return self.n - self.r

    def with_matrix(self, H: BinaryMatrix) -> "LinearCode":
        """Same code, different parity-check matrix (caller vouches for it)."""
        return LinearCode(H, self.d, self.name)

    def generator(self) -> BinaryMatrix:
        return nullspace_basis(self.H)


def golay_extended() -> LinearCode:
    H = BinaryMatrix.from_dense([[int(c) for c in row] for row in _GOLAY_ROWS])
    return LinearCode(H, d=8, name="golay24")


def minimum_distance(code: LinearCode, max_dim: int = 26) -> int:
    """Brute-force minimum nonzero codeword weight over the nullspace of H.

    Returns 0 for the trivial code ``k = 0`` by convention.
    """
    G = code.generator()
    if G.rows == 0:
        return 0
    if G.rows > max_dim:
        raise ValueError(f"code dimension {G.rows} too large for brute force (limit {max_dim})")
    basis = G.row_masks()
    best = code.n + 1
    v = 0
    for g in range(1, 1 << len(basis)):
        v ^= basis[(g & -g).bit_length() - 1]
        w = v.bit_count()
        if w < best:
            best = w
    return best


# ----------------------------------------------------------------------
# file formats

def _parse_dense(text: str) -> BinaryMatrix:
    lines = [ln.strip() for ln in text.splitlines()]
    header = None
    if lines and lines[0].startswith("#"):
        header = lines.pop(0)
    rows = [ln for ln in lines if ln]
    n = m = None
    if header is not None:
        fields = dict(tok.split("=", 1) for tok in header[1:].split() if "=" in tok)
        try:
            n = int(fields["n"])
            m = int(fields["m"])
        except (KeyError, ValueError) as exc:
            raise MatrixFormatError(f"malformed header line {header!r}") from exc
    width = len(rows[0]) if rows else (n or 0)
    for i, row in enumerate(rows):
        if set(row) - {"0", "1"}:
            raise MatrixFormatError(f"row {i + 1}: non-binary symbol")
        if len(row) != width:
            raise MatrixFormatError(f"row {i + 1}: expected {width} columns, got {len(row)}")
    if m is not None and m != len(rows):
        raise MatrixFormatError(f"header declares {m} rows, found {len(rows)}")
    if n is not None and rows and n != width:
        raise MatrixFormatError(f"header declares {n} columns, found {width}")
    if not rows:
        return BinaryMatrix(0, width)
    return BinaryMatrix.from_dense(np.array([[int(c) for c in row] for row in rows], dtype=np.uint8))


def _ints(line: str, where: str) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise MatrixFormatError(f"{where}: expected integers") from exc


def _parse_alist(text: str) -> BinaryMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 4:
        raise MatrixFormatError("alist needs at least four lines")
    head = _ints(lines[0], "line 1")
    if len(head) != 2 or min(head) < 0:
        raise MatrixFormatError("line 1 must be 'n m'")
    n, m = head
    maxdeg = _ints(lines[1], "line 2")
    if len(maxdeg) != 2:
        raise MatrixFormatError("line 2 must hold the two maximum degrees")
    coldeg = _ints(lines[2], "line 3")
    rowdeg = _ints(lines[3], "line 4")
    if len(coldeg) != n or len(rowdeg) != m:
        raise MatrixFormatError("degree list lengths do not match n and m")
    if len(lines) != 4 + n + m:
        raise MatrixFormatError(f"expected {n + m} index lines, found {len(lines) - 4}")
    dense = np.zeros((m, n), dtype=np.uint8)

    def entries(line: str, deg: int, bound: int, where: str) -> list[int]:
        vals = _ints(line, where)
        if len(vals) < deg:
            raise MatrixFormatError(f"{where}: fewer indices than its degree")
        body, pad = vals[:deg], vals[deg:]
        if any(v != 0 for v in pad):
            raise MatrixFormatError(f"{where}: more indices than its degree")
        for v in body:
            if v < 1 or v > bound:
                raise MatrixFormatError(f"{where}: index {v} out of range 1..{bound}")
        if len(set(body)) != len(body):
            raise MatrixFormatError(f"{where}: repeated index")
        return body

    for j in range(n):
        for i in entries(lines[4 + j], coldeg[j], m, f"column {j + 1}"):
            dense[i - 1, j] = 1
    check = np.zeros_like(dense)
    for i in range(m):
        for j in entries(lines[4 + n + i], rowdeg[i], n, f"row {i + 1}"):
            check[i, j - 1] = 1
    if not np.array_equal(dense, check):
        raise MatrixFormatError("row and column index lists disagree")
    if maxdeg != [max(coldeg, default=0), max(rowdeg, default=0)]:
        raise MatrixFormatError("line 2 does not match the largest degrees")
    if m == 0:
        return BinaryMatrix(0, n)
    return BinaryMatrix.from_dense(dense)


def load_matrix(text: bytes | str, format: str = "dense", d: int | None = None) -> LinearCode:
    if isinstance(text, bytes):
        text = text.decode("ascii")
    if format == "dense":
        H = _parse_dense(text)
    elif format == "alist":
        H = _parse_alist(text)
    else:
        raise ValueError(f"unknown matrix format {format!r}")
    return LinearCode(H, d=d)


def save_matrix(code: LinearCode | BinaryMatrix, format: str = "dense") -> bytes:
    H = code.H if isinstance(code, LinearCode) else code
    dense = H.to_dense()
    m, n = dense.shape
    if format == "dense":
        lines = [f"# n={n} m={m}"]
        lines += ["".join("1" if b else "0" for b in row) for row in dense]
    elif format == "alist":
        cols = [np.flatnonzero(dense[:, j]) + 1 for j in range(n)]
        rows = [np.flatnonzero(dense[i]) + 1 for i in range(m)]
        lines = [f"{n} {m}",
                 f"{max((len(c) for c in cols), default=0)} {max((len(r) for r in rows), default=0)}",
                 " ".join(str(len(c)) for c in cols),
                 " ".join(str(len(r)) for r in rows)]
        # an empty index list is written as a lone 0 so the line survives
        lines += [" ".join(map(str, c)) or "0" for c in cols]
        lines += [" ".join(map(str, r)) or "0" for r in rows]
    else:
        raise ValueError(f"unknown matrix format {format!r}")
    return ("\n".join(lines) + "\n").encode("ascii")


# ----------------------------------------------------------------------
# randomness and ensembles

def make_generator(seed: int, *stream: int) -> np.random.Generator:
    """Philox counter-based generator for ``(seed, *stream)``.

    Distinct stream tuples give statistically independent sequences, so
    parallel workers and per-size sampling never share state.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def sample_sre(n: int, m: int, seed: int, rng: np.random.Generator | None = None) -> LinearCode:
    """An ``m x n`` matrix of independent fair bits."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    rng = rng or make_generator(seed)
    bits = rng.integers(0, 2, size=(m, n), dtype=np.uint8)
    return LinearCode(BinaryMatrix.from_dense(bits), name=f"sre({n},{m})")


def gallager_strip(n: int, K: int) -> np.ndarray:
    if K < 1 or n % K:
        raise ValueError(f"K={K} does not divide n={n}")
    M = n // K
    strip = np.zeros((M, n), dtype=np.uint8)
    for j in range(M):
        strip[j, j * K:(j + 1) * K] = 1
    return strip


def sample_gallager(n: int, J: int, K: int, seed: int, rng: np.random.Generator | None = None) -> LinearCode:
    """Gallager (J, K)-regular matrix: J strips, strips 2..J column-permuted."""
    if J < 1:
        raise ValueError("J must be positive")
    strip = gallager_strip(n, K)
    rng = rng or make_generator(seed)
    blocks = [strip]
    for _ in range(J - 1):
        blocks.append(strip[:, rng.permutation(n)])
    return LinearCode(BinaryMatrix.from_dense(np.vstack(blocks)), name=f"gallager({n},{J},{K})")


@dataclass(frozen=True)
class EnsembleSpec:
    variant: str
    n: int
    m: int = 0
    J: int = 0
    K: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.variant == "sre":
            if self.n < 1 or self.m < 1:
                raise ValueError("SRE needs n, m >= 1")
        elif self.variant == "gallager":
            if self.J < 1 or self.K < 1 or self.n % self.K:
                raise ValueError("Gallager needs J >= 1 and K dividing n")
        else:
            raise ValueError(f"unknown ensemble {self.variant!r}")

    @classmethod
    def sre(cls, n: int, m: int) -> "EnsembleSpec":
        return cls("sre", n, m=m)

    @classmethod
    def gallager(cls, n: int, J: int, K: int) -> "EnsembleSpec":
        return cls("gallager", n, m=n * J // K, J=J, K=K)

    @property
    def rows(self) -> int:
        return self.m

    @property
    def M(self) -> int:
        """Rows per strip (Gallager only)."""
        return self.n // self.K if self.variant == "gallager" else self.m

    @property
    def r_max(self) -> int:
        if self.variant == "gallager":
            return self.n * self.J // self.K - (self.J - 1)
        return min(self.m, self.n)

    def sample(self, seed: int, rng: np.random.Generator | None = None) -> LinearCode:
        if self.variant == "sre":
            return sample_sre(self.n, self.m, seed, rng)
        return sample_gallager(self.n, self.J, self.K, seed, rng)
