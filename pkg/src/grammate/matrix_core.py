"""
Exact dense matrices over {0,1} and {-1,0,1}, permutations, block partitions,
and the .mtxt text format.

Entries are stored as int8 numpy arrays; all products and Gram matrices are
accumulated in int64, so every algebraic identity checked elsewhere in the
package is exact.  Matrices are immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np


class MatrixFormatError(ValueError):
    """Raised for malformed .mtxt input."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int8)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class _DenseMatrix:
    """Shared implementation of the two matrix kinds."""

    data: np.ndarray = field(repr=False)

    _ALPHABET: ClassVar[tuple[int, ...]] = ()

    def __post_init__(self):
        a = _freeze(np.atleast_2d(self.data))
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("matrix must be 2-dimensional with positive size")
        if not np.isin(a, self._ALPHABET).all():
            raise ValueError(f"entry out of range {self._ALPHABET}")
        object.__setattr__(self, "data", a)

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def int64(self) -> np.ndarray:
        """Writable int64 copy for exact arithmetic."""
        return self.data.astype(np.int64)

    def transpose(self):
        return type(self)(self.data.T)

    def __eq__(self, other) -> bool:
        return (
            type(self) is type(other)
            and self.data.shape == other.data.shape
            and bool((self.data == other.data).all())
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.data.shape, self.data.tobytes()))

    def __str__(self) -> str:
        return serialize_matrix(self)


class BinaryMatrix(_DenseMatrix):
    """Dense m x n matrix over {0,1}."""

    _ALPHABET = (0, 1)

    @staticmethod
    def zeros(rows: int, cols: int) -> "BinaryMatrix":
        return BinaryMatrix(np.zeros((rows, cols), dtype=np.int8))

    @staticmethod
    def ones(rows: int, cols: int) -> "BinaryMatrix":
        return BinaryMatrix(np.ones((rows, cols), dtype=np.int8))

    @staticmethod
    def identity(n: int) -> "BinaryMatrix":
        return BinaryMatrix(np.eye(n, dtype=np.int8))


class SignedMatrix(_DenseMatrix):
    """Dense m x n matrix over {-1,0,1}."""

    _ALPHABET = (-1, 0, 1)

    @staticmethod
    def zeros(rows: int, cols: int) -> "SignedMatrix":
        return SignedMatrix(np.zeros((rows, cols), dtype=np.int8))


@dataclass(frozen=True)
class Permutation:
    """Bijection i -> image[i] on {0..size-1}."""

    image: tuple[int, ...]

    def __post_init__(self):
        img = tuple(int(i) for i in self.image)
        if sorted(img) != list(range(len(img))):
            raise ValueError("image is not a bijection on {0..size-1}")
        object.__setattr__(self, "image", img)

    @property
    def size(self) -> int:
        return len(self.image)

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for i, j in enumerate(self.image):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self*other)(i) = self(other(i))."""
        if self.size != other.size:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.image[other.image[i]] for i in range(self.size)))

    def matrix(self) -> BinaryMatrix:
        """Permutation matrix P with P e_i = e_image[i]."""
        m = np.zeros((self.size, self.size), dtype=np.int8)
        for i, j in enumerate(self.image):
            m[j, i] = 1
        return BinaryMatrix(m)

    def is_involution(self) -> bool:
        return all(self.image[self.image[i]] == i for i in range(self.size))


@dataclass(frozen=True)
class BlockSpec:
    """Row/column partition sizes of a block layout."""

    row_sizes: tuple[int, ...]
    col_sizes: tuple[int, ...]

    def __post_init__(self):
        rs = tuple(int(s) for s in self.row_sizes)
        cs = tuple(int(s) for s in self.col_sizes)
        if any(s < 0 for s in rs + cs):
            raise ValueError("block sizes must be >= 0")
        object.__setattr__(self, "row_sizes", rs)
        object.__setattr__(self, "col_sizes", cs)

    def row_offsets(self) -> list[int]:
        off = [0]
        for s in self.row_sizes:
            off.append(off[-1] + s)
        return off

    def col_offsets(self) -> list[int]:
        off = [0]
        for s in self.col_sizes:
            off.append(off[-1] + s)
        return off


def row_sums(M) -> tuple[int, ...]:
    return tuple(int(s) for s in M.int64().sum(axis=1))


def col_sums(M) -> tuple[int, ...]:
    return tuple(int(s) for s in M.int64().sum(axis=0))


def rank_exact(E) -> int:
    """Rank over the rationals by Bareiss fraction-free elimination.

    Runs on Python ints, so intermediates are exact at any size.
    """
    a = [[int(x) for x in row] for row in E.data]
    m, n = len(a), len(a[0])
    rank = 0
    prev = 1
    row = 0
    for col in range(n):
        pivot = next((r for r in range(row, m) if a[r][col] != 0), None)
        if pivot is None:
            continue
        if pivot != row:
            a[row], a[pivot] = a[pivot], a[row]
        for r in range(row + 1, m):
            for c in range(col + 1, n):
                a[r][c] = (a[row][col] * a[r][c] - a[r][col] * a[row][c]) // prev
            a[r][col] = 0
        prev = a[row][col]
        rank += 1
        row += 1
        if row == m:
            break
    return rank


def apply_perms(M, P: Permutation, Q: Permutation):
    """Return PMQ'-style relabeling: entry (i,j) of result = M[P^-1(i), Q^-1(j)].

    Row i of M lands at row P(i); column j lands at column Q(j).
    """
    if P.size != M.rows or Q.size != M.cols:
        raise ValueError("permutation size mismatch")
    pinv = P.inverse().image
    qinv = Q.inverse().image
    return type(M)(M.data[np.ix_(pinv, qinv)])


def parse_matrix(text: str):
    """Parse .mtxt text into a BinaryMatrix or SignedMatrix.

    Returns a BinaryMatrix when all entries are in {0,1}, otherwise a
    SignedMatrix.  Lines starting with '#' are comments.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise MatrixFormatError("empty input")
    head = lines[0].split()
    if len(head) != 2:
        raise MatrixFormatError(f"malformed dimension line: {lines[0]!r}")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError:
        raise MatrixFormatError(f"malformed dimension line: {lines[0]!r}") from None
    if rows < 1 or cols < 1:
        raise MatrixFormatError("dimensions must be positive")
    if len(lines) - 1 != rows:
        raise MatrixFormatError(f"expected {rows} rows, found {len(lines) - 1}")
    entries = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != cols:
            raise MatrixFormatError(f"row length mismatch: {ln!r}")
        row = []
        for p in parts:
            try:
                v = int(p)
            except ValueError:
                raise MatrixFormatError(f"entry out of range: {p!r}") from None
            if v not in (-1, 0, 1):
                raise MatrixFormatError(f"entry out of range: {p!r}")
            row.append(v)
        entries.append(row)
    a = np.array(entries, dtype=np.int8)
    if (a >= 0).all():
        return BinaryMatrix(a)
    return SignedMatrix(a)


def serialize_matrix(M) -> str:
    lines = [f"{M.rows} {M.cols}"]
    for row in M.data:
        lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def load_matrix(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def save_matrix(M, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_matrix(M))
