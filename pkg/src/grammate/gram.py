"""
The Gram-mate relation and its convertibility theory.

A Gram pair is a pair of distinct (0,1) matrices A, B with AA^T = BB^T and
A^T A = B^T B, verified in exact integer arithmetic.  Convertibility (B
arises from A by flipping signs of positive singular values) is decided by
seven equivalent conditions; the four algebraic ones run in integers and are
authoritative, the three singular-vector ones run in floating point as
cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import numerics
from .matrix_core import BinaryMatrix, SignedMatrix, col_sums, rank_exact, row_sums

CHECK_NAMES = (
    "sum_times_diffT_zero",
    "diffT_times_sum_zero",
    "sign_flip_recovers_mate",
    "right_vectors_null",
    "left_vectors_null",
    "A_diffT_symmetric",
    "AT_diff_symmetric",
)


@dataclass(frozen=True)
class GramPair:
    A: BinaryMatrix
    B: BinaryMatrix
    diff_rank: int

    def __post_init__(self):
        a, b = self.A.int64(), self.B.int64()
        if a.shape != b.shape:
            raise ValueError("dimension mismatch")
        if (a == b).all():
            raise ValueError("A and B must be distinct")
        if (a @ a.T != b @ b.T).any() or (a.T @ a != b.T @ b).any():
            raise ValueError("Gram identities fail")
        assert row_sums(self.A) == row_sums(self.B)
        assert col_sums(self.A) == col_sums(self.B)

    def diff(self) -> SignedMatrix:
        return SignedMatrix(self.A.int64() - self.B.int64())


@dataclass(frozen=True)
class GramSingularReport:
    values: tuple[float, ...]
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    source: str


@dataclass(frozen=True)
class ConvertibilityReport:
    convertible: bool
    checks: dict[str, bool]
    gram_singular: GramSingularReport | None


def is_gram_pair(A: BinaryMatrix, B: BinaryMatrix):
    """GramPair when the Gram identities hold exactly and A != B, else None."""
    if A.shape != B.shape:
        raise ValueError("dimension mismatch")
    a, b = A.int64(), B.int64()
    if (a == b).all():
        return None
    if (a @ a.T != b @ b.T).any() or (a.T @ a != b.T @ b).any():
        return None
    return GramPair(A, B, rank_exact(SignedMatrix(a - b)))


def is_realizable_witness(E: SignedMatrix, A: BinaryMatrix) -> bool:
    """True iff (A, A+E) is a Gram pair."""
    if E.shape != A.shape:
        raise ValueError("dimension mismatch")
    s = A.int64() + E.int64()
    if not np.isin(s, (0, 1)).all():
        raise ValueError("A+E has an entry outside {0,1}")
    return is_gram_pair(A, BinaryMatrix(s.astype(np.int8))) is not None


def embed_check(E_tilde: SignedMatrix, X1, X2) -> bool:
    """Border conditions for extending mates of E-tilde to the padded E:
    E-tilde X2^T = 0 and E-tilde^T X1 = 0."""
    e = E_tilde.int64()
    x1 = X1.int64()
    x2 = X2.int64()
    if x1.shape[0] != e.shape[0] or x2.shape[1] != e.shape[1]:
        raise ValueError("dimension mismatch")
    return not (e @ x2.T).any() and not (e.T @ x1).any()


def _independent_rows(D: np.ndarray) -> np.ndarray:
    """An exact basis of the row space: a maximal independent subset of rows,
    chosen by Gaussian elimination over the rationals."""
    rows = [[Fraction(int(x)) for x in r] for r in D]
    chosen: list[int] = []
    basis: list[list[Fraction]] = []
    pivots: list[int] = []
    for idx, row in enumerate(rows):
        r = row[:]
        for b, p in zip(basis, pivots):
            if r[p]:
                f = r[p] / b[p]
                r = [x - f * y for x, y in zip(r, b)]
        p = next((j for j, x in enumerate(r) if x), None)
        if p is not None:
            chosen.append(idx)
            basis.append(r)
            pivots.append(p)
    return D[chosen]


def _in_span(D: np.ndarray, v: np.ndarray, tol: float) -> bool:
    """Residual test for v in the row space of integer matrix D."""
    B = _independent_rows(D).astype(np.float64)
    if B.shape[0] == 0:
        return bool(np.abs(v).max() <= tol)
    coef = np.linalg.solve(B @ B.T, B @ v)
    return bool(np.abs(v - B.T @ coef).max() <= tol)


def gram_singular_numeric(pair: GramPair, tol: float | None = None) -> GramSingularReport:
    """Gram singular data from the SVD of (A-B)/2."""
    half = (pair.A.int64() - pair.B.int64()) / 2.0
    bundle = numerics.svd(half, tol)
    k = pair.diff_rank
    return GramSingularReport(
        values=tuple(float(s) for s in bundle.sigma[:k]),
        right_vectors=bundle.V[:, :k].copy(),
        left_vectors=bundle.U[:, :k].copy(),
        source="numeric",
    )


def convertibility(pair: GramPair, tol: float | None = None) -> ConvertibilityReport:
    """Evaluate the seven equivalent convertibility conditions.

    Integer conditions are authoritative; a disagreement with the numeric
    singular-vector conditions raises, since it can only mean a numerics bug.
    """
    a = pair.A.int64()
    d = a - pair.B.int64()
    s = a + pair.B.int64()
    t = numerics.scaled_tol(pair.A, tol)

    checks = {
        "sum_times_diffT_zero": not (s @ d.T).any(),
        "diffT_times_sum_zero": not (d.T @ s).any(),
        "A_diffT_symmetric": bool((a @ d.T == d @ a.T).all()),
        "AT_diff_symmetric": bool((a.T @ d == d.T @ a).all()),
    }
    integer_verdict = checks["sum_times_diffT_zero"]
    if len(set(checks.values())) != 1:
        raise RuntimeError(f"integer convertibility checks disagree: {checks}")

    report = gram_singular_numeric(pair, tol)
    sign_flip = True
    right_null = True
    left_null = True
    af = a.astype(np.float64)
    sf = s.astype(np.float64)
    for sv, u, v in zip(report.values, report.left_vectors.T, report.right_vectors.T):
        if np.abs(af @ v - sv * u).max() > t or np.abs(af.T @ u - sv * v).max() > t:
            sign_flip = False
        if np.abs(sf @ v).max() > t or not _in_span(d, v, t):
            right_null = False
        if np.abs(sf.T @ u).max() > t or not _in_span(d.T, u, t):
            left_null = False
    checks["sign_flip_recovers_mate"] = sign_flip
    checks["right_vectors_null"] = right_null
    checks["left_vectors_null"] = left_null

    if {sign_flip, right_null, left_null} != {integer_verdict}:
        raise RuntimeError(
            f"numeric convertibility checks disagree with integer verdict: {checks}"
        )
    ordered = {name: checks[name] for name in CHECK_NAMES}
    return ConvertibilityReport(
        convertible=integer_verdict,
        checks=ordered,
        gram_singular=report if integer_verdict else None,
    )
