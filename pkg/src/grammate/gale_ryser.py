"""
Degree-sequence machinery for (0,1) matrices: conjugate vectors, majorization,
the Gale-Ryser existence test, a deterministic Ryser-style construction for
U(R,S), and the block constructions used to synthesize rank-2 witnesses.

U(R,S) is the class of (0,1) matrices with row sum vector R and column sum
vector S.
"""

from __future__ import annotations

import numpy as np

from .matrix_core import BinaryMatrix


class InfeasibleError(ValueError):
    """No matrix exists with the requested sums or signed block profile."""


def _vec(a) -> list[int]:
    out = [int(x) for x in a]
    if any(x < 0 for x in out):
        raise ValueError("degree vectors must be non-negative")
    return out


def conjugate(a, length: int) -> tuple[int, ...]:
    """Entry i of the conjugate counts entries of a that are >= i (i=1..length)."""
    v = _vec(a)
    return tuple(sum(1 for x in v if x >= i) for i in range(1, length + 1))


def majorizes(a, b) -> bool:
    """Sorted-prefix-sum dominance with equal totals (shorter side zero-padded)."""
    x = sorted(_vec(a), reverse=True)
    y = sorted(_vec(b), reverse=True)
    n = max(len(x), len(y))
    x += [0] * (n - len(x))
    y += [0] * (n - len(y))
    if sum(x) != sum(y):
        return False
    px = py = 0
    for i in range(n):
        px += x[i]
        py += y[i]
        if px < py:
            return False
    return True


def exists_urs(R, S) -> bool:
    """Gale-Ryser: U(R,S) is nonempty iff S is majorized by R* and r_i <= n."""
    r, s = _vec(R), _vec(S)
    n = len(s)
    if any(x > n for x in r):
        return False
    return majorizes(conjugate(r, n), s)


def construct_urs(R, S) -> BinaryMatrix:
    """Deterministic member of U(R,S) by Ryser's fill.

    Columns are processed in decreasing column-sum order (ties by original
    index); each column is filled in the rows with the largest residual row
    sums, ties broken by lowest row index.
    """
    r, s = _vec(R), _vec(S)
    if not exists_urs(r, s):
        raise InfeasibleError(f"U(R,S) empty for R={tuple(r)}, S={tuple(s)}")
    m, n = len(r), len(s)
    out = np.zeros((m, n), dtype=np.int8)
    residual = r[:]
    for j in sorted(range(n), key=lambda j: (-s[j], j)):
        rows = sorted(range(m), key=lambda i: (-residual[i], i))[: s[j]]
        if any(residual[i] == 0 for i in rows):
            raise InfeasibleError("Ryser fill ran out of rows")  # unreachable
        for i in rows:
            out[i, j] = 1
            residual[i] -= 1
    assert all(x == 0 for x in residual)
    return BinaryMatrix(out)


def spread_construction(R, n: int) -> BinaryMatrix:
    """Consecutive-ones spread and fold.

    Lay the row sums out as runs of ones continuing left to right across an
    m x n(q+1) strip, cut the strip into q+1 blocks of width n, and add the
    blocks.  Row sums are R; column sums are q+1 in the first (total mod n)
    columns and q elsewhere, where total = q*n + (total mod n).
    """
    r = _vec(R)
    if any(x > n for x in r):
        raise ValueError("every row sum must be at most n")
    m = len(r)
    total = sum(r)
    q = total // n
    out = np.zeros((m, n), dtype=np.int8)
    pos = 0
    for i in range(m):
        for _ in range(r[i]):
            out[i, pos % n] += 1
            pos += 1
    assert (out <= 1).all()
    assert q * n + total % n == total
    return BinaryMatrix(out)


def balanced_rows_for_colsum(S, m: int) -> BinaryMatrix:
    """Matrix with column sums S and near-equal row sums.

    With total = q*m + r, the row sums are q+1 for the first r rows and q for
    the rest.
    """
    s = _vec(S)
    if any(x > m for x in s):
        raise ValueError("every column sum must be at most m")
    total = sum(s)
    q, rem = divmod(total, m)
    rows = [q + 1] * rem + [q] * (m - rem)
    return construct_urs(rows, s)


def _J(m: int, n: int) -> np.ndarray:
    return np.ones((m, n), dtype=np.int8)


def _Z(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=np.int8)


def check_signed_profile(X, m1, m2, n1, n2, row1, row2, col1, col2) -> bool:
    """Do the four signed block-sum identities hold?

    Rows in the first block have (left sum) - (right sum) = row1, rows in the
    second block row2; columns analogously col1 and col2 against the signed
    row split.
    """
    a = X.int64() if hasattr(X, "int64") else np.asarray(X, dtype=np.int64)
    if a.shape != (m1 + m2, n1 + n2):
        raise ValueError("shape mismatch")
    rsig = a[:, :n1].sum(axis=1) - a[:, n1:].sum(axis=1)
    csig = a[:m1].sum(axis=0) - a[m1:].sum(axis=0)
    return (
        (rsig[:m1] == row1).all()
        and (rsig[m1:] == row2).all()
        and (csig[:n1] == col1).all()
        and (csig[n1:] == col2).all()
    )


def _even_core(m1: int, m2: int, n1: int, n2: int) -> np.ndarray:
    """The lemma's layout for m1 >= m2, n1 >= n2."""
    alpha = (m1 - m2) // 2
    beta = (n1 - n2) // 2
    if alpha == 0 and beta == 0:
        return _Z(m1 + m2, n1 + n2)
    if beta == 0:
        return np.vstack([_J(alpha, n1 + n2), _Z(m1 + m2 - alpha, n1 + n2)])
    if alpha == 0:
        return _even_core(n1, n2, m1, m2).T
    return np.block(
        [
            [_J(alpha, beta), _Z(alpha, n2), _Z(alpha, beta), _Z(alpha, n2)],
            [_Z(m2, beta), _Z(m2, n2), _J(m2, beta), _Z(m2, n2)],
            [_Z(alpha, beta), _J(alpha, n2), _J(alpha, beta), _J(alpha, n2)],
            [_Z(m2, beta), _Z(m2, n2), _J(m2, beta), _Z(m2, n2)],
        ]
    )


def _swap_row_blocks(a: np.ndarray, top: int) -> np.ndarray:
    return np.vstack([a[top:], a[:top]])


def _swap_col_blocks(a: np.ndarray, left: int) -> np.ndarray:
    return np.hstack([a[:, left:], a[:, :left]])


def even_block(m1: int, m2: int, n1: int, n2: int) -> BinaryMatrix:
    """X with X(1;-1) = ((n1-n2)/2)*1 and X^T(1;-1) = ((m1-m2)/2)*1.

    Requires all four sizes positive and both pair sums even.  Orientations
    with m1 < m2 or n1 < n2 are obtained from the canonical layout by block
    swaps.
    """
    if min(m1, m2, n1, n2) <= 0:
        raise ValueError("all block sizes must be positive")
    if (m1 + m2) % 2 or (n1 + n2) % 2:
        raise ValueError("pair sums must be even")
    if m1 >= m2 and n1 >= n2:
        a = _even_core(m1, m2, n1, n2)
    elif m1 < m2 and n1 < n2:
        a = _even_core(m2, m1, n2, n1)
        a = _swap_col_blocks(_swap_row_blocks(a, m2), n2)
    elif m1 >= m2:
        a = _swap_col_blocks(_even_core(m1, m2, n2, n1), n2)
    else:
        a = _swap_row_blocks(_even_core(m2, m1, n1, n2), m2)
    h_r = (n1 - n2) // 2
    h_c = (m1 - m2) // 2
    assert check_signed_profile(np.asarray(a, dtype=np.int64), m1, m2, n1, n2, h_r, h_r, h_c, h_c)
    return BinaryMatrix(a)


def proportional_block(a1, a2, b1, b2, m1, m2, n1, n2) -> BinaryMatrix:
    """Y with Y(1;-1) = (b1*1; -b2*1) and Y^T(1;-1) = (a1*1; -a2*1).

    Hypotheses: all of a1,a2,b1,b2 positive, m1+m2 > a1+a2, n1+n2 > b1+b2,
    m1-m2 = a1-a2, n1-n2 = b1-b2, and (n1+n2)/(m1+m2) = (b1+b2)/(a1+a2).
    The construction follows the split on m1*b1 versus n1*a1.
    """
    vals = (a1, a2, b1, b2, m1, m2, n1, n2)
    if min(vals) <= 0:
        raise ValueError("all parameters must be positive")
    if m1 + m2 <= a1 + a2 or n1 + n2 <= b1 + b2:
        raise ValueError("size hypotheses violated")
    if m1 - m2 != a1 - a2 or n1 - n2 != b1 - b2:
        raise ValueError("difference hypotheses violated")
    if (n1 + n2) * (a1 + a2) != (m1 + m2) * (b1 + b2):
        raise ValueError("proportionality hypothesis violated")
    assert m1 * b1 + m2 * b2 == n1 * a1 + n2 * a2

    if m1 * b1 < n1 * a1:
        return proportional_block(b1, b2, a1, a2, n1, n2, m1, m2).transpose()

    ell = m1 * b1 - n1 * a1
    if ell == 0:
        y11 = construct_urs([b1] * m1, [a1] * n1).data
        y22 = construct_urs([b2] * m2, [a2] * n2).data
        a = np.block([[y11, _Z(m1, n2)], [_Z(m2, n1), y22]])
    else:
        q1, r1 = divmod(ell, n1)
        s_tilde = [q1 + 1] * r1 + [q1] * (n1 - r1)
        q2, r2 = divmod(ell, m2)
        r21 = [q2 + 1] * r2 + [q2] * (m2 - r2)
        y11 = construct_urs([b1] * m1, [a1 + t for t in s_tilde]).data
        y21 = construct_urs(r21, s_tilde).data
        y22 = construct_urs([b2 + t for t in r21], [a2] * n2).data
        a = np.block([[y11, _Z(m1, n2)], [y21, y22]])
    assert check_signed_profile(np.asarray(a, dtype=np.int64), m1, m2, n1, n2, b1, -b2, a1, -a2)
    return BinaryMatrix(a)
