"""
Canonical block forms of rank-1 and rank-2 difference matrices.

A realizable difference matrix of rank 1 is permutation equivalent to
[[J,-J,0],[-J,J,0],[0,0,0]]; rank-2 matrices fall into five block forms
M1..M5.  This module classifies a given difference matrix into its form,
decides realizability, completes a form to a concrete witness A (so that
(A, A+E) is a Gram pair), checks candidate witnesses by the block-sum
conditions, and produces closed-form Gram singular data.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import gale_ryser
from .gram import GramSingularReport, is_gram_pair
from .matrix_core import (
    BinaryMatrix,
    Permutation,
    SignedMatrix,
    apply_perms,
    col_sums,
    rank_exact,
    row_sums,
)


class FormMatchError(RuntimeError):
    """Rank-2 matrix with zero sums matched none of the five forms."""


class NotRealizableError(ValueError):
    """Completion was requested for a non-realizable form."""


class NotConvertibleError(ValueError):
    """Closed-form Gram data requested for a non-convertible M5 witness."""


def _perm_from_order(order) -> Permutation:
    """Permutation sending original index order[pos] to position pos."""
    image = [0] * len(order)
    for pos, orig in enumerate(order):
        image[orig] = pos
    return Permutation(tuple(image))


def _J(m, n):
    return np.ones((m, n), dtype=np.int8)


def _Z(m, n):
    return np.zeros((m, n), dtype=np.int8)


# ---------------------------------------------------------------------------
# rank 1


@dataclass(frozen=True)
class Rank1Form:
    k1: int
    k2: int
    row_perm: Permutation
    col_perm: Permutation

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("k1 and k2 must be positive")

    @property
    def shape(self):
        return (self.row_perm.size, self.col_perm.size)


def canonical_rank1_E(k1: int, k2: int, pad_rows: int = 0, pad_cols: int = 0) -> SignedMatrix:
    j = _J(k1, k2)
    core = np.block([[j, -j], [-j, j]])
    out = np.zeros((2 * k1 + pad_rows, 2 * k2 + pad_cols), dtype=np.int8)
    out[: 2 * k1, : 2 * k2] = core
    return SignedMatrix(out)


def classify_rank1(E: SignedMatrix):
    """Rank1Form for a rank-1 zero-sum difference matrix, else None."""
    a = E.int64()
    if not a.any():
        raise ValueError("E must be nonzero")
    if rank_exact(E) != 1:
        return None
    if any(row_sums(E)) or any(col_sums(E)):
        return None
    m, n = a.shape
    first = next(i for i in range(m) if a[i].any())
    v = a[first]
    j0 = next(j for j in range(n) if v[j])
    if v[j0] < 0:
        v = -v
    plus = [i for i in range(m) if (a[i] == v).all()]
    minus = [i for i in range(m) if (a[i] == -v).all()]
    zero = [i for i in range(m) if not a[i].any()]
    if len(plus) + len(minus) + len(zero) != m:
        return None
    if not plus or len(plus) != len(minus):
        return None
    cplus = [j for j in range(n) if v[j] == 1]
    cminus = [j for j in range(n) if v[j] == -1]
    czero = [j for j in range(n) if v[j] == 0]
    if not cplus or len(cplus) != len(cminus):
        return None
    form = Rank1Form(
        k1=len(plus),
        k2=len(cplus),
        row_perm=_perm_from_order(plus + minus + zero),
        col_perm=_perm_from_order(cplus + cminus + czero),
    )
    canon = canonical_rank1_E(form.k1, form.k2, len(zero), len(czero))
    if apply_perms(E, form.row_perm, form.col_perm) != canon:
        return None
    return form


def rank1_complete(form: Rank1Form, border_dims=None) -> BinaryMatrix:
    """Witness A with zero borders, in E's original coordinates."""
    k1, k2 = form.k1, form.k2
    m0, n0 = form.shape
    p0, q0 = m0 - 2 * k1, n0 - 2 * k2
    row_perm, col_perm = form.row_perm, form.col_perm
    if border_dims is not None:
        p, q = border_dims
        if (p0, q0) not in ((0, 0), (p, q)):
            raise ValueError("border_dims conflict with the form's stored size")
        if (p0, q0) == (0, 0) and (p, q) != (0, 0):
            row_perm = Permutation(tuple(list(form.row_perm.image) + list(range(2 * k1, 2 * k1 + p))))
            col_perm = Permutation(tuple(list(form.col_perm.image) + list(range(2 * k2, 2 * k2 + q))))
    else:
        p, q = p0, q0
    j = _J(k1, k2)
    canon = np.zeros((2 * k1 + p, 2 * k2 + q), dtype=np.int8)
    canon[:k1, k2 : 2 * k2] = j
    canon[k1 : 2 * k1, :k2] = j
    return apply_perms(BinaryMatrix(canon), row_perm.inverse(), col_perm.inverse())


def rank1_witness_check(A: BinaryMatrix, form: Rank1Form) -> bool:
    """Border-sum conditions for (A, A+E) to be a Gram pair."""
    if A.shape != form.shape:
        raise ValueError("layout mismatch")
    k1, k2 = form.k1, form.k2
    a = apply_perms(A, form.row_perm, form.col_perm).int64()
    e = canonical_rank1_E(k1, k2, form.shape[0] - 2 * k1, form.shape[1] - 2 * k2).int64()
    fixed = ((1 - e) // 2)[e != 0]
    if not (a[e != 0] == fixed).all():
        return False
    x1 = a[:k1, 2 * k2 :]
    x2 = a[k1 : 2 * k1, 2 * k2 :]
    x3 = a[2 * k1 :, :k2]
    x4 = a[2 * k1 :, k2 : 2 * k2]
    result = (x1.sum(axis=0) == x2.sum(axis=0)).all() and (
        x3.sum(axis=1) == x4.sum(axis=1)
    ).all()
    b = a + e
    assert bool(result) == (
        is_gram_pair(BinaryMatrix(a.astype(np.int8)), BinaryMatrix(b.astype(np.int8)))
        is not None
    )
    return bool(result)


def rank1_gram_data(form: Rank1Form) -> GramSingularReport:
    """Closed-form Gram singular value sqrt(k1*k2) with its vector pair."""
    k1, k2 = form.k1, form.k2
    m, n = form.shape
    v = np.zeros(n)
    v[: 2 * k2] = np.concatenate([np.ones(k2), -np.ones(k2)]) / math.sqrt(2 * k2)
    u = np.zeros(m)
    u[: 2 * k1] = np.concatenate([-np.ones(k1), np.ones(k1)]) / math.sqrt(2 * k1)
    # back to the original coordinates
    v = v[list(form.col_perm.image)]
    u = u[list(form.row_perm.image)]
    return GramSingularReport(
        values=(math.sqrt(k1 * k2),),
        right_vectors=v.reshape(-1, 1),
        left_vectors=u.reshape(-1, 1),
        source="closed_form_rank1",
    )


# ---------------------------------------------------------------------------
# rank 2: form descriptions

M_INDEX_NAMES = {
    "M1": ("k", "l", "a", "b"),
    "M2": ("k", "l", "e", "f", "g", "h"),
    "M3": ("k", "l", "a", "b", "c", "d", "e", "f"),
    "M4": ("k", "l", "a", "b", "c", "d", "e", "f", "g", "h"),
    "M5": ("k", "l", "p", "q", "r", "s", "a", "b", "c", "d", "e", "f"),
}

# column-group sign patterns of the two (M1-M4) / three (M5) basis rows
_M_LAYOUT = {
    "M1": (("a", "b", "b", "a"), ((1, 1, -1, -1), (1, -1, 1, -1))),
    "M2": (("e", "f", "g", "h"), ((1, -1, 0, 0), (0, 0, 1, -1))),
    "M3": (("a", "b", "c", "d", "e", "f"), ((1, 1, -1, -1, 1, -1), (1, -1, 1, -1, 0, 0))),
    "M4": (
        ("a", "b", "c", "d", "e", "f", "g", "h"),
        ((1, 1, -1, -1, 1, -1, 0, 0), (1, -1, 1, -1, 0, 0, 1, -1)),
    ),
    "M5": (
        ("a", "b", "c", "d", "e", "f"),
        ((1, -1, 1, -1, 0, 0), (1, -1, 0, 0, 1, -1), (0, 0, 1, -1, -1, 1)),
    ),
}


@dataclass(frozen=True)
class Rank2Form:
    mtype: str
    indices: tuple[tuple[str, int], ...]
    row_perm: Permutation
    col_perm: Permutation
    transposed: bool

    def __post_init__(self):
        if self.mtype not in M_INDEX_NAMES:
            raise ValueError(f"unknown form tag {self.mtype}")
        if tuple(n for n, _ in self.indices) != M_INDEX_NAMES[self.mtype]:
            raise ValueError("index names do not match the form tag")

    def idx(self, name: str) -> int:
        return dict(self.indices)[name]

    def as_dict(self) -> dict[str, int]:
        return dict(self.indices)


@dataclass(frozen=True)
class Rank2WitnessProfile:
    """Constant block-sum parameters of an M5 witness (None where the
    corresponding row/column group is empty)."""

    x1: int | None
    x2: int | None
    y1: int | None
    y2: int | None
    z1: int | None
    z2: int | None
    alpha1: int | None
    alpha2: int | None
    beta1: int | None
    beta2: int | None
    gamma1: int | None
    gamma2: int | None


def _row_group_sizes(mtype: str, idx: dict[str, int]) -> list[int]:
    if mtype == "M5":
        return [idx[n] for n in ("k", "l", "p", "q", "r", "s")]
    return [idx["k"], idx["k"], idx["l"], idx["l"]]


def _row_group_patterns(mtype: str) -> list[tuple[int, ...]]:
    pats = _M_LAYOUT[mtype][1]
    if mtype == "M5":
        out = []
        for p in pats:
            out.append(p)
            out.append(tuple(-x for x in p))
        return out
    return [pats[0], tuple(-x for x in pats[0]), pats[1], tuple(-x for x in pats[1])]


def canonical_rank2_E(
    mtype: str, idx: dict[str, int], pad_rows: int = 0, pad_cols: int = 0
) -> SignedMatrix:
    col_names = _M_LAYOUT[mtype][0]
    col_sizes = [idx[n] for n in col_names]
    row_sizes = _row_group_sizes(mtype, idx)
    patterns = _row_group_patterns(mtype)
    width = sum(col_sizes) + pad_cols
    rows = []
    for size, pat in zip(row_sizes, patterns):
        row = np.concatenate(
            [np.full(w, s, dtype=np.int8) for w, s in zip(col_sizes, pat)] + [np.zeros(pad_cols, dtype=np.int8)]
        )
        rows.extend([row] * size)
    rows.extend([np.zeros(width, dtype=np.int8)] * pad_rows)
    return SignedMatrix(np.array(rows, dtype=np.int8))


# ---------------------------------------------------------------------------
# rank 2: classification


def _sign_patterns(a: np.ndarray):
    """Distinct nonzero row patterns, sign-normalized, with their +/- rows."""
    pats: list[np.ndarray] = []
    plus: list[list[int]] = []
    minus: list[list[int]] = []
    for i in range(a.shape[0]):
        row = a[i]
        if not row.any():
            continue
        j0 = next(j for j in range(len(row)) if row[j])
        sign = 1 if row[j0] > 0 else -1
        canon = row * sign
        for t, p in enumerate(pats):
            if (p == canon).all():
                (plus if sign == 1 else minus)[t].append(i)
                break
        else:
            pats.append(canon)
            plus.append([i] if sign == 1 else [])
            minus.append([i] if sign == -1 else [])
    return pats, plus, minus


_TWO_PATTERN_SIGNATURES = {
    "M1": ("a", "b", "b", "a"),
    "M2": ("e", "f", "g", "h"),
    "M3": ("a", "b", "c", "d", "e", "f"),
    "M4": ("a", "b", "c", "d", "e", "f", "g", "h"),
}

# signature of a column in (u, w) coordinates, per index name
_SIG_OF = {
    "a": (1, 1),
    "b": (1, -1),
    "c": (-1, 1),
    "d": (-1, -1),
    "e": (1, 0),
    "f": (-1, 0),
    "g": (0, 1),
    "h": (0, -1),
}


def _match_two_patterns(a: np.ndarray, pats, plus, minus):
    """Try M1..M4 in order over pattern orderings and sign flips."""
    n = a.shape[1]
    for mtype in ("M1", "M2", "M3", "M4"):
        for order in ((0, 1), (1, 0)):
            for s1, s2 in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                u = s1 * pats[order[0]]
                w = s2 * pats[order[1]]
                groups: dict[tuple[int, int], list[int]] = {}
                for j in range(n):
                    groups.setdefault((int(u[j]), int(w[j])), []).append(j)
                cnt = {sig: len(cols) for sig, cols in groups.items()}
                if mtype == "M1":
                    ok = (
                        set(cnt) <= {(1, 1), (1, -1), (-1, 1), (-1, -1)}
                        and cnt.get((1, 1), 0) == cnt.get((-1, -1), 0) > 0
                        and cnt.get((1, -1), 0) == cnt.get((-1, 1), 0) > 0
                    )
                    names = {"a": cnt.get((1, 1), 0), "b": cnt.get((1, -1), 0)}
                elif mtype == "M2":
                    ok = (
                        set(cnt) <= {(1, 0), (-1, 0), (0, 1), (0, -1)}
                        and cnt.get((1, 0), 0) == cnt.get((-1, 0), 0) > 0
                        and cnt.get((0, 1), 0) == cnt.get((0, -1), 0) > 0
                    )
                    names = {
                        "e": cnt.get((1, 0), 0),
                        "f": cnt.get((-1, 0), 0),
                        "g": cnt.get((0, 1), 0),
                        "h": cnt.get((0, -1), 0),
                    }
                elif mtype == "M3":
                    quad = sum(cnt.get(s, 0) for s in ((1, 1), (1, -1), (-1, 1), (-1, -1)))
                    half = cnt.get((1, 0), 0) + cnt.get((-1, 0), 0)
                    ok = (
                        not (cnt.get((0, 1), 0) or cnt.get((0, -1), 0))
                        and quad > 0
                        and half > 0
                    )
                    names = {
                        "a": cnt.get((1, 1), 0),
                        "b": cnt.get((1, -1), 0),
                        "c": cnt.get((-1, 1), 0),
                        "d": cnt.get((-1, -1), 0),
                        "e": cnt.get((1, 0), 0),
                        "f": cnt.get((-1, 0), 0),
                    }
                else:
                    quad = sum(cnt.get(s, 0) for s in ((1, 1), (1, -1), (-1, 1), (-1, -1)))
                    half = cnt.get((1, 0), 0) + cnt.get((-1, 0), 0)
                    vert = cnt.get((0, 1), 0) + cnt.get((0, -1), 0)
                    ok = quad > 0 and half > 0 and vert > 0
                    names = {
                        "a": cnt.get((1, 1), 0),
                        "b": cnt.get((1, -1), 0),
                        "c": cnt.get((-1, 1), 0),
                        "d": cnt.get((-1, -1), 0),
                        "e": cnt.get((1, 0), 0),
                        "f": cnt.get((-1, 0), 0),
                        "g": cnt.get((0, 1), 0),
                        "h": cnt.get((0, -1), 0),
                    }
                if not ok:
                    continue
                up = plus[order[0]] if s1 == 1 else minus[order[0]]
                um = minus[order[0]] if s1 == 1 else plus[order[0]]
                wp = plus[order[1]] if s2 == 1 else minus[order[1]]
                wm = minus[order[1]] if s2 == 1 else plus[order[1]]
                if not (up and len(up) == len(um) and wp and len(wp) == len(wm)):
                    continue
                names = dict(names)
                names["k"] = len(up)
                names["l"] = len(wp)
                row_order = sorted(up) + sorted(um) + sorted(wp) + sorted(wm)
                if mtype == "M1":
                    # column groups a,b and their mirrored signatures
                    sig_order = ((1, 1), (1, -1), (-1, 1), (-1, -1))
                else:
                    sig_order = tuple(_SIG_OF[c] for c in _TWO_PATTERN_SIGNATURES[mtype])
                col_order = [c for sig in sig_order for c in sorted(groups.get(sig, []))]
                idx = {nm: names[nm] for nm in M_INDEX_NAMES[mtype]}
                return mtype, idx, row_order, col_order
    return None


_M5_SIG_OF = {
    "a": (1, 1, 0),
    "b": (-1, -1, 0),
    "c": (1, 0, 1),
    "d": (-1, 0, -1),
    "e": (0, 1, -1),
    "f": (0, -1, 1),
}


def _match_three_patterns(a: np.ndarray, pats, plus, minus):
    n = a.shape[1]
    for order in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            r1 = signs[0] * pats[order[0]]
            r2 = signs[1] * pats[order[1]]
            r3 = signs[2] * pats[order[2]]
            if not (r1 == r2 + r3).all():
                continue
            groups: dict[tuple[int, int, int], list[int]] = {}
            for j in range(n):
                groups.setdefault((int(r1[j]), int(r2[j]), int(r3[j])), []).append(j)
            if not set(groups) <= set(_M5_SIG_OF.values()):
                continue
            counts = {nm: len(groups.get(sig, [])) for nm, sig in _M5_SIG_OF.items()}
            bands = []
            for t, s in zip(order, signs):
                bp = plus[t] if s == 1 else minus[t]
                bm = minus[t] if s == 1 else plus[t]
                bands.append((sorted(bp), sorted(bm)))
            idx = {
                "k": len(bands[0][0]),
                "l": len(bands[0][1]),
                "p": len(bands[1][0]),
                "q": len(bands[1][1]),
                "r": len(bands[2][0]),
                "s": len(bands[2][1]),
                **counts,
            }
            pair_sums = (
                idx["k"] + idx["l"],
                idx["p"] + idx["q"],
                idx["r"] + idx["s"],
                idx["a"] + idx["b"],
                idx["c"] + idx["d"],
                idx["e"] + idx["f"],
            )
            if any(t == 0 for t in pair_sums):
                continue
            row_order = [i for band in bands for part in band for i in part]
            col_order = []
            for nm in ("a", "b", "c", "d", "e", "f"):
                col_order.extend(sorted(groups.get(_M5_SIG_OF[nm], [])))
            return "M5", idx, row_order, col_order
    return None


def classify_rank2(E: SignedMatrix):
    """Rank2Form for a rank-2 zero-sum matrix, None if shape/rank/sums fail.

    Raises FormMatchError for a rank-2 zero-sum matrix that matches none of
    the five forms in either orientation (such a matrix is not realizable).
    """
    a = E.int64()
    if not a.any():
        raise ValueError("E must be nonzero")
    if rank_exact(E) != 2:
        return None
    if any(row_sums(E)) or any(col_sums(E)):
        return None

    for transposed in (False, True):
        b = a.T if transposed else a
        live_rows = [i for i in range(b.shape[0]) if b[i].any()]
        live_cols = [j for j in range(b.shape[1]) if b[:, j].any()]
        core = b[np.ix_(live_rows, live_cols)]
        pats, plus, minus = _sign_patterns(core)
        if len(pats) == 2:
            hit = _match_two_patterns(core, pats, plus, minus)
        elif len(pats) == 3:
            hit = _match_three_patterns(core, pats, plus, minus)
        else:
            hit = None
        if hit is None:
            continue
        mtype, idx, row_order, col_order = hit
        zr = [i for i in range(b.shape[0]) if i not in live_rows]
        zc = [j for j in range(b.shape[1]) if j not in live_cols]
        full_rows = [live_rows[i] for i in row_order] + zr
        full_cols = [live_cols[j] for j in col_order] + zc
        form = Rank2Form(
            mtype=mtype,
            indices=tuple((nm, idx[nm]) for nm in M_INDEX_NAMES[mtype]),
            row_perm=_perm_from_order(full_rows),
            col_perm=_perm_from_order(full_cols),
            transposed=transposed,
        )
        canon = canonical_rank2_E(mtype, idx, len(zr), len(zc))
        oriented = SignedMatrix(b.astype(np.int8))
        assert apply_perms(oriented, form.row_perm, form.col_perm) == canon
        return form
    raise FormMatchError("rank-2 zero-sum matrix matches no canonical form; not realizable")


# ---------------------------------------------------------------------------
# rank 2: realizability


def rank2_realizable(form: Rank2Form) -> bool:
    d = form.as_dict()
    if form.mtype in ("M1", "M2"):
        return True
    if form.mtype == "M3":
        return (d["e"] - d["f"]) % 2 == 0
    if form.mtype == "M4":
        return (d["e"] - d["f"]) % 2 == 0 and (d["g"] - d["h"]) % 2 == 0
    rows = (d["k"] + d["l"], d["p"] + d["q"], d["r"] + d["s"])
    cols = (d["a"] + d["b"], d["c"] + d["d"], d["e"] + d["f"])
    if all(t % 2 == 0 for t in rows + cols):
        return True
    if not (all(t % 2 for t in rows) or all(t % 2 for t in cols)):
        return False
    # proportional ratios (e+f)/(k+l) = (c+d)/(p+q) = (a+b)/(r+s)
    return (
        cols[2] * rows[1] == cols[1] * rows[0]
        and cols[1] * rows[2] == cols[0] * rows[1]
    )


# ---------------------------------------------------------------------------
# rank 2: completion


def _half_strip(rows: int, w1: int, w2: int) -> np.ndarray:
    """rows x (w1+w2) block whose signed row sums are all (w1-w2)/2."""
    d = (w1 - w2) // 2
    out = _Z(rows, w1 + w2)
    if d > 0:
        out[:, :d] = 1
    elif d < 0:
        out[:, w1 : w1 - d] = 1
    return out


def _complete_m4(k, l, a, b, c, d, e, f, g, h) -> np.ndarray:
    """The displayed witness layout for M1-M4 (absent indices zero)."""
    x = _half_strip(k, g, h)
    y = _half_strip(l, e, f)
    band1 = np.hstack([_Z(k, a), _Z(k, b), _J(k, c), _J(k, d), _Z(k, e), _J(k, f), x])
    band2 = np.hstack([_J(k, a), _J(k, b), _Z(k, c), _Z(k, d), _J(k, e), _Z(k, f), x])
    band3 = np.hstack([_Z(l, a), _J(l, b), _Z(l, c), _J(l, d), y, _Z(l, g), _J(l, h)])
    band4 = np.hstack([_J(l, a), _Z(l, b), _J(l, c), _Z(l, d), y, _J(l, g), _Z(l, h)])
    return np.vstack([band1, band2, band3, band4])


def _even_profile(m1: int, m2: int, n1: int, n2: int) -> np.ndarray:
    """(m1+m2) x (n1+n2) block with signed row sums (n1-n2)/2 and signed
    column sums (m1-m2)/2, allowing zero sub-sizes (pair sums even)."""
    assert (m1 + m2) % 2 == 0 and (n1 + n2) % 2 == 0
    if m1 + m2 == 0 or n1 + n2 == 0:
        return _Z(m1 + m2, n1 + n2)
    if min(m1, m2, n1, n2) > 0:
        return gale_ryser.even_block(m1, m2, n1, n2).data.copy()
    if n1 == 0 or n2 == 0:
        w = max(n1, n2)  # all rows have plain sum w/2
        if m1 == 0 or m2 == 0:
            m = max(m1, m2)
            return gale_ryser.construct_urs([w // 2] * m, [m // 2] * w).data.copy()
        top = gale_ryser.spread_construction([w // 2] * m1, w).data
        bot = gale_ryser.spread_construction([w // 2] * m2, w).data
        return np.vstack([top, bot])
    # m1 == 0 or m2 == 0 with both column groups present: transpose view
    return _even_profile(n1, n2, max(m1, m2), 0).T.copy()


def _m5_relabel(d: dict[str, int], root: str) -> dict[str, int]:
    """Index relabeling that moves the chosen block into the X role."""
    if root == "X":
        return dict(d)
    if root == "Y":
        k, l, p, q, r, s = d["p"], d["q"], d["k"], d["l"], d["s"], d["r"]
        a, b, c, dd, e, f = d["a"], d["b"], d["e"], d["f"], d["c"], d["d"]
    else:
        k, l, p, q, r, s = d["r"], d["s"], d["k"], d["l"], d["q"], d["p"]
        a, b, c, dd, e, f = d["c"], d["d"], d["f"], d["e"], d["a"], d["b"]
    return {"k": k, "l": l, "p": p, "q": q, "r": r, "s": s, "a": a, "b": b, "c": c, "d": dd, "e": e, "f": f}


def _m5_relabel_perms(d: dict[str, int], root: str):
    """Row/column index maps from original canonical order to the relabeled
    canonical order."""
    row_names = ("k", "l", "p", "q", "r", "s")
    col_names = ("a", "b", "c", "d", "e", "f")
    if root == "X":
        row_src, col_src = row_names, col_names
    elif root == "Y":
        row_src = ("p", "q", "k", "l", "s", "r")
        col_src = ("a", "b", "e", "f", "c", "d")
    else:
        row_src = ("r", "s", "k", "l", "q", "p")
        col_src = ("c", "d", "f", "e", "a", "b")

    def block_ranges(names):
        off, out = 0, {}
        for nm in names:
            out[nm] = list(range(off, off + d[nm]))
            off += d[nm]
        return out

    rr, cc = block_ranges(row_names), block_ranges(col_names)
    row_order = [i for nm in row_src for i in rr[nm]]
    col_order = [j for nm in col_src for j in cc[nm]]
    return row_order, col_order


def _assemble_m5(d: dict[str, int], X: np.ndarray, Y: np.ndarray, Z: np.ndarray) -> np.ndarray:
    k, l, p, q, r, s = (d[n] for n in ("k", "l", "p", "q", "r", "s"))
    a, b, c, dd, e, f = (d[n] for n in ("a", "b", "c", "d", "e", "f"))
    band_k = np.hstack([_Z(k, a), _J(k, b), _Z(k, c), _J(k, dd), X[:k]])
    band_l = np.hstack([_J(l, a), _Z(l, b), _J(l, c), _Z(l, dd), X[k:]])
    band_p = np.hstack([_Z(p, a), _J(p, b), Y[:p], _Z(p, e), _J(p, f)])
    band_q = np.hstack([_J(q, a), _Z(q, b), Y[p:], _J(q, e), _Z(q, f)])
    band_r = np.hstack([Z[:r], _Z(r, c), _J(r, dd), _J(r, e), _Z(r, f)])
    band_s = np.hstack([Z[r:], _J(s, c), _Z(s, dd), _Z(s, e), _J(s, f)])
    return np.vstack([band_k, band_l, band_p, band_q, band_r, band_s])


def _complete_m5_even(d: dict[str, int]) -> np.ndarray:
    X = _even_profile(d["k"], d["l"], d["e"], d["f"])
    Y = _even_profile(d["p"], d["q"], d["c"], d["d"])
    Z = _even_profile(d["r"], d["s"], d["a"], d["b"])
    return _assemble_m5(d, X, Y, Z)


def _complete_m5_odd_rooted(d: dict[str, int]):
    """Diagonal construction at the X block, lemma-built Y and Z; None when
    a positivity hypothesis of the lemma fails."""
    k, l, p, q, r, s = (d[n] for n in ("k", "l", "p", "q", "r", "s"))
    a, b, c, dd, e, f = (d[n] for n in ("a", "b", "c", "d", "e", "f"))
    X = np.block([[_J(k, e), _Z(k, f)], [_Z(l, e), _J(l, f)]])
    try:
        if p + q == k + l:
            # equal sizes force q=k, p=l, c=e, d=f
            Y = np.block([[_Z(p, c), _J(p, dd)], [_J(q, c), _Z(q, dd)]])
        else:
            if min(l, k, f, e, p, q, dd, c) <= 0:
                return None
            # built over the swapped column split (d,c), then swapped back
            w = gale_ryser.proportional_block(l, k, f, e, p, q, dd, c).data
            Y = np.hstack([w[:, dd:], w[:, :dd]])
        if r + s == k + l:
            Z = np.block([[_J(r, a), _Z(r, b)], [_Z(s, a), _J(s, b)]])
        else:
            if min(l, k, f, e, r, s, a, b) <= 0:
                return None
            Z = gale_ryser.proportional_block(l, k, f, e, r, s, a, b).data.copy()
    except ValueError:
        return None
    return _assemble_m5(d, X, Y, Z)


def _row_candidates(n1: int, n2: int, target: int) -> list[np.ndarray]:
    out = []
    for bits in itertools.product((0, 1), repeat=n1 + n2):
        v = np.array(bits, dtype=np.int8)
        if int(v[:n1].sum()) - int(v[n1:].sum()) == target:
            out.append(v)
    return out


def _search_block(m1, m2, n1, n2, r1, r2, c1, c2):
    """Backtracking search for a block with the given signed-sum profile.
    Targets for empty bands are ignored.  Desk-scale sizes only."""
    m, n = m1 + m2, n1 + n2
    if m == 0 or n == 0:
        return _Z(m, n)
    rows_spec = [(r1, 1)] * m1 + [(r2, -1)] * m2
    cands = {}
    for tgt, _ in rows_spec:
        if tgt not in cands:
            cands[tgt] = _row_candidates(n1, n2, tgt)
    col_target = np.array([c1] * n1 + [c2] * n2, dtype=np.int64)
    chosen = np.zeros((m, n), dtype=np.int8)
    cur = np.zeros(n, dtype=np.int64)

    def feasible(i):
        rem_plus = sum(1 for t, sgn in rows_spec[i:] if sgn == 1)
        rem_minus = m - i - rem_plus
        lo = cur - rem_minus
        hi = cur + rem_plus
        return ((col_target >= lo) & (col_target <= hi)).all()

    def rec(i):
        nonlocal cur
        if i == m:
            return (cur == col_target).all()
        tgt, sgn = rows_spec[i]
        for v in cands[tgt]:
            chosen[i] = v
            cur += sgn * v
            if feasible(i + 1) and rec(i + 1):
                return True
            cur -= sgn * v
        return False

    if rec(0):
        return chosen
    return None


def _complete_m5_search(d: dict[str, int]):
    """Parameter-profile enumeration with per-block backtracking; covers the
    degenerate odd cases that the structured constructions skip."""
    k, l, p, q, r, s = (d[n] for n in ("k", "l", "p", "q", "r", "s"))
    a, b, c, dd, e, f = (d[n] for n in ("a", "b", "c", "d", "e", "f"))

    def chain_range(members):
        lo, hi = -100, 100
        any_def = False
        for present, (mlo, mhi) in members:
            if present:
                any_def = True
                lo, hi = max(lo, mlo), min(hi, mhi)
        return (lo, hi) if any_def else None

    # value chains x1=y2=-z2 and x2=y1=-z1
    c1r = chain_range([(k > 0, (-f, e)), (q > 0, (-dd, c)), (s > 0, (-a, b))])
    c2r = chain_range([(l > 0, (-f, e)), (p > 0, (-dd, c)), (r > 0, (-a, b))])
    sum_rows = (k > 0 and l > 0) or (p > 0 and q > 0) or (r > 0 and s > 0)
    # column chains gamma1=beta2=-alpha2 and gamma2=beta1=-alpha1
    d1r = chain_range([(f > 0, (-k, l)), (dd > 0, (-q, p)), (a > 0, (-s, r))])
    d2r = chain_range([(e > 0, (-k, l)), (c > 0, (-q, p)), (b > 0, (-r, s))])
    sum_cols = (e > 0 and f > 0) or (c > 0 and dd > 0) or (a > 0 and b > 0)

    def span(rng):
        if rng is None:
            return [None]
        return list(range(rng[0], rng[1] + 1))

    ecan = canonical_rank2_E("M5", d).int64()
    for v1 in span(c1r):
        v2_opts = span(c2r)
        if sum_rows and c1r is not None and c2r is not None:
            v2_opts = [e - f - v1] if c2r[0] <= e - f - v1 <= c2r[1] else []
        for v2 in v2_opts:
            for w1 in span(d1r):
                w2_opts = span(d2r)
                if sum_cols and d1r is not None and d2r is not None:
                    w2_opts = [l - k - w1] if d2r[0] <= l - k - w1 <= d2r[1] else []
                for w2 in w2_opts:
                    X = _search_block(
                        k, l, e, f,
                        v1, v2,
                        None if w2 is None else -w2,
                        None if w1 is None else -w1,
                    )
                    if X is None:
                        continue
                    Y = _search_block(p, q, c, dd, v2, v1, w2, w1)
                    if Y is None:
                        continue
                    Z = _search_block(
                        r, s, a, b,
                        None if v2 is None else -v2,
                        None if v1 is None else -v1,
                        w1, w2,
                    )
                    if Z is None:
                        continue
                    cand = _assemble_m5(d, X, Y, Z)
                    bsum = cand.astype(np.int64) + ecan
                    if not np.isin(bsum, (0, 1)).all():
                        continue
                    if is_gram_pair(BinaryMatrix(cand), BinaryMatrix(bsum.astype(np.int8))):
                        return cand
    return None


def _complete_m5(d: dict[str, int]) -> np.ndarray:
    rows = (d["k"] + d["l"], d["p"] + d["q"], d["r"] + d["s"])
    cols = (d["a"] + d["b"], d["c"] + d["d"], d["e"] + d["f"])
    if all(t % 2 == 0 for t in rows + cols):
        return _complete_m5_even(d)
    # odd/proportional branch: put the smallest block in the X role
    sizes = {"X": rows[0], "Y": rows[1], "Z": rows[2]}
    for root in sorted(sizes, key=lambda nm: (sizes[nm], nm)):
        dr = _m5_relabel(d, root)
        cand = _complete_m5_odd_rooted(dr)
        if cand is not None:
            row_order, col_order = _m5_relabel_perms(d, root)
            out = np.zeros_like(cand)
            out[np.ix_(row_order, col_order)] = cand
            ecan = canonical_rank2_E("M5", d).int64()
            bsum = out.astype(np.int64) + ecan
            if np.isin(bsum, (0, 1)).all() and is_gram_pair(
                BinaryMatrix(out), BinaryMatrix(bsum.astype(np.int8))
            ):
                return out
    cand = _complete_m5_search(d)
    if cand is None:
        raise RuntimeError("witness construction failed for a realizable M5 form")
    return cand


def rank2_complete(form: Rank2Form) -> BinaryMatrix:
    """A witness A (original coordinates) such that (A, A+E) is a Gram pair."""
    if not rank2_realizable(form):
        raise NotRealizableError(f"form {form.mtype} {form.as_dict()} is not realizable")
    d = form.as_dict()
    if form.mtype == "M1":
        e = canonical_rank2_E("M1", d).int64()
        core = ((np.ones_like(e) - e) // 2).astype(np.int8)
    elif form.mtype == "M2":
        k, l, e_, g = d["k"], d["l"], d["e"], d["g"]
        core = np.block(
            [
                [_Z(k, e_), _J(k, e_), _Z(k, 2 * g)],
                [_J(k, e_), _Z(k, e_), _Z(k, 2 * g)],
                [_Z(2 * l, 2 * e_), np.block([[_Z(l, g), _J(l, g)], [_J(l, g), _Z(l, g)]])],
            ]
        )
    elif form.mtype in ("M3", "M4"):
        m4 = _as_m4_indices(form)
        core = _complete_m4(*m4)
    else:
        core = _complete_m5(d)

    m_can, n_can = form.row_perm.size, form.col_perm.size
    full = np.zeros((m_can, n_can), dtype=np.int8)
    full[: core.shape[0], : core.shape[1]] = core
    A = apply_perms(
        BinaryMatrix(full), form.row_perm.inverse(), form.col_perm.inverse()
    )
    if form.transposed:
        A = A.transpose()
    # never emit an unverified witness
    e_full = reconstruct_E(form)
    bsum = A.int64() + e_full.int64()
    assert np.isin(bsum, (0, 1)).all()
    assert is_gram_pair(A, BinaryMatrix(bsum.astype(np.int8))) is not None
    return A


def reconstruct_E(form: Rank2Form) -> SignedMatrix:
    """The original difference matrix described by the form."""
    d = form.as_dict()
    col_sizes = sum(d[n] for n in _M_LAYOUT[form.mtype][0])
    row_sizes = sum(_row_group_sizes(form.mtype, d))
    pad_r = form.row_perm.size - row_sizes
    pad_c = form.col_perm.size - col_sizes
    canon = canonical_rank2_E(form.mtype, d, pad_r, pad_c)
    e = apply_perms(canon, form.row_perm.inverse(), form.col_perm.inverse())
    if form.transposed:
        e = e.transpose()
    return e


# ---------------------------------------------------------------------------
# rank 2: witness checking


def _as_m4_indices(form: Rank2Form):
    d = form.as_dict()
    k, l = d["k"], d["l"]
    if form.mtype == "M1":
        return (k, l, d["a"], d["b"], d["b"], d["a"], 0, 0, 0, 0)
    if form.mtype == "M2":
        return (k, l, 0, 0, 0, 0, d["e"], d["f"], d["g"], d["h"])
    if form.mtype == "M3":
        return (k, l, d["a"], d["b"], d["c"], d["d"], d["e"], d["f"], 0, 0)
    return (k, l, d["a"], d["b"], d["c"], d["d"], d["e"], d["f"], d["g"], d["h"])


def _canonical_witness(A: BinaryMatrix, form: Rank2Form):
    """Map a witness candidate into canonical coordinates; None on a layout
    or forced-entry violation."""
    w = A.transpose() if form.transposed else A
    if (w.rows, w.cols) != (form.row_perm.size, form.col_perm.size):
        raise ValueError("layout mismatch")
    a = apply_perms(w, form.row_perm, form.col_perm).int64()
    d = form.as_dict()
    pad_r = form.row_perm.size - sum(_row_group_sizes(form.mtype, d))
    pad_c = form.col_perm.size - sum(d[n] for n in _M_LAYOUT[form.mtype][0])
    e = canonical_rank2_E(form.mtype, d, pad_r, pad_c).int64()
    if not np.isin(a + e, (0, 1)).all():
        return None
    return a, e


def _const_signed_sum(block: np.ndarray, n1: int):
    """Constant value of (left sum - right sum) over rows, or None."""
    if block.shape[0] == 0:
        return None
    sig = block[:, :n1].sum(axis=1) - block[:, n1:].sum(axis=1)
    if (sig == sig[0]).all():
        return int(sig[0])
    return "nonconstant"


def rank2_witness_check(A: BinaryMatrix, form: Rank2Form):
    """Exact block-sum conditions for (A, A+E) to be a Gram pair.

    Returns a boolean for M1-M4 and a (boolean, profile) pair for M5, where
    the profile carries the constant block sums (None entries for absent
    groups; no profile when some sum is non-constant).
    """
    canon = _canonical_witness(A, form)
    d = form.as_dict()
    core_m = sum(_row_group_sizes(form.mtype, d))
    core_n = sum(d[n] for n in _M_LAYOUT[form.mtype][0])

    def border_ok(a, e):
        # padding rows/columns of E are zero, but their entries of A must
        # not disturb either Gram product
        ec = e[:core_m, :core_n]
        x1 = a[:core_m, core_n:]
        x2 = a[core_m:, :core_n]
        return not (ec @ x2.T).any() and not (ec.T @ x1).any()

    if form.mtype != "M5":
        if canon is None:
            return False
        a, e = canon
        k, l, ia, ib, ic, id_, ie, if_, ig, ih = _as_m4_indices(form)
        off_e = ia + ib + ic + id_
        off_g = off_e + ie + if_
        x = a[: 2 * k, off_g : off_g + ig + ih]
        y = a[2 * k : 2 * k + 2 * l, off_e : off_e + ie + if_]
        ok = (
            (x[:k].sum(axis=0) == x[k:].sum(axis=0)).all()
            and (y[:l].sum(axis=0) == y[l:].sum(axis=0)).all()
        )
        if ig + ih:
            sig = x[:, :ig].sum(axis=1) - x[:, ig:].sum(axis=1)
            ok = ok and (2 * sig == ig - ih).all()
        if ie + if_:
            sig = y[:, :ie].sum(axis=1) - y[:, ie:].sum(axis=1)
            ok = ok and (2 * sig == ie - if_).all()
        ok = bool(ok) and border_ok(a, e)
        _assert_matches_oracle(a, e, ok)
        return ok

    if canon is None:
        return False, None
    a, e = canon
    k, l, p, q, r, s = (d[n] for n in ("k", "l", "p", "q", "r", "s"))
    ia, ib, ic, id_, ie, if_ = (d[n] for n in ("a", "b", "c", "d", "e", "f"))
    ro = np.cumsum([0, k, l, p, q, r, s])
    co = np.cumsum([0, ia, ib, ic, id_, ie, if_])
    X = a[ro[0] : ro[2], co[4] : co[6]]
    Y = a[ro[2] : ro[4], co[2] : co[4]]
    Z = a[ro[4] : ro[6], co[0] : co[2]]

    x1 = _const_signed_sum(X[:k], ie)
    x2 = _const_signed_sum(X[k:], ie)
    y1 = _const_signed_sum(Y[:p], ic)
    y2 = _const_signed_sum(Y[p:], ic)
    z1 = _const_signed_sum(Z[:r], ia)
    z2 = _const_signed_sum(Z[r:], ia)
    a1 = _const_signed_sum(X.T[:ie], k)
    a2 = _const_signed_sum(X.T[ie:], k)
    b1 = _const_signed_sum(Y.T[:ic], p)
    b2 = _const_signed_sum(Y.T[ic:], p)
    g1 = _const_signed_sum(Z.T[:ia], r)
    g2 = _const_signed_sum(Z.T[ia:], r)
    params = (x1, x2, y1, y2, z1, z2, a1, a2, b1, b2, g1, g2)
    if "nonconstant" in params:
        ok = False
        profile = None
    else:
        profile = Rank2WitnessProfile(*params)

        def eq(u, v, sign=1):
            if u is None or v is None:
                return True
            return u == sign * v

        def su(u, v, total):
            if u is None or v is None:
                return True
            return u + v == total

        ok = all(
            [
                eq(x1, y2), eq(x1, z2, -1), eq(y2, z2, -1),
                eq(x2, y1), eq(x2, z1, -1), eq(y1, z1, -1),
                su(x1, x2, ie - if_), su(y1, y2, ie - if_), su(z1, z2, if_ - ie),
                eq(g1, b2), eq(g1, a2, -1), eq(b2, a2, -1),
                eq(g2, b1), eq(g2, a1, -1), eq(b1, a1, -1),
                su(a1, a2, k - l), su(b1, b2, l - k), su(g1, g2, l - k),
            ]
        ) and border_ok(a, e)
    _assert_matches_oracle(a, e, ok)
    return ok, profile


def _assert_matches_oracle(a: np.ndarray, e: np.ndarray, verdict: bool):
    pair = is_gram_pair(
        BinaryMatrix(a.astype(np.int8)), BinaryMatrix((a + e).astype(np.int8))
    )
    assert verdict == (pair is not None), "block-sum conditions disagree with the Gram oracle"


# ---------------------------------------------------------------------------
# rank 2: closed-form Gram singular data


def _eig2(m11: Fraction, m12: Fraction, m21: Fraction, m22: Fraction):
    """Eigenvalues (desc) and eigenvectors of a real 2x2 with real spectrum."""
    tr = m11 + m22
    disc = (m11 - m22) ** 2 + 4 * m12 * m21
    if disc < 0:
        raise RuntimeError("closed-form 2x2 matrix has complex eigenvalues")
    root = math.sqrt(float(disc))
    lams = [(float(tr) + root) / 2.0, (float(tr) - root) / 2.0]
    vecs = []
    for lam in lams:
        cand1 = np.array([float(m12), lam - float(m11)])
        cand2 = np.array([lam - float(m22), float(m21)])
        v = cand1 if np.abs(cand1).max() >= np.abs(cand2).max() else cand2
        if np.abs(v).max() < 1e-12:
            v = np.array([1.0, 0.0]) if lam == lams[0] else np.array([0.0, 1.0])
        vecs.append(v / np.linalg.norm(v))
    return lams, vecs, float(disc)


def _x_vectors(form: Rank2Form):
    d = form.as_dict()
    if form.mtype == "M5":
        ia, ib, ic, id_, ie, if_ = (d[n] for n in ("a", "b", "c", "d", "e", "f"))
        x1 = np.concatenate(
            [np.ones(ia), -np.ones(ib), np.ones(ic), -np.ones(id_), np.zeros(ie + if_)]
        )
        x2 = np.concatenate(
            [np.ones(ia), -np.ones(ib), np.zeros(ic + id_), np.ones(ie), -np.ones(if_)]
        )
        return x1, x2
    k, l, ia, ib, ic, id_, ie, if_, ig, ih = _as_m4_indices(form)
    x1 = np.concatenate(
        [np.ones(ia), np.ones(ib), -np.ones(ic), -np.ones(id_), np.ones(ie), -np.ones(if_), np.zeros(ig + ih)]
    )
    x2 = np.concatenate(
        [np.ones(ia), -np.ones(ib), np.ones(ic), -np.ones(id_), np.zeros(ie + if_), np.ones(ig), -np.ones(ih)]
    )
    return x1, x2


def rank2_gram_data(form: Rank2Form, profile: Rank2WitnessProfile | None = None) -> GramSingularReport:
    """Closed-form Gram singular values and vectors.

    M1-M4 pairs are always convertible.  For M5 a witness profile is
    required and must satisfy the constant-sum convertibility criterion.
    """
    d = form.as_dict()
    if form.mtype == "M5":
        if profile is None:
            raise ValueError("M5 Gram data needs a witness profile")
        targets = [
            (profile.x1, d["e"] - d["f"]), (profile.x2, d["e"] - d["f"]),
            (profile.y1, d["c"] - d["d"]), (profile.y2, d["c"] - d["d"]),
            (profile.z1, d["a"] - d["b"]), (profile.z2, d["a"] - d["b"]),
            (profile.alpha1, d["k"] - d["l"]), (profile.alpha2, d["k"] - d["l"]),
            (profile.beta1, d["p"] - d["q"]), (profile.beta2, d["p"] - d["q"]),
            (profile.gamma1, d["r"] - d["s"]), (profile.gamma2, d["r"] - d["s"]),
        ]
        defined = [(val, diff) for val, diff in targets if val is not None]
        if not all(2 * val == diff for val, diff in defined):
            raise NotConvertibleError("witness profile fails the constant-sum criterion")
        k, l, p, q, r, s = (Fraction(d[n]) for n in ("k", "l", "p", "q", "r", "s"))
        ia, ib, ic, id_, ie, if_ = (Fraction(d[n]) for n in ("a", "b", "c", "d", "e", "f"))
        m11 = l * (ia + ic) + s * (ic + id_) / 2 + (k - l) * (ia + ib) / 4
        m12 = l * (ia + ib) / 2 - s * (ie + if_) / 2 + (k - l) * (ia + ie) / 2
        m21 = q * (ia + ib) / 2 - r * (ic + id_) / 2 + (p - q) * (ia + ic) / 2
        m22 = q * (ia + ie) + r * (ie + if_) / 2 + (p - q) * (ia + ib) / 4
    else:
        k, l, ia, ib, ic, id_, ie, if_, ig, ih = (Fraction(t) for t in _as_m4_indices(form))
        m11 = k * (ia + ib + ie)
        m12 = k * (ia - ib - ic + id_) / 2
        m21 = l * (ia - ib - ic + id_) / 2
        m22 = l * (ia + ic + ig)

    lams, zetas, disc = _eig2(m11, m12, m21, m22)
    if any(lam <= 0 for lam in lams):
        raise RuntimeError("closed-form eigenvalues must be positive for rank 2")
    x1, x2 = _x_vectors(form)
    if disc == 0.0:
        # repeated value: orthonormalize within the span
        v1 = x1 / np.linalg.norm(x1)
        v2 = x2 - (v1 @ x2) * v1
        v2 = v2 / np.linalg.norm(v2)
        rights = [v1, v2]
    else:
        rights = []
        for z in zetas:
            v = z[0] * x1 + z[1] * x2
            rights.append(v / np.linalg.norm(v))

    pad_c = form.col_perm.size - len(x1)
    pad_r = form.row_perm.size - sum(_row_group_sizes(form.mtype, d))
    e_can = canonical_rank2_E(form.mtype, d).int64().astype(np.float64)
    values, rv, lv = [], [], []
    for lam, v in zip(lams, rights):
        sigma = math.sqrt(lam)
        nz = np.nonzero(np.abs(v) > 1e-8)[0]
        if len(nz) and v[nz[0]] < 0:
            v = -v
        u = (-0.5 * e_can) @ v / sigma
        values.append(sigma)
        rv.append(np.concatenate([v, np.zeros(pad_c)])[_inv_order(form.col_perm)])
        lv.append(np.concatenate([u, np.zeros(pad_r)])[_inv_order(form.row_perm)])
    right = np.column_stack(rv)
    left = np.column_stack(lv)
    if form.transposed:
        right, left = left, right
    return GramSingularReport(
        values=tuple(values),
        right_vectors=right,
        left_vectors=left,
        source="closed_form_rank2",
    )


def _inv_order(perm: Permutation) -> list[int]:
    """Index array taking a canonical-coordinates vector back to original."""
    return list(perm.image)
