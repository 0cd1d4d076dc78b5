"""
Small dense singular value decomposition and its uses: flipping signs of
singular values, distinct-spectrum detection, and reconstructing (0,1)
matrices from their two Gram projections.

The SVD is one-sided Jacobi with a fixed sweep order, so identical inputs
produce bitwise-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix_core import BinaryMatrix

DEFAULT_TOL = 1e-9
DEFAULT_REL_TOL = 1e-8

_JACOBI_SWEEPS = 60
_JACOBI_EPS = 1e-12


class ConvergenceError(RuntimeError):
    """Jacobi sweeps failed to converge within the iteration cap."""


class DegenerateSpectrumError(ValueError):
    """A positive eigenvalue has multiplicity > 1; reconstruction unsupported."""


class SpectraMismatchError(ValueError):
    """Nonzero spectra of the two Gram matrices disagree."""


def _as_float(A) -> np.ndarray:
    if isinstance(A, np.ndarray):
        return A.astype(np.float64)
    if hasattr(A, "data"):
        return A.data.astype(np.float64)
    return np.array(A, dtype=np.float64)


def scaled_tol(A, tol: float | None = None) -> float:
    """Absolute tolerance scaled by the max-norm of A."""
    base = DEFAULT_TOL if tol is None else tol
    a = _as_float(A)
    return base * max(1.0, float(np.abs(a).max()))


@dataclass(frozen=True)
class SvdBundle:
    """Full SVD factors: A = U diag(sigma) V^T with U, V square orthogonal."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    tol: float

    @property
    def rank(self) -> int:
        return int((self.sigma >= self.tol).sum())

    def compose(self, signs=None) -> np.ndarray:
        """Rebuild U S Sigma V^T, optionally negating selected values."""
        m, n = self.U.shape[0], self.V.shape[0]
        s = self.sigma.copy()
        if signs is not None:
            s = s * np.asarray(signs, dtype=np.float64)
        S = np.zeros((m, n))
        np.fill_diagonal(S, s)
        return self.U @ S @ self.V.T


@dataclass(frozen=True)
class SignPattern:
    """Which positive singular values to negate."""

    mask: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "mask", tuple(bool(b) for b in self.mask))


def _complete_basis(cols: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal columns to a full orthonormal basis of R^dim."""
    basis = [cols[:, j] for j in range(cols.shape[1])]
    for i in range(dim):
        if len(basis) == dim:
            break
        v = np.zeros(dim)
        v[i] = 1.0
        for b in basis:
            v = v - (b @ v) * b
        nrm = float(np.linalg.norm(v))
        if nrm > 1e-8:
            basis.append(v / nrm)
    return np.column_stack(basis)


def _jacobi_tall(A: np.ndarray):
    """One-sided Jacobi for m >= n; returns (U_full m x m, sigma, V n x n)."""
    m, n = A.shape
    W = A.copy()
    V = np.eye(n)
    scale = max(1.0, float(np.abs(A).max()))
    # columns this small are numerically zero; rotating against them stagnates
    col_floor = (1e-13 * scale) ** 2
    for _ in range(_JACOBI_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = float(W[:, p] @ W[:, p])
                beta = float(W[:, q] @ W[:, q])
                gamma = float(W[:, p] @ W[:, q])
                if min(alpha, beta) <= col_floor:
                    continue
                if abs(gamma) <= _JACOBI_EPS * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                if zeta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                wp = W[:, p].copy()
                W[:, p] = c * wp - s * W[:, q]
                W[:, q] = s * wp + c * W[:, q]
                vp = V[:, p].copy()
                V[:, p] = c * vp - s * V[:, q]
                V[:, q] = s * vp + c * V[:, q]
        if not rotated:
            break
    else:
        raise ConvergenceError(f"no convergence in {_JACOBI_SWEEPS} sweeps")

    sigma = np.sqrt(np.maximum(0.0, (W * W).sum(axis=0)))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    W = W[:, order]
    V = V[:, order]
    cutoff = _JACOBI_EPS * max(1.0, float(sigma[0]) if n else 1.0)
    ucols = [W[:, j] / sigma[j] for j in range(n) if sigma[j] > cutoff]
    if ucols:
        U = _complete_basis(np.column_stack(ucols), m)
    else:
        U = np.eye(m)
    return U, sigma, V


def svd(A, tol: float | None = None) -> SvdBundle:
    """Deterministic full SVD of a small dense matrix."""
    a = _as_float(A)
    t = scaled_tol(a, tol)
    m, n = a.shape
    if m >= n:
        U, sigma, V = _jacobi_tall(a)
    else:
        V, sigma, U = _jacobi_tall(a.T)
    return SvdBundle(U=U, sigma=sigma, V=V, tol=t)


def flip_singular_signs(A, pattern: SignPattern, tol: float | None = None) -> np.ndarray:
    """Negate the selected positive singular values of A and recompose."""
    bundle = svd(A, tol)
    r = bundle.rank
    if len(pattern.mask) != r:
        raise ValueError(f"pattern length {len(pattern.mask)} != {r} positive values")
    if not any(pattern.mask):
        raise ValueError("pattern must select at least one singular value")
    signs = np.ones(len(bundle.sigma))
    for i, flip in enumerate(pattern.mask):
        if flip:
            signs[i] = -1.0
    return bundle.compose(signs)


def round_to_binary(B, tol: float | None = None):
    """Entrywise-nearest (0,1) matrix, or None when some entry is not
    within tolerance of {0,1}."""
    b = _as_float(B)
    t = DEFAULT_TOL if tol is None else tol
    t = max(t, 1e-12)
    rounded = np.rint(b)
    if np.abs(b - rounded).max() > t:
        return None
    if not np.isin(rounded, (0.0, 1.0)).all():
        return None
    return BinaryMatrix(rounded.astype(np.int8))


def distinct_singular_values(A, rel_tol: float | None = None) -> bool:
    """True iff consecutive sorted singular values are well separated."""
    rt = DEFAULT_REL_TOL if rel_tol is None else rel_tol
    sigma = svd(A).sigma
    for i in range(len(sigma) - 1):
        if sigma[i] - sigma[i + 1] <= rt * max(1.0, float(sigma[i])):
            return False
    return True


def _canonical_sign(vecs: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so the first sizable component is positive."""
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.nonzero(np.abs(col) > 1e-8)[0]
        if len(nz) and col[nz[0]] < 0:
            out[:, j] = -col
    return out


def _positive_eigs(G: np.ndarray, tol: float):
    vals, vecs = np.linalg.eigh(G)
    keep = vals > tol
    return vals[keep], _canonical_sign(vecs[:, keep])


def reconstruct_from_grams(G_row, G_col, tol: float | None = None) -> list[BinaryMatrix]:
    """All (0,1) matrices B with BB^T = G_row and B^T B = G_col.

    Requires simple positive spectra.  Eigendecomposes both Grams, pairs the
    positive eigenvectors, and searches all 2^r sign assignments; every
    returned matrix is verified exactly in integers.
    """
    Gr = np.array(G_row, dtype=np.int64)
    Gc = np.array(G_col, dtype=np.int64)
    if Gr.shape[0] != Gr.shape[1] or Gc.shape[0] != Gc.shape[1]:
        raise ValueError("Gram matrices must be square")
    if (Gr != Gr.T).any() or (Gc != Gc.T).any():
        raise ValueError("Gram matrices must be symmetric")
    scale = max(1.0, float(np.abs(Gr).max()), float(np.abs(Gc).max()))
    t = (DEFAULT_TOL if tol is None else tol) * scale

    rvals, rvecs = _positive_eigs(Gr.astype(np.float64), t)
    cvals, cvecs = _positive_eigs(Gc.astype(np.float64), t)
    if len(rvals) != len(cvals) or (len(rvals) and np.abs(rvals - cvals).max() > t):
        raise SpectraMismatchError("spectra mismatch")
    for vals in (rvals, cvals):
        for i in range(len(vals) - 1):
            if vals[i + 1] - vals[i] <= t:
                raise DegenerateSpectrumError("degenerate spectrum unsupported")

    r = len(rvals)
    roots = np.sqrt(rvals)
    found: set[BinaryMatrix] = set()
    for bits in range(1 << r):
        B = np.zeros((Gr.shape[0], Gc.shape[0]))
        for i in range(r):
            s = -1.0 if (bits >> i) & 1 else 1.0
            B += s * roots[i] * np.outer(rvecs[:, i], cvecs[:, i])
        cand = round_to_binary(B, 1e-6)
        if cand is None:
            continue
        b = cand.int64()
        if (b @ b.T == Gr).all() and (b.T @ b == Gc).all():
            found.add(cand)
    return sorted(found, key=lambda M: tuple(M.data.flatten().tolist()))
