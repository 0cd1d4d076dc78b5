import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grammate import numerics
from grammate.matrix_core import BinaryMatrix
from grammate.numerics import (
    DegenerateSpectrumError,
    SignPattern,
    SpectraMismatchError,
    distinct_singular_values,
    flip_singular_signs,
    reconstruct_from_grams,
    round_to_binary,
    svd,
)


def binary_arrays(max_dim=5):
    return st.integers(1, max_dim).flatmap(
        lambda m: st.integers(1, max_dim).flatmap(
            lambda n: st.lists(
                st.lists(st.integers(0, 1), min_size=n, max_size=n),
                min_size=m,
                max_size=m,
            )
        )
    )


class TestSvd:
    def test_identity(self):
        b = svd(np.eye(3))
        assert np.allclose(b.sigma, [1, 1, 1])
        assert np.allclose(b.compose(), np.eye(3))

    def test_known_values(self):
        # singular values of [[1,1],[0,1]] are sqrt((3 +- sqrt5)/2)
        b = svd(np.array([[1.0, 1.0], [0.0, 1.0]]))
        expect = np.sqrt((3 + np.sqrt(5) * np.array([1, -1])) / 2)
        assert np.allclose(b.sigma, expect)

    def test_deterministic(self):
        a = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
        b1, b2 = svd(a), svd(a)
        assert (b1.U == b2.U).all() and (b1.V == b2.V).all()
        assert (b1.sigma == b2.sigma).all()

    def test_wide_matrix(self):
        a = np.array([[1.0, 0.0, 1.0]])
        b = svd(a)
        assert b.U.shape == (1, 1) and b.V.shape == (3, 3)
        assert np.allclose(b.compose(), a)

    @settings(max_examples=80, deadline=None)
    @given(binary_arrays())
    def test_factorization_properties(self, rows):
        a = np.array(rows, dtype=float)
        b = svd(a)
        m, n = a.shape
        assert np.allclose(b.U @ b.U.T, np.eye(m), atol=1e-9)
        assert np.allclose(b.V @ b.V.T, np.eye(n), atol=1e-9)
        assert np.allclose(b.compose(), a, atol=1e-9)
        assert (np.diff(b.sigma) <= 1e-12).all()
        assert (b.sigma >= 0).all()
        ref = np.linalg.svd(a, compute_uv=False)
        assert np.allclose(b.sigma[: len(ref)], ref, atol=1e-9)


class TestFlipSigns:
    def test_exchange_to_identity(self):
        # flipping the lone positive value of (A-B)/2 maps (A+B)/2 back to B
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        b = np.eye(2)
        flipped = flip_singular_signs((a - b) / 2, SignPattern([True]))
        assert np.allclose((a + b) / 2 + flipped, b)

    def test_pattern_length_checked(self):
        with pytest.raises(ValueError):
            flip_singular_signs(np.eye(2), SignPattern([True]))

    def test_at_least_one_flip(self):
        with pytest.raises(ValueError):
            flip_singular_signs(np.eye(2), SignPattern([False, False]))


class TestRoundToBinary:
    def test_near_binary(self):
        m = round_to_binary(np.array([[1.0 - 1e-12, 1e-12]]))
        assert m == BinaryMatrix(np.array([[1, 0]]))

    def test_rejects_half(self):
        assert round_to_binary(np.array([[0.5]])) is None

    def test_rejects_two(self):
        assert round_to_binary(np.array([[2.0]])) is None


class TestDistinctSingularValues:
    def test_identity_not_distinct(self):
        assert not distinct_singular_values(BinaryMatrix.identity(2))

    def test_distinct(self):
        assert distinct_singular_values(BinaryMatrix(np.array([[1, 1], [0, 1]])))


class TestReconstruct:
    def test_recovers_matrix(self):
        a = np.array([[1, 1], [0, 1]], dtype=np.int64)
        out = reconstruct_from_grams(a @ a.T, a.T @ a)
        assert BinaryMatrix(a.astype(np.int8)) in out
        for m in out:
            b = m.int64()
            assert (b @ b.T == a @ a.T).all() and (b.T @ b == a.T @ a).all()

    def test_mates_recovered_together(self, rank1_example):
        A, B, _ = rank1_example
        a = A.int64()
        out = reconstruct_from_grams(a @ a.T, a.T @ a)
        assert A in out and B in out

    def test_spectra_mismatch(self):
        with pytest.raises(SpectraMismatchError):
            reconstruct_from_grams(2 * np.eye(2, dtype=int), 3 * np.eye(2, dtype=int))

    def test_degenerate_rejected(self):
        g = np.eye(2, dtype=int)
        with pytest.raises(DegenerateSpectrumError):
            reconstruct_from_grams(g, g)

    def test_non_symmetric_rejected(self):
        with pytest.raises(ValueError):
            reconstruct_from_grams(np.array([[1, 1], [0, 1]]), np.eye(2, dtype=int))


class TestScaledTol:
    def test_floor_at_one(self):
        assert numerics.scaled_tol(np.zeros((2, 2))) == numerics.DEFAULT_TOL

    def test_scales_with_norm(self):
        assert numerics.scaled_tol(5.0 * np.ones((1, 1))) == 5 * numerics.DEFAULT_TOL
