import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grammate.matrix_core import (
    BinaryMatrix,
    BlockSpec,
    MatrixFormatError,
    Permutation,
    SignedMatrix,
    apply_perms,
    col_sums,
    parse_matrix,
    rank_exact,
    row_sums,
    serialize_matrix,
)


def signed_arrays(max_dim=5, lo=-1):
    return st.integers(1, max_dim).flatmap(
        lambda m: st.integers(1, max_dim).flatmap(
            lambda n: st.lists(
                st.lists(st.integers(lo, 1), min_size=n, max_size=n),
                min_size=m,
                max_size=m,
            )
        )
    )


class TestMatrices:
    def test_entry_validation(self):
        with pytest.raises(ValueError):
            BinaryMatrix(np.array([[0, 2]]))
        with pytest.raises(ValueError):
            SignedMatrix(np.array([[-2, 0]]))
        BinaryMatrix(np.array([[0, 1]]))
        SignedMatrix(np.array([[-1, 0, 1]]))

    def test_immutability(self):
        m = BinaryMatrix.identity(2)
        with pytest.raises(ValueError):
            m.data[0, 0] = 0
        # int64() hands out a private copy
        w = m.int64()
        w[0, 0] = 5
        assert m.data[0, 0] == 1

    def test_equality_and_hash(self):
        a = BinaryMatrix(np.array([[1, 0], [0, 1]]))
        b = BinaryMatrix.identity(2)
        assert a == b and hash(a) == hash(b)
        assert a != SignedMatrix(np.array([[1, 0], [0, 1]]))

    def test_sums(self):
        m = BinaryMatrix(np.array([[1, 1, 0], [0, 1, 0]]))
        assert row_sums(m) == (2, 1)
        assert col_sums(m) == (1, 2, 0)

    def test_transpose(self):
        m = BinaryMatrix(np.array([[1, 1, 0], [0, 1, 0]]))
        assert m.transpose().shape == (3, 2)
        assert m.transpose().transpose() == m


class TestRankExact:
    def test_zero(self):
        assert rank_exact(SignedMatrix.zeros(3, 4)) == 0

    def test_identity(self):
        assert rank_exact(BinaryMatrix.identity(4)) == 4

    def test_rank_one_block(self):
        e = SignedMatrix(np.array([[1, -1], [-1, 1]]))
        assert rank_exact(e) == 1

    @settings(max_examples=60, deadline=None)
    @given(signed_arrays())
    def test_matches_numpy(self, rows):
        a = np.array(rows)
        assert rank_exact(SignedMatrix(a)) == np.linalg.matrix_rank(a.astype(float))


class TestPermutation:
    def test_bijection_required(self):
        with pytest.raises(ValueError):
            Permutation((0, 0))

    def test_inverse_compose(self):
        p = Permutation((2, 0, 1))
        assert p.compose(p.inverse()) == Permutation.identity(3)

    def test_matrix_convention(self):
        # P e_i = e_image[i]: row i of M lands at row image[i]
        p = Permutation((1, 2, 0))
        m = BinaryMatrix(np.array([[1, 1, 1], [0, 0, 0], [0, 1, 0]]))
        moved = apply_perms(m, p, Permutation.identity(3))
        assert (moved.data[1] == m.data[0]).all()
        # matches multiplication by the permutation matrix
        assert (p.matrix().int64() @ m.int64() == moved.int64()).all()

    def test_involution(self):
        assert Permutation((1, 0, 2)).is_involution()
        assert not Permutation((1, 2, 0)).is_involution()

    @settings(max_examples=30, deadline=None)
    @given(st.permutations(list(range(5))), st.permutations(list(range(4))))
    def test_apply_perms_roundtrip(self, pi, qi):
        p, q = Permutation(tuple(pi)), Permutation(tuple(qi))
        m = BinaryMatrix((np.arange(20).reshape(5, 4) % 2).astype(np.int8))
        back = apply_perms(apply_perms(m, p, q), p.inverse(), q.inverse())
        assert back == m


class TestBlockSpec:
    def test_offsets(self):
        b = BlockSpec((2, 0, 3), (1, 4))
        assert b.row_offsets() == [0, 2, 2, 5]
        assert b.col_offsets() == [0, 1, 5]

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            BlockSpec((-1,), (1,))


class TestMtxtFormat:
    def test_roundtrip_binary(self):
        m = BinaryMatrix(np.array([[1, 0], [0, 1]]))
        assert parse_matrix(serialize_matrix(m)) == m

    def test_roundtrip_signed(self):
        m = SignedMatrix(np.array([[1, -1], [-1, 1]]))
        assert parse_matrix(serialize_matrix(m)) == m

    def test_comments_and_blank_lines(self):
        text = "# difference matrix\n\n2 2\n1 -1\n\n-1 1\n"
        assert parse_matrix(text) == SignedMatrix(np.array([[1, -1], [-1, 1]]))

    @pytest.mark.parametrize(
        "bad",
        [
            "",
            "2\n1 1\n1 1",
            "2 2\n1 1\n1",
            "2 2\n1 1\n1 2",
            "2 2\n1 1\n1 x",
            "1 1\n1\n1",
            "0 2\n",
        ],
    )
    def test_malformed(self, bad):
        with pytest.raises(MatrixFormatError):
            parse_matrix(bad)

    @settings(max_examples=40, deadline=None)
    @given(signed_arrays(max_dim=6))
    def test_roundtrip_property(self, rows):
        a = np.array(rows, dtype=np.int8)
        m = BinaryMatrix(a) if (a >= 0).all() else SignedMatrix(a)
        assert parse_matrix(serialize_matrix(m)) == m
