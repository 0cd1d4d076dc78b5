import itertools

import numpy as np
import pytest

from grammate.gram import (
    CHECK_NAMES,
    convertibility,
    embed_check,
    is_gram_pair,
    is_realizable_witness,
)
from grammate.matrix_core import BinaryMatrix, SignedMatrix

EXCHANGE = BinaryMatrix(np.array([[0, 1], [1, 0]]))
I2 = BinaryMatrix.identity(2)


def perm_matrix(img):
    m = np.zeros((len(img), len(img)), dtype=np.int8)
    for i, j in enumerate(img):
        m[j, i] = 1
    return BinaryMatrix(m)


class TestIsGramPair:
    def test_exchange_identity(self):
        p = is_gram_pair(EXCHANGE, I2)
        assert p is not None and p.diff_rank == 1

    def test_equal_is_not_pair(self):
        assert is_gram_pair(I2, I2) is None

    def test_gram_identity_must_hold(self):
        assert is_gram_pair(I2, BinaryMatrix.ones(2, 2)) is None

    def test_paper_example(self, rank1_example):
        A, B, E = rank1_example
        p = is_gram_pair(A, B)
        assert p is not None and p.diff_rank == 1
        # diff() is A - B; the fixture E is B - A
        assert (p.diff().int64() == -E.int64()).all()

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            is_gram_pair(I2, BinaryMatrix.ones(2, 3))

    def test_mates_of_identity_are_permutations(self):
        # every non-identity permutation matrix is a mate of I
        for img in itertools.permutations(range(3)):
            P = perm_matrix(img)
            expected = P != BinaryMatrix.identity(3)
            assert (is_gram_pair(BinaryMatrix.identity(3), P) is not None) == expected


class TestRealizableWitness:
    def test_paper_examples(self, rank1_example, same_entries_example):
        A, _, E = rank1_example
        assert is_realizable_witness(E, A)
        A10, E10 = same_entries_example
        assert is_realizable_witness(E10, A10)

    def test_zero_matrix_never_realizable(self):
        # A + 0 = A is not distinct from A
        assert not is_realizable_witness(SignedMatrix.zeros(2, 2), EXCHANGE)

    def test_sum_must_stay_binary(self):
        e = SignedMatrix(np.array([[1, -1], [-1, 1]]))
        with pytest.raises(ValueError):
            is_realizable_witness(e, BinaryMatrix.ones(2, 2))


class TestEmbedCheck:
    def test_zero_borders_pass(self):
        e = SignedMatrix(np.array([[1, -1], [-1, 1]]))
        assert embed_check(e, BinaryMatrix.zeros(2, 3), BinaryMatrix.zeros(3, 2))

    def test_paper_borders(self, rank1_example):
        A, _, E = rank1_example
        et = SignedMatrix(E.data[:4, :4])
        x1 = BinaryMatrix(A.data[:4, 4:])
        x2 = BinaryMatrix(A.data[4:, :4])
        assert embed_check(et, x1, x2)

    def test_violating_border(self):
        e = SignedMatrix(np.array([[1, -1], [-1, 1]]))
        x1 = BinaryMatrix(np.array([[1], [0]]))
        assert not embed_check(e, x1, BinaryMatrix.zeros(1, 2))


class TestConvertibility:
    def test_paper_example(self, rank1_example):
        A, B, _ = rank1_example
        rep = convertibility(is_gram_pair(A, B))
        assert rep.convertible
        assert tuple(rep.checks) == CHECK_NAMES
        assert all(rep.checks.values())
        assert abs(rep.gram_singular.values[0] - 2.0) < 1e-9
        v = rep.gram_singular.right_vectors[:, 0]
        target = np.array([1, 1, -1, -1, 0, 0, 0]) / 2.0
        assert np.abs(np.abs(v) - np.abs(target)).max() < 1e-8

    def test_identity_mates_convertible_iff_symmetric(self):
        # mates of I are permutation matrices; convertible exactly when symmetric
        I4 = BinaryMatrix.identity(4)
        for img in itertools.permutations(range(4)):
            P = perm_matrix(img)
            pair = is_gram_pair(I4, P)
            if pair is None:
                continue
            rep = convertibility(pair)
            assert rep.convertible == (P.data == P.data.T).all()
            assert len(set(rep.checks.values())) == 1

    def test_gram_singular_only_when_convertible(self):
        pair = is_gram_pair(BinaryMatrix.identity(3), perm_matrix((1, 2, 0)))
        rep = convertibility(pair)
        assert not rep.convertible and rep.gram_singular is None

    def test_all_pairs_agree_3x3(self):
        # oracle-style sweep: the seven checks never disagree
        mats = [
            BinaryMatrix(np.array(bits, dtype=np.int8).reshape(3, 3))
            for bits in itertools.product((0, 1), repeat=9)
        ]
        groups = {}
        for m in mats:
            a = m.int64()
            key = (a @ a.T).tobytes() + (a.T @ a).tobytes()
            groups.setdefault(key, []).append(m)
        checked = 0
        for grp in groups.values():
            for x, y in itertools.combinations(grp, 2):
                rep = convertibility(is_gram_pair(x, y))
                assert len(set(rep.checks.values())) == 1
                checked += 1
        assert checked > 50
