import pathlib

import pytest

from grammate.matrix_core import load_matrix

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def fixture_matrix(name):
    return load_matrix(FIXTURES / name)


@pytest.fixture
def rank1_example():
    """The 7x7 rank-1 pair (A, B = A+E) and its difference E."""
    return (
        fixture_matrix("ex_rank1_A.mtxt"),
        fixture_matrix("ex_rank1_B.mtxt"),
        fixture_matrix("ex_rank1_E.mtxt"),
    )


@pytest.fixture
def same_entries_example():
    """The 10x10 pair whose row/column sum vectors share entries across blocks."""
    return (
        fixture_matrix("ex_same_entries_A.mtxt"),
        fixture_matrix("ex_same_entries_E.mtxt"),
    )
