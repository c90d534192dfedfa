from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from koszulrank.errors import BadPrime, InvalidArgument
from koszulrank.sparse import Q, SparseMatrix

entries = st.dictionaries(
    st.tuples(st.integers(0, 5), st.integers(0, 6)),
    st.fractions(min_value=-50, max_value=50, max_denominator=20).filter(bool),
    max_size=20,
)


@given(entries)
def test_rational_round_trip(ent):
    m = SparseMatrix(6, 7, ent)
    assert SparseMatrix.loads(m.dumps()) == m
    assert SparseMatrix.loads(m.dumps()).dumps() == m.dumps()


def test_prime_field_round_trip(tmp_path):
    m = SparseMatrix(3, 3, {(0, 0): 5, (2, 1): 12}, 13)
    path = tmp_path / "m.smat"
    m.save(path)
    assert path.read_text().splitlines()[0] == "%%smat 3 3 2 Fp:13"
    assert SparseMatrix.load(path) == m


def test_text_format_is_one_based_and_sorted():
    m = SparseMatrix(2, 2, {(1, 0): Fraction(-1, 3), (0, 1): 2})
    assert m.dumps() == "%%smat 2 2 2 Q\n1 2 2\n2 1 -1/3\n"


@pytest.mark.parametrize("text", ["", "%%smat 2 2 1 Q\n", "%%smat 2 2 1 R\n1 1 1\n", "smat 1 1 0 Q\n",
                                  "%%smat 2 2 1 Q\n1 1\n"])
def test_malformed_files(text):
    with pytest.raises(InvalidArgument):
        SparseMatrix.loads(text)


def test_mod_and_bad_prime():
    m = SparseMatrix(1, 2, {(0, 0): Fraction(1, 2), (0, 1): -1})
    assert m.mod(5).entries == {(0, 0): 3, (0, 1): 4}
    with pytest.raises(BadPrime):
        SparseMatrix(1, 1, {(0, 0): Fraction(1, 3)}).mod(3)


def test_zeros_are_dropped_and_submatrix():
    m = SparseMatrix.from_dense([[1, 0, 2], [0, 0, 0], [3, 4, 0]])
    assert m.nnz == 4 and m.field == Q
    assert m.submatrix([2, 0], [1, 0]).to_dense() == [[4, 3], [0, 1]]
    with pytest.raises(InvalidArgument):
        m.submatrix([0, 0], [1])
    assert m.transpose().transpose() == m
