import pytest

from koszulrank.errors import InvalidArgument, SearchExhausted
from koszulrank.exact import SubmatrixCertificate, find_unit_submatrix, verify_submatrix
from koszulrank.exact.param import param_flattening
from koszulrank.flattening import rkf_matrix
from koszulrank.sparse import SparseMatrix
from koszulrank.tensor import det_tensor, perm_tensor


def test_identity_minor():
    c = find_unit_submatrix(SparseMatrix.identity(3), 2)
    assert c.size == 2 and c.rows == c.cols and c.det == 1
    assert verify_submatrix(SparseMatrix.identity(3), c)


def test_perm4_unit_minor():
    m = rkf_matrix(perm_tensor(4))
    c = find_unit_submatrix(m, 70)
    assert c.size == 70 and abs(c.det) == 1
    assert verify_submatrix(m, c)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_residue_targets_det4_family(p):
    m = param_flattening(det_tensor(4), [[{1: 1}, {2: 1}, {3: 1}, {4: "x"}]]).evaluate({"x": 1})
    c = find_unit_submatrix(m, 91, p, target=2**20, seed=1, retries=60)
    assert c.size == 91 and c.det % p in {2**20 % p, -2**20 % p}
    assert verify_submatrix(m, c)


def test_nonzero_target():
    m = SparseMatrix.from_dense([[0, 2, 0], [3, 0, 0], [0, 0, 0]])
    c = find_unit_submatrix(m, 2, target="nonzero")
    assert abs(c.det) == 6
    with pytest.raises(SearchExhausted):
        find_unit_submatrix(m, 3, target="nonzero")


def test_unit_search_can_exhaust():
    with pytest.raises(SearchExhausted):
        find_unit_submatrix(SparseMatrix.from_dense([[2, 0], [0, 1]]), 2, retries=3)


def test_tampered_certificate_fails():
    m = rkf_matrix(perm_tensor(4))
    c = find_unit_submatrix(m, 70)
    bad = SubmatrixCertificate(c.rows, c.cols, -c.det)
    assert not verify_submatrix(m, bad)
    assert not verify_submatrix(m, SubmatrixCertificate(c.rows[:-1], c.cols, c.det))
    assert not verify_submatrix(m, SubmatrixCertificate((10**6,), (0,), 1))


def test_argument_errors():
    m = SparseMatrix.identity(3)
    with pytest.raises(InvalidArgument):
        find_unit_submatrix(m, 4)
    with pytest.raises(InvalidArgument):
        find_unit_submatrix(m, 2, target=5)
    with pytest.raises(InvalidArgument):
        find_unit_submatrix(m, 2, 7, target="bogus")
