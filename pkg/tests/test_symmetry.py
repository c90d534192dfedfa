import random
from math import factorial

import pytest

from koszulrank.errors import InvalidArgument
from koszulrank.exact import rank_mod_p, rank_rational
from koszulrank.exterior import BasisElement, ProductBasis, WedgeIndex
from koszulrank.flattening import FlatteningPlan, rkf_matrix
from koszulrank.sparse import SparseMatrix
from koszulrank.symmetry import (Permutation, SignedBasisElement, act, connected_components, equivariance_check,
                                 orbit_classes, symmetric_group, symmetric_rank)
from koszulrank.tensor import Tensor, det_tensor, perm_tensor

P = 1000003

EXAMPLE = SparseMatrix.from_dense([
    [1, 0, 0, 2, 0, 0, 0],
    [0, 3, 0, 0, 0, 0, 4],
    [0, 0, 0, 5, 0, 6, 0],
    [0] * 7,
    [0, 0, 0, 0, 7, 0, 8],
    [0, 0, 0, 0, 0, 9, 0],
])


def col_basis(n):
    return ProductBasis(FlatteningPlan.default(n).column_shape((n,) * n))


def test_act_example():
    shape = col_basis(4).shape
    x = BasisElement((WedgeIndex(4, (1,)), WedgeIndex(4, (1, 2)), 3), shape)
    y = act(Permutation.cycle(4, 1, 2), x)
    assert y.sign == -1
    assert y.element == BasisElement((WedgeIndex(4, (2,)), WedgeIndex(4, (1, 2)), 3), shape)
    assert act(Permutation.identity(4), x) == SignedBasisElement(1, x)


def test_permutation_basics():
    s = Permutation((2, 3, 1))
    assert s(1) == 2 and (s * s.inverse()).is_identity()
    assert s.sign() == 1 and Permutation.cycle(3, 1, 2).sign() == -1
    assert len(list(symmetric_group(4))) == 24
    with pytest.raises(InvalidArgument):
        Permutation((1, 1, 2))


@pytest.mark.parametrize("n", [3, 4])
def test_group_action_laws_exhaustive(n):
    basis = list(col_basis(n))
    group = list(symmetric_group(n))
    for x in basis:
        assert act(Permutation.identity(n), x) == SignedBasisElement(1, x)
        for s in group:
            sx = act(s, x)
            for t in group:
                assert act(t, sx) == act(t * s, x)


def test_group_action_laws_random_n5():
    rnd = random.Random(1)
    basis = col_basis(5)
    for _ in range(100):
        s, t = (Permutation(tuple(rnd.sample(range(1, 6), 5))) for _ in range(2))
        x = basis[rnd.randrange(basis.size)]
        assert act(s, act(t, x)) == act(s * t, x)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_equivariance_all_columns(n):
    plan = FlatteningPlan.default(n)
    for sigma in (Permutation.cycle(n, 1, 2), Permutation.cycle(n, 1, 2, 3), Permutation.cycle(n, *range(1, n + 1))):
        assert equivariance_check(perm_tensor(n), plan, sigma)
        assert equivariance_check(det_tensor(n), plan, sigma)
        assert equivariance_check(det_tensor(n), plan, sigma, character=sigma.sign())


def test_det_character_matters():
    plan = FlatteningPlan.default(4)
    assert not equivariance_check(det_tensor(4), plan, Permutation.cycle(4, 1, 2), character=1)
    assert equivariance_check(det_tensor(4), plan, Permutation.cycle(4, 1, 2, 3), character=1)
    assert not equivariance_check(Tensor((4,) * 4, {(1, 2, 3, 4): 1}), plan, Permutation.cycle(4, 1, 2))


def test_example_matrix_components():
    dec = connected_components(EXAMPLE)
    assert [(c.cols, c.rows) for c in dec.components] == [((0, 3, 5), (0, 2, 5)), ((1, 4, 6), (1, 4))]
    assert dec.orphan_cols == (2,) and dec.orphan_rows == (3,)
    assert sum(rank_rational(c.matrix) for c in dec.components) == 5 == rank_mod_p(EXAMPLE, P)


def test_trivial_decompositions():
    dec = connected_components(SparseMatrix.identity(3))
    assert [c.shape for c in dec.components] == [(1, 1)] * 3
    dec = connected_components(SparseMatrix(2, 3))
    assert dec.components == [] and dec.orphan_cols == (0, 1, 2)


@pytest.mark.parametrize("make", [perm_tensor, det_tensor])
def test_nnz_partition_and_rank_additivity(make):
    m = rkf_matrix(make(4))
    dec = connected_components(m)
    assert sum(c.matrix.nnz for c in dec.components) == m.nnz
    assert sum(rank_mod_p(c.matrix, P) for c in dec.components) == rank_mod_p(m, P)


def test_orbit_classes_m4():
    m = rkf_matrix(perm_tensor(4))
    dec = connected_components(m)
    classes = orbit_classes(m, 4, dec, p=P)
    assert not dec.orphan_cols
    assert sum(factorial(4) // len(c.stabilizer) * len(dec.components[c.component].cols) for c in classes) == 96
    assert all(24 % len(c.stabilizer) == 0 for c in classes)
    assert sum(c.class_size * rank_mod_p(dec.components[c.component].matrix, P) for c in classes) == 70


def test_component_rank_invariant_under_transport():
    m = rkf_matrix(perm_tensor(4))
    dec = connected_components(m)
    cb = m.col_labels
    kinds = tuple(f.kind == "wedge" for f in cb.shape)
    comp_of = dec.component_of_col()
    rnd = random.Random(4)
    from koszulrank.symmetry import act_raw
    for k, comp in enumerate(dec.components):
        r = rank_mod_p(comp.matrix, P)
        for _ in range(10):
            s = Permutation(tuple(rnd.sample(range(1, 5), 4)))
            _, img = act_raw(s.images, kinds, cb.raw(comp.representative))
            other = dec.components[comp_of[cb.raw_index(img)]]
            assert other.shape == comp.shape and rank_mod_p(other.matrix, P) == r


def test_orbit_classes_need_labels():
    with pytest.raises(InvalidArgument):
        orbit_classes(EXAMPLE, 3)


@pytest.mark.parametrize("n,rank", [(3, 8), (4, 70), (5, 1426), (6, 70692)])
def test_symmetric_rank_perm(n, rank):
    assert symmetric_rank(perm_tensor(n), None, P).rank == rank


@pytest.mark.parametrize("n", [3, 4, 5])
def test_symmetric_rank_matches_direct(n):
    for make in (perm_tensor, det_tensor):
        t = make(n)
        assert symmetric_rank(t, None, P).rank == rank_mod_p(rkf_matrix(t), P)


def test_symmetric_rank_det4_and_report():
    res = symmetric_rank(det_tensor(4), None, P)
    assert res.rank == 96 == rank_rational(rkf_matrix(det_tensor(4)))
    assert res.report().splitlines()[-1].endswith("= 96")
    assert res.size == (96, 96)


def test_checkpoint_resume(tmp_path):
    path = tmp_path / "ck.jsonl"
    first = symmetric_rank(perm_tensor(5), None, P, checkpoint=path)
    lines = path.read_text().splitlines()
    assert len(lines) >= len(first.classes)
    again = symmetric_rank(perm_tensor(5), None, P, checkpoint=path)
    assert again.rank == first.rank == 1426
    assert path.read_text().splitlines()[: len(lines)] == lines


def test_threads_give_same_result():
    a = symmetric_rank(perm_tensor(5), None, P)
    b = symmetric_rank(perm_tensor(5), None, P, threads=2)
    assert [c.as_dict() for c in a.classes] == [c.as_dict() for c in b.classes]
