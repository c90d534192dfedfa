import itertools
import random
from math import comb

import pytest

from koszulrank.errors import InvalidArgument
from koszulrank.exact import det_bareiss, rank_mod_p, rank_rational
from koszulrank.flattening import (FlatteningPlan, KoszulMap, border_bound, classical_flattening, divisor, kf_step,
                                   rkf_matrix)
from koszulrank.tensor import RankOneTerm, Tensor, basis_vector, det_tensor, expand_rank_one, perm_tensor

from conftest import P


def _sign_sort(seq):
    """Sign of the permutation sorting ``seq`` (distinct entries), by counting inversions."""
    inv = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inv & 1 else 1


def brute_force(t: Tensor, plan: FlatteningPlan):
    """Dense flattening built straight from the definition, with wedges as sorted tuples."""
    dims = t.dims
    col_factors = [list(itertools.combinations(range(1, dims[m - 1] + 1), p)) for m, p in plan.koszul]
    col_factors.append([(j,) for j in range(1, dims[plan.contraction - 1] + 1)])
    row_factors = [list(itertools.combinations(range(1, dims[m - 1] + 1), p + 1)) for m, p in plan.koszul]
    row_factors += [[(i,) for i in range(1, dims[m - 1] + 1)] for m in plan.passthrough + (plan.output,)]
    cols = list(itertools.product(*col_factors))
    rows = {r: k for k, r in enumerate(itertools.product(*row_factors))}
    out = [[0] * len(cols) for _ in rows]
    for j, col in enumerate(cols):
        for idx, v in t.items():
            if idx[plan.contraction - 1] != col[-1][0]:
                continue
            row = []
            for (m, _), w in zip(plan.koszul, col):
                i = idx[m - 1]
                if i in w:
                    break
                v *= _sign_sort((i,) + w)
                row.append(tuple(sorted((i,) + w)))
            else:
                row += [(idx[m - 1],) for m in plan.passthrough + (plan.output,)]
                out[rows[tuple(row)]][j] += v
    return out


def random_plan(rnd, d, dims):
    modes = list(range(1, d + 1))
    rnd.shuffle(modes)
    c, o = modes[0], modes[1]
    usable = [m for m in modes[2:] if dims[m - 1] >= 2]
    ks = rnd.sample(usable, rnd.randint(0, len(usable)))
    return FlatteningPlan(d, tuple((m, rnd.randint(1, dims[m - 1] - 1)) for m in ks), c, o)


def random_tensor(rnd, dims, nnz):
    ent = {}
    for _ in range(nnz):
        ent[tuple(rnd.randint(1, m) for m in dims)] = rnd.randint(-3, 3)
    return Tensor(dims, ent)


def test_det3_is_an_isomorphism():
    m = rkf_matrix(det_tensor(3), FlatteningPlan.parse(3, [1]))
    assert m.shape == (9, 9) and rank_rational(m) == 9
    assert border_bound(9, divisor(FlatteningPlan.default(3), (3,) * 3)) == 5


def test_det4_determinant():
    m = rkf_matrix(det_tensor(4))
    assert m.shape == (96, 96)
    assert abs(det_bareiss(m)) == 2**32
    assert border_bound(96, 9) == 11


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("make", [det_tensor, perm_tensor])
def test_matches_brute_force(n, make):
    t = make(n)
    plan = FlatteningPlan.default(n)
    assert rkf_matrix(t, plan).to_dense() == brute_force(t, plan)


def test_random_plans_match_brute_force(rng):
    for _ in range(25):
        d = rng.randint(2, 4)
        dims = tuple(rng.randint(1, 4) for _ in range(d))
        t = random_tensor(rng, dims, 6)
        plan = random_plan(rng, d, dims)
        assert rkf_matrix(t, plan).to_dense() == brute_force(t, plan), (dims, plan)


def test_rank_one_example():
    term = RankOneTerm([basis_vector(4, i) for i in (1, 2, 3, 4)])
    m = rkf_matrix(expand_rank_one(term), FlatteningPlan.parse(4, [1, 2]))
    assert rank_rational(m) == comb(3, 1) * comb(3, 2) == 9


def test_rank_one_rank_equals_divisor():
    rnd = random.Random(5)
    for _ in range(50):
        d = rnd.randint(3, 5)
        dims = tuple(rnd.randint(2, 5) for _ in range(d))
        term = RankOneTerm([[rnd.randint(-2, 2) or 1 for _ in range(m)] for m in dims])
        plan = random_plan(rnd, d, dims)
        m = rkf_matrix(expand_rank_one(term), plan)
        assert rank_rational(m) == divisor(plan, dims), (dims, plan)


def test_subadditivity():
    rnd = random.Random(9)
    for _ in range(20):
        dims = tuple(rnd.randint(2, 4) for _ in range(4))
        plan = random_plan(rnd, 4, dims)
        t1, t2 = random_tensor(rnd, dims, 5), random_tensor(rnd, dims, 5)
        r = [rank_rational(rkf_matrix(x, plan)) for x in (t1, t2, t1 + t2)]
        assert r[2] <= r[0] + r[1]


@pytest.mark.parametrize("n", [3, 4, 5])
def test_det_perm_entries_are_signs(n):
    for make in (det_tensor, perm_tensor):
        m = rkf_matrix(make(n))
        assert set(m.entries.values()) <= {1, -1}


def test_classical_flattening_det3():
    state = classical_flattening(det_tensor(3), 1)
    assert rank_rational(state.to_matrix()) == 3


def test_kf_step_matches_rkf():
    st = kf_step(classical_flattening(det_tensor(3), 2, 3), 1, 1)
    assert st.to_matrix() == rkf_matrix(det_tensor(3), FlatteningPlan.parse(3, [1]))
    st4 = kf_step(kf_step(classical_flattening(det_tensor(4), 3, 4), 1, 1), 2, 2)
    assert st4.to_matrix() == rkf_matrix(det_tensor(4))
    assert rank_rational(st4.to_matrix()) == 96


def test_kf_step_random_shapes(rng):
    for _ in range(10):
        dims = tuple(rng.randint(2, 4) for _ in range(4))
        t = random_tensor(rng, dims, 8)
        st = classical_flattening(t, 4, 1)
        st = kf_step(kf_step(st, 3, rng.randint(1, dims[2] - 1)), 2, rng.randint(1, dims[1] - 1))
        assert st.to_matrix() == rkf_matrix(t, st.plan)


def test_kf_step_errors():
    st = kf_step(classical_flattening(det_tensor(4), 3, 4), 1, 1)
    for mode, p in ((1, 1), (3, 1), (4, 1), (2, 4)):
        with pytest.raises(InvalidArgument):
            kf_step(st, mode, p)


def test_divisor_and_bound_examples():
    assert divisor(FlatteningPlan.default(4), (4,) * 4) == 9
    assert divisor(FlatteningPlan.default(5), (5,) * 5) == 96
    assert divisor(FlatteningPlan.default(7), (7,) * 7) == 162000
    assert border_bound(96, 9) == 11
    assert border_bound(70, 9) == 8
    assert border_bound(8763494, 162000) == 55
    with pytest.raises(InvalidArgument):
        border_bound(3, 0)


def test_invalid_plans():
    t = det_tensor(4)
    for plan in (FlatteningPlan(4, ((1, 4),), 3, 4), FlatteningPlan(4, ((1, 1), (3, 1)), 3, 4),
                 FlatteningPlan(4, (), 3, 3), FlatteningPlan(3, (), 1, 2)):
        with pytest.raises(InvalidArgument):
            rkf_matrix(t, plan)


def test_lazy_column_and_row_views_agree():
    km = KoszulMap(perm_tensor(4), FlatteningPlan.default(4))
    m = km.matrix()
    rb, cb = km.row_basis, km.col_basis
    for (i, j), v in m.entries.items():
        assert km.row(rb.raw(i))[cb.raw(j)] == v
    assert sum(len(km.row(r)) for r in rb.raw_elements()) == m.nnz


def test_perm4_rank():
    assert rank_mod_p(rkf_matrix(perm_tensor(4)), 1000003) == 70
    assert rank_mod_p(rkf_matrix(perm_tensor(4)), P) == 70


def test_bound_below_entry_count():
    for make, n in ((det_tensor, 4), (perm_tensor, 4)):
        t = make(n)
        plan = FlatteningPlan.default(n)
        assert border_bound(rank_rational(rkf_matrix(t, plan)), divisor(plan, t.dims)) <= t.nnz
