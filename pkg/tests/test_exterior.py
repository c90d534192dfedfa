from math import comb

import pytest
from hypothesis import given, strategies as st

from koszulrank.errors import InvalidArgument
from koszulrank.exterior import (Factor, ProductBasis, WedgeIndex, lambda_basis, product_index, product_unindex,
                                 subset_rank, subset_unrank, wedge_insert)
from koszulrank.flattening import FlatteningPlan

B1_N4 = FlatteningPlan.default(4).column_shape((4,) * 4)


def W(n, *s):
    return WedgeIndex(n, s)


def test_lambda_basis_examples():
    assert [w.support for w in lambda_basis(3, 2)] == [(1, 2), (1, 3), (2, 3)]
    assert [w.support for w in lambda_basis(4, 1)] == [(1,), (2,), (3,), (4,)]
    assert [w.support for w in lambda_basis(4, 0)] == [()]
    for bad in ((3, 4), (3, -1)):
        with pytest.raises(InvalidArgument):
            lambda_basis(*bad)


@pytest.mark.parametrize("n,p", [(n, p) for n in range(1, 7) for p in range(n + 1)])
def test_lambda_basis_is_sorted_and_complete(n, p):
    basis = lambda_basis(n, p)
    assert len(basis) == comb(n, p)
    assert all(a.support < b.support for a, b in zip(basis, basis[1:]))


def test_subset_rank_examples():
    assert subset_rank(W(3, 1, 3)) == 1
    assert subset_unrank(4, 2, 5).support == (3, 4)
    with pytest.raises(InvalidArgument):
        subset_unrank(4, 2, 6)


def test_subset_round_trip_n7_p3():
    for r, w in enumerate(lambda_basis(7, 3)):
        assert subset_rank(w) == r and subset_unrank(7, 3, r) == w


def test_wedge_index_validation():
    with pytest.raises(InvalidArgument):
        WedgeIndex(3, (2, 1))
    with pytest.raises(InvalidArgument):
        WedgeIndex(3, (1, 4))


def test_wedge_insert_examples():
    assert wedge_insert(2, W(4, 1, 3)) == (-1, W(4, 1, 2, 3))
    assert wedge_insert(1, W(4, 1, 3)) is None
    assert wedge_insert(4, W(4, 1, 3)) == (1, W(4, 1, 3, 4))
    with pytest.raises(InvalidArgument):
        wedge_insert(5, W(4, 1, 3))


@given(st.data())
def test_wedge_insert_anticommutes(data):
    n = data.draw(st.integers(2, 8))
    sup = data.draw(st.sets(st.integers(1, n), max_size=n - 2))
    free = sorted(set(range(1, n + 1)) - sup)
    i, j = data.draw(st.lists(st.sampled_from(free), min_size=2, max_size=2, unique=True))
    w = WedgeIndex(n, tuple(sorted(sup)))
    s1, w1 = wedge_insert(i, w)
    s2, w2 = wedge_insert(j, w1)
    t1, v1 = wedge_insert(j, w)
    t2, v2 = wedge_insert(i, v1)
    assert w2 == v2 and s1 * s2 == -(t1 * t2)


def test_product_index_paper_positions():
    assert product_index((W(4, 1), W(4, 1, 2), 1), B1_N4) == 0
    assert product_index((W(4, 1), W(4, 1, 2), 2), B1_N4) == 1
    assert product_index((W(4, 4), W(4, 3, 4), 4), B1_N4) == 4 * 6 * 4 - 1
    with pytest.raises(InvalidArgument):
        product_unindex(96, B1_N4)
    with pytest.raises(InvalidArgument):
        product_unindex(-1, B1_N4)


def test_basis_element_rendering():
    assert str(ProductBasis(B1_N4)[0]) == "e1(x)(e1^e2)(x)e1*"


def test_product_basis_order_is_lex_on_concatenated_tuples():
    basis = ProductBasis(B1_N4)
    keys = []
    for el in basis:
        key = ()
        for c in el.components:
            key += c.support if isinstance(c, WedgeIndex) else (c,)
        keys.append(key)
    assert keys == sorted(keys) and len(set(keys)) == 96


def test_product_round_trip_n5():
    import random
    shape = FlatteningPlan.default(5).column_shape((5,) * 5)
    basis = ProductBasis(shape)
    rnd = random.Random(7)
    for _ in range(1000):
        r = rnd.randrange(basis.size)
        assert product_index(product_unindex(r, shape), shape) == r


def test_factor_sizes():
    assert Factor("wedge", 5, 2).size == 10 and Factor("dual", 5).size == 5


def test_basis_element_validates_components():
    from koszulrank.exterior import BasisElement
    with pytest.raises(InvalidArgument):
        BasisElement((1, W(4, 1, 2), 3), B1_N4)
    with pytest.raises(InvalidArgument):
        BasisElement((W(4, 1), W(4, 1, 2), 5), B1_N4)
