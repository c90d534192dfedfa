import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from koszulrank.errors import BadPrime, InvalidArgument, NeedMorePrimes, TooLarge
from koszulrank.exact import (PRIMES_62, det_bareiss, det_crt, det_mod_p, det_rational, draw_primes, hadamard_bound,
                              primes_for_bound, rank_mod_p, rank_rational)
from koszulrank.flattening import rkf_matrix
from koszulrank.sparse import SparseMatrix
from koszulrank.tensor import det_tensor

from conftest import random_int_matrix

DET5 = 2**1600 * 3**25


def sympy_det(m):
    return int(sympy.Matrix(m.to_dense()).det())


def test_small_examples():
    assert rank_mod_p(SparseMatrix(4, 5), 7) == 0
    assert rank_rational(SparseMatrix.identity(5)) == 5
    assert det_bareiss(SparseMatrix.from_dense([[1, 2], [3, 4]])) == -2
    assert det_bareiss(SparseMatrix.from_dense([[1, 5, 7], [0, 2, 9], [0, 0, 3]])) == 6
    assert hadamard_bound(SparseMatrix.identity(6)) == 1
    assert hadamard_bound(SparseMatrix.from_dense([[1, 2], [3, 4]])) == 12
    assert hadamard_bound(SparseMatrix.from_dense([[1] * 3] * 3)) == 6


def test_rank_mod_p_never_exceeds_rank_over_q():
    rnd = random.Random(11)
    primes = draw_primes(3, seed=11)
    for _ in range(30):
        m = random_int_matrix(rnd, rnd.randint(1, 20), rnd.randint(1, 20), density=0.4, lo=-9, hi=9)
        r = rank_rational(m)
        ranks = [rank_mod_p(m, p) for p in primes]
        assert max(ranks) == r and all(x <= r for x in ranks)
        assert r == sympy.Matrix(m.to_dense()).rank()


def test_rank_drops_only_at_dividing_primes():
    m = SparseMatrix.from_dense([[2, 0], [0, 3]])
    assert [rank_mod_p(m, p) for p in (3, 5, 7)] == [1, 2, 2]


def test_det_mod_p_matches_bareiss():
    rnd = random.Random(12)
    for _ in range(30):
        n = rnd.randint(1, 12)
        m = random_int_matrix(rnd, n, n, density=0.7, lo=-20, hi=20)
        d = det_bareiss(m)
        assert d == sympy_det(m)
        for p in (3, 1000003, PRIMES_62[5]):
            assert det_mod_p(m, p) == d % p
        assert det_rational(m) == d


def test_det_crt_matches_bareiss():
    rnd = random.Random(13)
    for _ in range(10):
        m = random_int_matrix(rnd, 8, 8, density=0.9, lo=-10**6, hi=10**6)
        primes = primes_for_bound(hadamard_bound(m))
        assert det_crt(m, primes) == det_bareiss(m)


def test_det_crt_needs_enough_primes():
    m = SparseMatrix.from_dense([[10**20, 1], [1, 10**20]])
    with pytest.raises(NeedMorePrimes):
        det_crt(m, [1000003])


@given(st.lists(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=4, max_size=4),
                min_size=4, max_size=4))
def test_rational_determinants(rows):
    m = SparseMatrix.from_dense(rows)
    assert det_bareiss(m) == det_rational(m) == Fraction(str(sympy.Matrix(rows).det()))


def test_det4_flattening():
    m = rkf_matrix(det_tensor(4))
    assert abs(det_bareiss(m)) == 2**32
    assert det_mod_p(m, 3) in {1, 2}
    assert det_rational(m) == det_bareiss(m)
    assert rank_rational(m) == 96


def test_det5_congruence():
    m = rkf_matrix(det_tensor(5))
    for p in draw_primes(3, seed=0):
        assert det_mod_p(m, p) in {DET5 % p, -DET5 % p}


def test_errors():
    with pytest.raises(InvalidArgument):
        det_bareiss(SparseMatrix(2, 3))
    with pytest.raises(InvalidArgument):
        rank_mod_p(SparseMatrix.identity(2), 9)
    with pytest.raises(InvalidArgument):
        rank_mod_p(SparseMatrix.identity(2), 2)
    with pytest.raises(BadPrime):
        rank_mod_p(SparseMatrix(1, 1, {(0, 0): Fraction(1, 7)}), 7)
    with pytest.raises(TooLarge):
        rank_rational(SparseMatrix(4001, 1))
    with pytest.raises(TooLarge):
        det_bareiss(SparseMatrix.identity(601))
    with pytest.raises(InvalidArgument):
        draw_primes(65, seed=0)


def test_prime_table():
    assert len(PRIMES_62) == 64 and len(set(PRIMES_62)) == 64
    assert all(sympy.isprime(p) and p < 2**62 for p in PRIMES_62)
    assert sympy.nextprime(max(PRIMES_62)) > 2**62
    assert draw_primes(3, seed=4) == draw_primes(3, seed=4)
