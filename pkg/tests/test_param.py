import random

import pytest
import sympy

from koszulrank.errors import InternalError, InvalidArgument
from koszulrank.exact import (LinearForm, ParamMatrix, det_identity_test, det_rational, det_univariate,
                              param_flattening)
from koszulrank.sparse import SparseMatrix
from koszulrank.tensor import det_tensor

x = sympy.Symbol("x")


def diag(*entries):
    """Diagonal ParamMatrix; entries are ints or parameter names."""
    n = len(entries)
    base = SparseMatrix(n, n, {(i, i): e for i, e in enumerate(entries) if not isinstance(e, str)})
    terms = {}
    for i, e in enumerate(entries):
        if isinstance(e, str):
            old = terms.get((e,), SparseMatrix(n, n))
            terms[(e,)] = old.add(SparseMatrix(n, n, {(i, i): 1}))
    return ParamMatrix(base, terms)


def test_diagonal_examples():
    assert det_univariate(diag("x", 2)).as_expr() == 2 * x
    assert det_univariate(diag("x", "x")).as_expr() == x**2


def test_degree_bound_violation_is_detected():
    with pytest.raises(InternalError):
        det_univariate(diag("x", "x", "x"), degree_bound=2)


def test_det4_family_polynomial():
    m = param_flattening(det_tensor(4), [[{1: 1}, {2: 1}, {3: 1}, {4: "x"}]])
    assert m.degree_bound("x") == 9
    poly = det_univariate(m)
    expected = sympy.expand(2**20 * (x - 1) * (x - 2)**4 * (x - 4)**4)
    assert poly.as_expr() in (expected, -expected)
    for v in (3, -5, sympy.Rational(1, 3)):
        assert poly.eval(v) == det_rational(m.evaluate({"x": v}))


def test_constant_matrix_identity():
    m = ParamMatrix(SparseMatrix.from_dense([[2, 1], [1, 1]]))
    v = det_identity_test(m, 1)
    assert v.passed and v.kind == "proof"
    assert not det_identity_test(m, 2)


def test_dim3_family_is_constant():
    lf = LinearForm({"x": 1})
    m = param_flattening(det_tensor(4), [[{1: 1}, {2: 1}, {3: 1}, {1: "x", 2: "y", 3: "z"}]])
    assert m.variables == ("x", "y", "z")
    assert all(m.degree_bound(v) == 9 for v in m.variables)
    claimed = det_rational(m.evaluate({"x": 0, "y": 0, "z": 0}))
    assert abs(claimed) == 2**32
    v = det_identity_test(m, claimed, full_grid=False, trials=6, seed=3)
    assert v.passed and v.kind == "probabilistic" and v.points == 6
    assert lf.of("x") == {"x": 1}


def test_dim1_family_full_grid():
    m = param_flattening(det_tensor(4), [[{1: "x"}, {1: 1}, {1: 1}, {1: 1}]])
    claimed = det_rational(m.evaluate({"x": 0}))
    v = det_identity_test(m, claimed)
    assert v.passed and v.kind == "proof" and v.points == 10 + 8


def test_identity_failure_reports_point():
    v = det_identity_test(diag("x", 1), 1)
    assert not v.passed and v.counterexample == {"x": 0}


def test_evaluate_against_random_points():
    rnd = random.Random(2)
    m = param_flattening(det_tensor(3), [[{1: "a", 2: 1}, {2: "b"}, {3: 1}]])
    for _ in range(5):
        a, b = rnd.randint(-9, 9), rnd.randint(-9, 9)
        assert m.evaluate({"a": a, "b": b}) == param_flattening(
            det_tensor(3), [[{1: a, 2: 1}, {2: b}, {3: 1}]]).evaluate({})


def test_param_errors():
    with pytest.raises(InvalidArgument):
        param_flattening(det_tensor(3), [[{1: "x"}, {1: "x"}, {1: 1}]])
    with pytest.raises(InvalidArgument):
        param_flattening(det_tensor(3), [[{4: 1}, {1: 1}, {1: 1}]])
    with pytest.raises(InvalidArgument):
        diag("x").evaluate({})
    with pytest.raises(InvalidArgument):
        det_univariate(diag("x", "y"))
