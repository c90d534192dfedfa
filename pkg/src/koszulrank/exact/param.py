"""Matrices whose entries are polynomials in a few named parameters.

Flattening is linear in the tensor, so the flattening of ``T - S`` with a
parametric rank-one ``S`` is a constant matrix plus one constant matrix per
monomial of ``S``.  Entries are multilinear: every parameter occurs with
degree at most one in every entry, which bounds the degree of the
determinant in a parameter by the number of columns (or rows) it touches.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import prod

import sympy

from ..errors import InternalError, InvalidArgument
from ..flattening import FlatteningPlan, KoszulMap
from ..sparse import Q, SparseMatrix
from ..tensor import Tensor, _exact
from .rational import det_rational

__all__ = [
    "ParamMatrix",
    "LinearForm",
    "param_flattening",
    "det_univariate",
    "IdentityVerdict",
    "det_identity_test",
]

Monomial = tuple  # sorted tuple of parameter names, () for the constant term


@dataclass
class ParamMatrix:
    """``base + sum_m m(params) * terms[m]`` with ``m`` ranging over multilinear monomials."""

    base: SparseMatrix
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        for mono, mat in self.terms.items():
            if mat.shape != self.base.shape:
                raise InvalidArgument(f"term {mono} has shape {mat.shape}, expected {self.base.shape}")
            if len(set(mono)) != len(mono):
                raise InvalidArgument(f"monomial {mono} is not multilinear")

    @property
    def shape(self) -> tuple[int, int]:
        return self.base.shape

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(sorted({v for mono in self.terms for v in mono}))

    def evaluate(self, assignment: dict) -> SparseMatrix:
        missing = set(self.variables) - set(assignment)
        if missing:
            raise InvalidArgument(f"no value for parameter(s) {sorted(missing)}")
        ent = dict(self.base.entries)
        for mono, mat in self.terms.items():
            c = prod((_exact(assignment[v]) for v in mono), start=1)
            if c == 0:
                continue
            for key, v in mat.entries.items():
                ent[key] = ent.get(key, 0) + c * v
        return SparseMatrix(self.base.rows, self.base.cols, ent, Q, self.base.row_labels, self.base.col_labels)

    def touching(self, var: str) -> tuple[set, set]:
        rows, cols = set(), set()
        for mono, mat in self.terms.items():
            if var in mono:
                for r, c in mat.entries:
                    rows.add(r)
                    cols.add(c)
        return rows, cols

    def degree_bound(self, var: str) -> int:
        """Upper bound on the degree of ``det`` in ``var``."""
        rows, cols = self.touching(var)
        return min(len(rows), len(cols))


class LinearForm(dict):
    """A vector entry ``c0 + sum c_v v`` stored as ``{None: c0, 'v': c_v, ...}``."""

    @classmethod
    def of(cls, value) -> LinearForm:
        if isinstance(value, LinearForm):
            return value
        if isinstance(value, str):
            return cls({value: 1})
        return cls({None: _exact(value)})


def param_flattening(base: Tensor, subtract: list, plan: FlatteningPlan | None = None) -> ParamMatrix:
    """Flattening of ``base - sum(subtract)`` for parametric rank-one terms.

    Each element of ``subtract`` is a list of factor vectors; a vector is a
    dict ``{index: entry}`` (1-based) whose entries are numbers, parameter
    names, or :class:`LinearForm` objects.
    """
    if plan is None:
        plan = FlatteningPlan.default(base.order)
    by_mono: dict[Monomial, dict] = {}
    for term in subtract:
        if len(term) != base.order:
            raise InvalidArgument(f"rank-one term has {len(term)} factors, tensor has order {base.order}")
        factors = []
        for k, vec in enumerate(term):
            items = []
            for i, e in vec.items():
                if not 1 <= i <= base.dims[k]:
                    raise InvalidArgument(f"index {i} out of range for mode {k + 1}")
                for var, c in LinearForm.of(e).items():
                    if c:
                        items.append((i, var, c))
            factors.append(items)
        for combo in itertools.product(*factors):
            vars_ = [v for _, v, _ in combo if v is not None]
            if len(set(vars_)) != len(vars_):
                raise InvalidArgument("a parameter appears in two factors; entries would not be multilinear")
            mono = tuple(sorted(vars_))
            idx = tuple(i for i, _, _ in combo)
            c = -prod((c for _, _, c in combo), start=1)
            bucket = by_mono.setdefault(mono, {})
            bucket[idx] = bucket.get(idx, 0) + c
    const = dict(base.entries)
    for idx, c in by_mono.pop((), {}).items():
        const[idx] = const.get(idx, 0) + c
    base_m = KoszulMap(Tensor(base.dims, const), plan).matrix()
    terms = {mono: KoszulMap(Tensor(base.dims, ent), plan).matrix() for mono, ent in sorted(by_mono.items())}
    return ParamMatrix(base_m, {m: t for m, t in terms.items() if t.nnz})


def _det(m: SparseMatrix):
    return det_rational(m)


def det_univariate(m: ParamMatrix, var: str | None = None, degree_bound: int | None = None,
                   symbol: sympy.Symbol | None = None) -> sympy.Poly:
    """The determinant as a polynomial in its single parameter, by interpolation.

    ``degree_bound + 1`` integer points ``0, 1, ...`` are evaluated exactly;
    one more point checks the result against the bound.
    """
    vars_ = m.variables
    if var is None:
        if len(vars_) != 1:
            raise InvalidArgument(f"expected exactly one parameter, found {vars_}")
        var = vars_[0]
    elif set(vars_) - {var}:
        raise InvalidArgument(f"parameters other than {var!r}: {sorted(set(vars_) - {var})}")
    if degree_bound is None:
        degree_bound = m.degree_bound(var)
    x = symbol if symbol is not None else sympy.Symbol(var)
    pts = [(k, _det(m.evaluate({var: k}))) for k in range(degree_bound + 1)]
    poly = sympy.Poly(sympy.interpolate(pts, x), x, domain=sympy.QQ)
    check = degree_bound + 1
    if poly.eval(check) != _det(m.evaluate({var: check})):
        raise InternalError(f"determinant is not of degree <= {degree_bound} in {var}")
    return poly


@dataclass
class IdentityVerdict:
    passed: bool
    kind: str  # "proof" or "probabilistic"
    points: int
    grid: dict
    seed: int
    trials: int
    counterexample: dict | None = None

    def __bool__(self) -> bool:
        return self.passed


def det_identity_test(m: ParamMatrix, claimed, trials: int = 8, seed: int = 0, *,
                      full_grid: bool = True, sample_range: int = 10**6) -> IdentityVerdict:
    """Test ``det m == claimed`` identically in the parameters.

    With ``full_grid`` the determinant is checked on the product grid
    ``0..d_v`` for each parameter ``v`` of degree bound ``d_v``; a
    polynomial of those partial degrees vanishing there is zero, so a pass
    is a proof.  ``trials`` further random points are always checked; on
    their own (``full_grid=False``) they give a Schwartz-Zippel test.
    """
    claimed = _exact(claimed)
    vars_ = m.variables
    bounds = {v: m.degree_bound(v) for v in vars_}
    rnd = random.Random(seed)
    points = 0

    def fails(pt):
        nonlocal points
        points += 1
        return _det(m.evaluate(pt)) != claimed

    if full_grid:
        for combo in itertools.product(*(range(bounds[v] + 1) for v in vars_)):
            pt = dict(zip(vars_, combo))
            if fails(pt):
                return IdentityVerdict(False, "proof", points, bounds, seed, trials, pt)
    for _ in range(trials):
        pt = {v: rnd.randrange(-sample_range, sample_range + 1) for v in vars_}
        if fails(pt):
            return IdentityVerdict(False, "proof", points, bounds, seed, trials, pt)
    return IdentityVerdict(True, "proof" if full_grid else "probabilistic", points, bounds, seed, trials)

