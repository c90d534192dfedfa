"""Theorem-level workflows: each builds the relevant flattening, computes, and
returns a :class:`~koszulrank.certificate.Certificate`.

Every workflow is deterministic given its inputs (seed, primes), so a
stored certificate can be replayed with :func:`verify_certificate`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import sympy

from .certificate import Certificate, render_int
from .errors import BudgetExceeded, InvalidArgument, SearchExhausted, TooLarge
from .exact.modp import PRIMES_62, det_crt, det_mod_p, draw_primes, hadamard_bound, primes_for_bound, rank_mod_p
from .exact.param import det_identity_test, det_univariate, param_flattening
from .exact.rational import det_bareiss, rank_rational
from .exact.submatrix import SubmatrixCertificate, find_unit_submatrix, verify_submatrix
from .flattening import FlatteningPlan, border_bound, divisor, rkf_matrix
from .symmetry import symmetric_rank
from .tensor import Tensor, det_tensor, perm_tensor

__all__ = [
    "CaseFamily",
    "CASE_FAMILIES",
    "certify_det_lower",
    "certify_det4_rank12",
    "certify_perm_table",
    "certify_perm_finite_char",
    "verify_certificate",
    "TAGS",
    "render_poly",
]

DET5_VALUE = 2**1600 * 3**25
DET4_VALUE = 2**32
DET4_DIM4_ROOTS = {1: 2**20, 2: 2**23, 4: 2**20}
DET4_UPPER_SOURCE = "R(det_4) <= 12 by an explicit 12-term decomposition from the literature (cited, not recomputed)"


@dataclass(frozen=True)
class CaseFamily:
    """A normal form ``S`` for the rank-one term subtracted from det_4.

    ``dim`` is the dimension of the span of the four factor vectors.
    ``factors`` lists vectors as ``{index: entry}`` with parameter names
    as entries.
    """

    dim: int
    factors: tuple
    description: str

    @property
    def parameters(self) -> tuple[str, ...]:
        names = set()
        for vec in self.factors:
            for e in vec.values():
                if isinstance(e, str):
                    names.add(e)
        return tuple(sorted(names))

    def matrix(self):
        return param_flattening(det_tensor(4), [list(self.factors)])


CASE_FAMILIES = {
    4: CaseFamily(4, ({1: "x"}, {2: 1}, {3: 1}, {4: 1}), "x e1(x)e2(x)e3(x)e4"),
    3: CaseFamily(3, ({1: 1}, {2: 1}, {3: 1}, {1: "x", 2: "y", 3: "z"}), "e1(x)e2(x)e3(x)(x e1 + y e2 + z e3)"),
    2: CaseFamily(2, ({1: 1}, {2: 1}, {1: "x", 2: "y"}, {1: "z", 2: "w"}), "e1(x)e2(x)(x e1 + y e2)(x)(z e1 + w e2)"),
    1: CaseFamily(1, ({1: "x"}, {1: 1}, {1: 1}, {1: 1}), "x e1(x)e1(x)e1(x)e1"),
}


def render_poly(poly: sympy.Poly) -> str:
    """Factored form with the constant rendered as prime powers, e.g. ``-2^20*(x - 1)*(x - 2)^4``."""
    coeff, factors = poly.factor_list()
    parts = []
    c = sympy.Rational(coeff)
    if c.q == 1:
        head = render_int(int(c.p))
    else:
        head = f"{render_int(int(c.p))}/{render_int(int(c.q))}"
    if head not in ("1", "-1") or not factors:
        parts.append(head)
    for f, k in sorted(factors, key=lambda fk: str(fk[0].as_expr())):
        body = f"({f.as_expr()})"
        parts.append(body if k == 1 else f"{body}^{k}")
    out = "*".join(parts)
    return "-" + out if head == "-1" and factors else out


def _plan_fields(cert: Certificate, n: int, plan: FlatteningPlan) -> None:
    cert["input.plan"] = str(plan)
    cert["input.exponents"] = list(plan.exponents)
    cert["fact.divisor"] = divisor(plan, (n,) * n)


def certify_det_lower(n: int, prime: int | None = None, *, seed: int = 0, n_primes: int = 3,
                      exhaustive: bool = False) -> Certificate:
    """Full rank of the det_n flattening and the resulting border-rank bound.

    With ``prime`` the full-rank claim is established over F_p (a
    characteristic-p statement); otherwise over Q.  n = 3 uses an exact
    rank, n = 4 an exact determinant, n = 5 determinant congruences at
    ``n_primes`` seeded primes (or a CRT reconstruction with ``exhaustive``).
    """
    if n < 3:
        raise InvalidArgument("det lower bounds need n >= 3")
    if n > 5:
        raise TooLarge(f"det_{n} needs the symmetry path; supported here are n = 3, 4, 5")
    t0 = time.monotonic()
    plan = FlatteningPlan.default(n)
    cert = Certificate(f"det-lower-n{n}")
    cert["input.tensor"] = f"det_{n}"
    cert["input.n"] = n
    _plan_fields(cert, n, plan)
    cert["input.field"] = "Q" if prime is None else f"Fp:{prime}"
    m = rkf_matrix(det_tensor(n), plan)
    size = m.rows
    cert["fact.size"] = [m.rows, m.cols]
    if prime is not None:
        d = det_mod_p(m, prime)
        cert["fact.det_mod_p"] = d
        full = d != 0
        cert.verdict = "PROVED-MOD-P" if full else "FAILED"
    elif n == 3:
        r = rank_rational(m)
        cert["fact.rank"] = r
        full = r == size
        cert.verdict = "PROVED" if full else "FAILED"
    elif n == 4:
        d = det_bareiss(m)
        cert["fact.det"] = d
        cert["fact.det_matches_known"] = abs(d) == DET4_VALUE
        full = d != 0
        cert.verdict = "PROVED" if full else "FAILED"
    else:
        cert["input.seed"] = seed
        primes = draw_primes(n_primes, seed)
        cert["input.primes"] = primes
        residues = [det_mod_p(m, p) for p in primes]
        cert["fact.det_residues"] = residues
        congruent = all(r in (DET5_VALUE % p, -DET5_VALUE % p) for r, p in zip(residues, primes))
        cert["fact.det_claimed"] = DET5_VALUE
        cert["fact.det_congruent"] = congruent
        full = any(residues)
        if exhaustive:
            bound = hadamard_bound(m)
            cps = primes_for_bound(bound)
            d = det_crt(m, cps, bound)
            cert["input.crt_primes"] = len(cps)
            cert["fact.det"] = d
            cert["det_verdict"] = "PROVED" if abs(d) == DET5_VALUE else "FAILED"
            cert.verdict = "PROVED" if d != 0 else "FAILED"
        else:
            # one nonzero residue already proves full rank over Q; the value itself is only
            # checked probabilistically
            cert["det_verdict"] = "PROBABILISTIC" if congruent else "FAILED"
            cert.verdict = "PROVED-MOD-P" if full and congruent else "FAILED"
    cert["fact.full_rank"] = full
    cert["fact.bound"] = border_bound(size, divisor(plan, (n,) * n)) if full else 0
    cert["claim"] = f"border rank of det_{n} >= {cert['fact.bound']}"
    cert.runtime = time.monotonic() - t0
    return cert


def _case_tensor(x: int) -> Tensor:
    t = det_tensor(4)
    return t - Tensor(t.dims, {(1, 2, 3, 4): x})


def certify_det4_rank12(char: int = 0, *, seed: int = 0, fast: bool = False,
                        retries: int = 200) -> Certificate:
    """The four-case analysis showing every ``det_4 - S`` has border rank >= 11.

    The reduction of an arbitrary rank-one ``S`` to the four normal forms
    is a proof step taken as given (recorded in the certificate).  With
    that, ``R(det_4) >= 12``; the matching upper bound is cited.
    """
    if char == 2:
        raise InvalidArgument("characteristic 2 is not covered")
    if char != 0 and not sympy.isprime(char):
        raise InvalidArgument(f"characteristic must be 0 or an odd prime, got {char}")
    t0 = time.monotonic()
    cert = Certificate("det4-rank12")
    cert["input.char"] = char
    cert["input.seed"] = seed
    cert["input.fast"] = fast
    cert["input.divisor"] = 9
    cert["assumption"] = "rank-one S reduces to the four normal forms under SL4 x A4 (proof step, not recomputed)"
    case_ranks = {}
    failures = []

    fam = CASE_FAMILIES[4]
    pm = fam.matrix()
    poly = det_univariate(pm, "x")
    x = sympy.Symbol("x")
    expected = sympy.Poly(-2**20 * (x - 1) * (x - 2)**4 * (x - 4)**4, x, domain=sympy.QQ)
    cert["case4.family"] = fam.description
    cert["case4.degree_bound"] = pm.degree_bound("x")
    cert["case4.det"] = render_poly(poly)
    ok = poly == expected or poly == -expected
    cert["case4.det_matches_known"] = ok
    if not ok:
        failures.append("case4 polynomial")
    if char == 0:
        for root in sorted(DET4_DIM4_ROOTS):
            r = rank_rational(pm.evaluate({"x": root}))
            cert[f"case4.rank_at_{root}"] = r
            case_ranks[f"4@x={root}"] = r
        case_ranks["4@generic"] = 96
    else:
        roots = sorted({r % char for r in DET4_DIM4_ROOTS})
        cert["case4.roots_mod_p"] = roots
        reduced = sympy.Poly(poly.as_expr(), x, modulus=char)
        found = sorted(int(rt) % char for rt in range(char) if reduced.eval(rt) % char == 0)
        if found != roots:
            failures.append(f"case4 roots mod {char}: {found}")
        for root in roots:
            target = DET4_DIM4_ROOTS[2] if root == 2 % char else DET4_DIM4_ROOTS[1]
            m = pm.evaluate({"x": root})
            try:
                sub = find_unit_submatrix(m, 91, char, target, seed=seed, retries=retries)
            except SearchExhausted as exc:
                failures.append(f"case4 x={root}: {exc}")
                continue
            cert.add_submatrix(f"x{root}", sub, x=root, target=target)
            case_ranks[f"4@x={root}"] = 91
        case_ranks["4@generic"] = 96

    base_det = det_bareiss(rkf_matrix(det_tensor(4)))
    for dim in (3, 2, 1):
        fam = CASE_FAMILIES[dim]
        v = det_identity_test(fam.matrix(), base_det, trials=8, seed=seed, full_grid=not fast)
        cert[f"case{dim}.family"] = fam.description
        cert[f"case{dim}.claimed_det"] = base_det
        cert[f"case{dim}.grid"] = [v.grid[p] + 1 for p in sorted(v.grid)]
        cert[f"case{dim}.points"] = v.points
        cert[f"case{dim}.verdict"] = "PROVED" if v.passed and v.kind == "proof" else (
            "PROBABILISTIC" if v.passed else "FAILED")
        if not v.passed:
            failures.append(f"case{dim} identity")
        case_ranks[str(dim)] = 96 if v.passed else 0

    worst = min(case_ranks.values()) if case_ranks else 0
    lower = border_bound(worst, 9) + 1 if worst else 0
    cert["fact.case_ranks"] = [case_ranks[k] for k in sorted(case_ranks)]
    cert["fact.case_keys"] = " ".join(sorted(case_ranks))
    cert["fact.min_case_rank"] = worst
    cert["fact.lower_bound"] = lower
    cert["fact.upper_bound"] = 12
    cert["fact.upper_source"] = DET4_UPPER_SOURCE
    if failures:
        cert.verdict = "FAILED"
        cert["fact.failures"] = "; ".join(failures)
        cert["claim"] = "R(det_4) >= 12 not established"
    else:
        cert.verdict = "PROBABILISTIC" if fast else ("PROVED" if char == 0 else "PROVED-MOD-P")
        cert["claim"] = f"R(det_4) >= {lower}, = 12 with cited upper bound"
        cert["upper_verdict"] = "CITED"
    cert.runtime = time.monotonic() - t0
    return cert


def certify_perm_table(n: int, p: int = PRIMES_62[0], *, threads: int = 1, deadline: float | None = None,
                       checkpoint=None, extended: bool = False) -> Certificate:
    """Rank of the perm_n flattening over F_p via orbit classes, and its bound."""
    if not 3 <= n <= 8:
        raise InvalidArgument(f"perm table supports 3 <= n <= 8, got {n}")
    if n >= 7 and not extended:
        raise TooLarge(f"perm_{n} is a multi-hour run; pass extended=True (CLI: --extended)")
    t0 = time.monotonic()
    plan = FlatteningPlan.default(n)
    cert = Certificate(f"perm-table-n{n}")
    cert["input.tensor"] = f"perm_{n}"
    cert["input.n"] = n
    _plan_fields(cert, n, plan)
    cert["input.prime"] = p
    div = divisor(plan, (n,) * n)
    try:
        res = symmetric_rank(perm_tensor(n), plan, p, threads=threads, deadline=deadline, checkpoint=checkpoint)
    except BudgetExceeded as exc:
        res = getattr(exc, "partial", None)
        cert.verdict = "FAILED"
        cert["status"] = "budget-exceeded"
        if res is not None:
            cert["fact.size"] = list(res.size)
            cert["fact.partial_rank"] = res.rank
            cert["fact.partial_bound"] = border_bound(res.rank, div)
            cert["fact.classes_done"] = len(res.classes)
        cert.runtime = time.monotonic() - t0
        return cert
    cert["fact.size"] = list(res.size)
    cert["fact.classes"] = len(res.classes)
    cert["fact.orphan_columns"] = res.orphan_columns
    cert["fact.rank"] = res.rank
    cert["fact.bound"] = border_bound(res.rank, div)
    cert["claim"] = f"border rank of perm_{n} >= {cert['fact.bound']} (char 0, F_p-rank lower-bounds Q-rank)"
    for k, c in enumerate(res.classes):
        cert[f"class.{k}"] = [c.representative + 1, c.rows, c.cols, c.stabilizer_order, c.class_size, c.rank]
    cert.verdict = "PROVED-MOD-P"
    cert.runtime = time.monotonic() - t0
    return cert


def certify_perm_finite_char(n: int, *, seed: int = 0, retries: int = 50) -> Certificate:
    """A square submatrix of the perm_n flattening with determinant +-1.

    Its size is the flattening rank, so that rank survives reduction to
    every characteristic.
    """
    if n not in (4, 5):
        raise InvalidArgument("finite-characteristic certificates are for n = 4 or 5")
    t0 = time.monotonic()
    plan = FlatteningPlan.default(n)
    cert = Certificate(f"perm-finite-char-n{n}")
    cert["input.tensor"] = f"perm_{n}"
    cert["input.n"] = n
    _plan_fields(cert, n, plan)
    cert["input.seed"] = seed
    m = rkf_matrix(perm_tensor(n), plan)
    r = rank_mod_p(m, PRIMES_62[0])
    cert["fact.rank_mod_p"] = r
    try:
        sub = find_unit_submatrix(m, r, target="unit", seed=seed, retries=retries)
    except SearchExhausted as exc:
        cert.verdict = "FAILED"
        cert["fact.failure"] = str(exc)
        cert.runtime = time.monotonic() - t0
        return cert
    cert.add_submatrix("unit", sub)
    cert["fact.bound"] = border_bound(r, divisor(plan, (n,) * n))
    cert["claim"] = f"border rank of perm_{n} >= {cert['fact.bound']} in every characteristic != 2"
    cert.verdict = "PROVED" if abs(sub.det) == 1 else "FAILED"
    cert.runtime = time.monotonic() - t0
    return cert


TAGS = ("det-lower", "det4-rank12", "perm-table", "perm-finite-char")


def _replay(cert: Certificate, **opts) -> Certificate:
    tag = cert.tag
    g = cert.get
    if tag.startswith("det-lower-n"):
        field = g("input.field", "Q")
        prime = None if field == "Q" else int(str(field).split(":")[1])
        return certify_det_lower(g("input.n"), prime, seed=g("input.seed", 0),
                                 n_primes=len(g("input.primes", [0, 0, 0])),
                                 exhaustive="fact.det" in cert.fields and g("input.n") == 5)
    if tag == "det4-rank12":
        return certify_det4_rank12(g("input.char"), seed=g("input.seed"), fast=g("input.fast"))
    if tag.startswith("perm-table-n"):
        return certify_perm_table(g("input.n"), g("input.prime"), extended=True, **opts)
    if tag.startswith("perm-finite-char-n"):
        return certify_perm_finite_char(g("input.n"), seed=g("input.seed"))
    raise InvalidArgument(f"unknown certificate tag {tag!r}")


def _matrix_for_submatrix(cert: Certificate, info: dict):
    if cert.tag == "det4-rank12":
        return rkf_matrix(_case_tensor(info["x"]))
    if cert.tag.startswith("perm-finite-char-n"):
        return rkf_matrix(perm_tensor(cert["input.n"]))
    raise InvalidArgument(f"no stored submatrix provenance for {cert.tag}")


def verify_certificate(cert: Certificate, *, replay: bool = True, **opts) -> tuple[bool, list[str]]:
    """Re-check a stored certificate.

    Stored submatrices are re-verified by recomputing their determinants
    directly.  With ``replay`` the workflow is rerun from the stored inputs
    and its verdict and facts compared with the stored ones.
    """
    msgs = []
    ok = True
    for name, info in cert.submatrices().items():
        m = _matrix_for_submatrix(cert, info)
        sub = SubmatrixCertificate(tuple(r - 1 for r in info["rows"]), tuple(c - 1 for c in info["cols"]),
                                   info["det"], info.get("prime"), info.get("residue"))
        good = verify_submatrix(m, sub)
        msgs.append(f"submatrix {name} ({sub.size}x{sub.size}, det {info['det']}): "
                    + ("re-verified" if good else "MISMATCH"))
        ok &= good
    if replay:
        fresh = _replay(cert, **opts)
        if fresh.verdict != cert.verdict:
            ok = False
            msgs.append(f"verdict differs: stored {cert.verdict}, replay {fresh.verdict}")
        stored, new = cert.facts(), _reparse(fresh).facts()
        for k in sorted(set(stored) | set(new)):
            if stored.get(k) != new.get(k):
                ok = False
                msgs.append(f"{k}: stored {stored.get(k)!r}, replay {new.get(k)!r}")
        if ok:
            msgs.append(f"replay reproduced verdict {fresh.verdict}")
    return ok, msgs


def _reparse(cert: Certificate) -> Certificate:
    return Certificate.loads(cert.dumps())

