"""Search for square submatrices with a prescribed kind of determinant.

A set of pivots produced by Gaussian elimination spans a square submatrix
whose determinant is the signed pivot product: elimination restricted to
those rows and columns performs exactly the same updates.  Stopping at
``r`` pivots therefore yields an ``r x r`` nonsingular submatrix.  Steering
the pivot choice (only +-1 pivots, or random ties until the residue of
the product is right) turns this into a search.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from ..errors import InvalidArgument, SearchExhausted
from ..sparse import Q, SparseMatrix
from .elimination import eliminate, pivot_sign
from .modp import _check_prime
from .rational import det_rational

__all__ = ["SubmatrixCertificate", "find_unit_submatrix", "verify_submatrix"]


@dataclass
class SubmatrixCertificate:
    """Row and column index sets (0-based, increasing) and the exact determinant."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    det: int
    prime: int | None = None
    residue: int | None = None
    seed: int | None = None
    attempts: int = 1

    @property
    def size(self) -> int:
        return len(self.rows)


def verify_submatrix(m: SparseMatrix, cert: SubmatrixCertificate) -> bool:
    """Recompute the determinant of the stored submatrix and compare."""
    if len(cert.rows) != len(cert.cols):
        return False
    if len(set(cert.rows)) != len(cert.rows) or len(set(cert.cols)) != len(cert.cols):
        return False
    if any(not 0 <= r < m.rows for r in cert.rows) or any(not 0 <= c < m.cols for c in cert.cols):
        return False
    d = det_rational(m.submatrix(list(cert.rows), list(cert.cols)))
    if d != cert.det:
        return False
    if cert.prime is not None and cert.residue is not None:
        return d % cert.prime == cert.residue % cert.prime
    return True


def _components(m: SparseMatrix):
    from ..symmetry import connected_components
    return connected_components(m).components


def _unit_pivots(sub: SparseMatrix, want: int, rnd: random.Random, retries: int):
    best = []
    for attempt in range(retries):
        el = eliminate(sub.row_dicts(), Q, max_pivots=want, copy=False,
                       rng=rnd if attempt else None, accept=lambda v: v == 1 or v == -1)
        if len(el.pivots) > len(best):
            best = el.pivots
        if len(best) == want:
            break
    return best


def find_unit_submatrix(m: SparseMatrix, r: int, p: int | None = None, target="unit", *,
                        seed: int = 0, retries: int = 50) -> SubmatrixCertificate:
    """Find an ``r x r`` submatrix whose determinant meets ``target``.

    ``target``:

    ``"unit"``
        ``|det| = 1``; rational elimination with +-1 pivots only, one
        connected component at a time (``p`` is used only to learn each
        component's rank).
    ``"nonzero"``
        any nonsingular submatrix (over F_p when ``p`` is given, else Q).
    an int ``t`` (or a collection of ints)
        ``det = +-t (mod p)``.  Attempts cycle through rational elimination
        with power-of-two pivots, rational elimination with uniformly
        random pivots, and uniformly random F_p elimination until the
        residue matches.

    The exact determinant of the chosen submatrix is always recomputed.
    Raises :class:`SearchExhausted` when the retries run out; that says
    nothing about whether such a submatrix exists.
    """
    if r < 0 or r > min(m.rows, m.cols):
        raise InvalidArgument(f"r = {r} exceeds min(rows, cols) = {min(m.rows, m.cols)}")
    if m.field != Q:
        raise InvalidArgument("find_unit_submatrix expects a rational matrix")
    rnd = random.Random(seed)
    if target == "unit":
        pivots, attempts = _search_unit(m, r, p, rnd, retries)
    elif target == "nonzero":
        if p is None:
            pivots = eliminate(m.row_dicts(), Q, max_pivots=r, copy=False).pivots
        else:
            _check_prime(p)
            pivots = eliminate(m.mod(p).row_dicts(), p, max_pivots=r, copy=False).pivots
        attempts = 1
        if len(pivots) < r:
            raise SearchExhausted(f"matrix rank is below {r}")
    else:
        if p is None:
            raise InvalidArgument("a residue target needs a prime")
        _check_prime(p)
        if isinstance(target, str):
            raise InvalidArgument(f"unknown target {target!r}")
        wanted = {t % p for t in (target if isinstance(target, (set, frozenset, list, tuple)) else [target])}
        wanted |= {-t % p for t in wanted}
        pivots, attempts = _search_residue(m, r, p, wanted, rnd, retries)
    rows = tuple(sorted(i for i, _, _ in pivots))
    cols = tuple(sorted(j for _, j, _ in pivots))
    det = det_rational(m.submatrix(list(rows), list(cols)))
    if target == "unit" and abs(det) != 1:
        raise SearchExhausted(f"internal: unit pivots gave det {det}")
    residue = det % p if p is not None else None
    return SubmatrixCertificate(rows, cols, int(det), p, residue, seed, attempts)


def _search_unit(m: SparseMatrix, r: int, p: int | None, rnd: random.Random, retries: int):
    from .modp import PRIMES_62
    prime = p if p is not None else PRIMES_62[0]
    pivots = []
    attempts = 0
    for comp in _components(m):
        if len(pivots) >= r:
            break
        sub = comp.matrix
        want = min(eliminate(sub.mod(prime).row_dicts(), prime, copy=False).rank, r - len(pivots))
        got = _unit_pivots(sub, want, rnd, retries)
        attempts = max(attempts, 1)
        if len(got) < want:
            raise SearchExhausted(f"component at column {comp.representative}: only {len(got)} of "
                                  f"{want} unit pivots after {retries} attempts")
        pivots += [(comp.rows[i], comp.cols[j], v) for i, j, v in got]
    if len(pivots) < r:
        raise SearchExhausted(f"matrix rank is below {r}")
    return pivots, attempts


def _power_of_two(v) -> bool:
    v = abs(Fraction(v))
    n, d = v.numerator, v.denominator
    return n & (n - 1) == 0 and d & (d - 1) == 0


def _search_residue(m: SparseMatrix, r: int, p: int, wanted: set, rnd: random.Random, retries: int):
    mp = None
    for attempt in range(1, retries + 1):
        kind = attempt % 3
        if kind == 1:
            el = eliminate(m.row_dicts(), Q, max_pivots=r, copy=False, rng=rnd, accept=_power_of_two)
        elif kind == 2:
            el = eliminate(m.row_dicts(), Q, max_pivots=r, copy=False, rng=rnd, markowitz=False)
        else:
            mp = mp if mp is not None else m.mod(p)
            el = eliminate(mp.row_dicts(), p, max_pivots=r, copy=False, rng=rnd, markowitz=False)
        if len(el.pivots) < r:
            continue
        if pivot_sign(el.pivots) * el.product() % p in wanted:
            return el.pivots, attempt
    raise SearchExhausted(f"no {r}x{r} submatrix with det in {sorted(wanted)} mod {p} after {retries} attempts")
