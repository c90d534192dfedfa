"""Exact rank and determinant over the rationals."""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from ..errors import InvalidArgument, TooLarge
from ..sparse import Q, SparseMatrix
from .elimination import eliminate, pivot_sign

__all__ = ["RANK_CAP", "DET_CAP", "rank_rational", "det_bareiss", "det_rational", "integer_rows"]

RANK_CAP = 4000
DET_CAP = 600


def integer_rows(m: SparseMatrix) -> list[dict[int, int]]:
    """Row dicts scaled to integers (each row by the lcm of its denominators)."""
    if m.field != Q:
        raise InvalidArgument("expected a rational matrix")
    rows = m.row_dicts()
    for r in rows:
        den = 1
        for v in r.values():
            if isinstance(v, Fraction):
                den = lcm(den, v.denominator)
        if den != 1:
            for c in r:
                r[c] = int(r[c] * den)
    return rows


def rank_rational(m: SparseMatrix, cap: int = RANK_CAP) -> int:
    """Rank over Q by fraction-free sparse elimination (rows kept primitive)."""
    if max(m.rows, m.cols) > cap:
        raise TooLarge(f"{m.rows}x{m.cols} exceeds the rational rank cap {cap}; use rank_mod_p")
    return eliminate(integer_rows(m), "ZZ", copy=False).rank


def det_bareiss(m: SparseMatrix, cap: int = DET_CAP):
    """Exact determinant by dense fraction-free (Bareiss) elimination."""
    if m.rows != m.cols:
        raise InvalidArgument(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    n = m.rows
    if n > cap:
        raise TooLarge(f"{n}x{n} exceeds the Bareiss cap {cap}")
    if n == 0:
        return 1
    den = 1
    for v in m.entries.values():
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    a = [[int(x * den) for x in row] for row in m.to_dense()]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (akk * ri[j] - aik * rk[j]) // prev
            ri[k] = 0
        prev = akk
    d = sign * a[n - 1][n - 1]
    if den != 1:
        v = Fraction(d, den ** n)
        return v.numerator if v.denominator == 1 else v
    return d


def det_rational(m: SparseMatrix):
    """Exact determinant by sparse elimination over Q; suited to large block-sparse input."""
    if m.rows != m.cols:
        raise InvalidArgument(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    if m.field != Q:
        raise InvalidArgument("expected a rational matrix")
    el = eliminate(m.row_dicts(), "Q", copy=False)
    if el.rank < m.rows:
        return 0
    return pivot_sign(el.pivots) * el.product()
