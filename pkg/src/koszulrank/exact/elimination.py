"""Sparse Gaussian elimination with Markowitz pivoting.

One engine serves three arithmetics:

``p`` (an int)
    residues modulo a prime ``p``;
``"Q"``
    exact rationals (ints, promoted to ``Fraction`` only when needed);
``"ZZ"``
    fraction-free integer row operations with content removal.  Pivot
    values are then meaningless for determinants, so this mode is for rank
    only.

Pivots are chosen by approximate Markowitz cost ``(r - 1)(c - 1)``: the
best of the sparsest column and the sparsest row is taken, ties going to
the lowest column index.  With ``rng`` set, or with an ``accept`` filter on
pivot values, every active entry is scanned instead and ties are broken at
random.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable

from ..errors import BudgetExceeded
from ..tensor import permutation_sign

__all__ = ["Elimination", "eliminate", "pivot_sign"]


def _qdiv(a, b):
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        return q if r == 0 else Fraction(a, b)
    v = Fraction(a) / b
    return v.numerator if v.denominator == 1 else v


def _qnorm(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


@dataclass
class Elimination:
    """Outcome of :func:`eliminate`: the pivots ``(row, col, value)`` in elimination order."""

    pivots: list = field(default_factory=list)
    field: object = None

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def product(self):
        """Product of the pivot values in the elimination's arithmetic."""
        acc = 1
        if isinstance(self.field, int):
            for _, _, v in self.pivots:
                acc = acc * v % self.field
            return acc
        for _, _, v in self.pivots:
            acc = _qnorm(acc * v)
        return acc


def pivot_sign(pivots) -> int:
    """Sign relating the pivot product to the determinant of the pivot submatrix.

    With rows and columns of the submatrix taken in increasing order, its
    determinant is ``pivot_sign * prod(values)``.
    """
    rows = sorted(r for r, _, _ in pivots)
    cols = sorted(c for _, c, _ in pivots)
    rpos = {r: i for i, r in enumerate(rows)}
    cpos = {c: i for i, c in enumerate(cols)}
    images = [0] * len(pivots)
    for r, c, _ in pivots:
        images[rpos[r]] = cpos[c] + 1
    return permutation_sign(images)


def eliminate(rows: list[dict], field, *, max_pivots: int | None = None, rng=None,
              accept: Callable[[object], bool] | None = None, deadline: float | None = None,
              copy: bool = True, markowitz: bool = True) -> Elimination:
    """Eliminate the sparse matrix given as a list of ``{col: value}`` row dicts.

    Values must already live in ``field`` (residues for a prime, ints or
    Fractions for ``"Q"``, ints for ``"ZZ"``).  The rows are consumed unless
    ``copy`` is true.  Returns the pivots; their count is the rank when the
    run is not cut short by ``max_pivots`` or by ``accept`` refusing every
    remaining entry.  ``markowitz=False`` (with ``rng``) picks pivots
    uniformly among the acceptable entries, which widens randomized searches.
    """
    if copy:
        rows = [dict(r) for r in rows]
    modp = field if isinstance(field, int) else None
    ff = field == "ZZ"
    col_rows: dict[int, set] = {}
    for i, r in enumerate(rows):
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    active = {i for i, r in enumerate(rows) if r}
    scan = rng is not None or accept is not None
    heap_c = [(len(s), c) for c, s in col_rows.items()]
    heap_r = [(len(rows[i]), i) for i in active]
    heapq.heapify(heap_c)
    heapq.heapify(heap_r)
    out = Elimination(field=field)
    limit = max_pivots if max_pivots is not None else min(len(active), len(col_rows))
    steps = 0
    while active and len(out.pivots) < limit:
        steps += 1
        if deadline is not None and steps % 256 == 0 and time.monotonic() > deadline:
            raise BudgetExceeded("elimination ran past its deadline")
        if scan:
            choice = _scan_pivot(rows, active, col_rows, rng, accept, markowitz)
            if choice is None:
                break
            r, c = choice
        else:
            r, c = _heap_pivot(rows, col_rows, heap_c, heap_r, active)
        prow = rows[r]
        pv = prow[c]
        out.pivots.append((r, c, pv))
        active.discard(r)
        for cc in prow:
            col_rows[cc].discard(r)
        items = [(cc, v) for cc, v in prow.items() if cc != c]
        targets = col_rows.pop(c)
        if modp is not None:
            inv = pow(pv, -1, modp)
        for q in targets:
            rq = rows[q]
            a = rq.pop(c)
            if modp is not None:
                f = a * inv % modp
                for cc, v in items:
                    old = rq.get(cc)
                    if old is None:
                        rq[cc] = -f * v % modp
                        col_rows[cc].add(q)
                    else:
                        nv = (old - f * v) % modp
                        if nv:
                            rq[cc] = nv
                        else:
                            del rq[cc]
                            col_rows[cc].discard(q)
            elif ff:
                if pv != 1:
                    for cc in rq:
                        rq[cc] *= pv
                for cc, v in items:
                    old = rq.get(cc)
                    if old is None:
                        rq[cc] = -a * v
                        col_rows[cc].add(q)
                    else:
                        nv = old - a * v
                        if nv:
                            rq[cc] = nv
                        else:
                            del rq[cc]
                            col_rows[cc].discard(q)
                g = 0
                for v in rq.values():
                    g = gcd(g, v)
                    if g == 1:
                        break
                if g > 1:
                    for cc in rq:
                        rq[cc] //= g
            else:
                f = _qdiv(a, pv)
                for cc, v in items:
                    old = rq.get(cc)
                    if old is None:
                        rq[cc] = _qnorm(-f * v)
                        col_rows[cc].add(q)
                    else:
                        nv = _qnorm(old - f * v)
                        if nv:
                            rq[cc] = nv
                        else:
                            del rq[cc]
                            col_rows[cc].discard(q)
            if rq:
                if not scan:
                    heapq.heappush(heap_r, (len(rq), q))
            else:
                active.discard(q)
        rows[r] = {}
        for cc, _ in items:
            s = col_rows[cc]
            if s:
                if not scan:
                    heapq.heappush(heap_c, (len(s), cc))
            else:
                del col_rows[cc]
    return out


def _heap_pivot(rows, col_rows, heap_c, heap_r, active):
    while True:
        cnt, c = heap_c[0]
        s = col_rows.get(c)
        if s is not None and len(s) == cnt:
            break
        heapq.heappop(heap_c)
    while True:
        ln, r2 = heap_r[0]
        if r2 in active and len(rows[r2]) == ln:
            break
        heapq.heappop(heap_r)
    r1 = min(col_rows[c], key=lambda q: (len(rows[q]), q))
    cost1 = (len(rows[r1]) - 1) * (cnt - 1)
    c2 = min(rows[r2], key=lambda cc: (len(col_rows[cc]), cc))
    cost2 = (ln - 1) * (len(col_rows[c2]) - 1)
    if cost2 < cost1 or (cost2 == cost1 and c2 < c):
        return r2, c2
    return r1, c


def _scan_pivot(rows, active, col_rows, rng, accept, markowitz=True):
    best = None
    ties = []
    for r in sorted(active):
        row = rows[r]
        rl = len(row) - 1
        for c, v in row.items():
            if accept is not None and not accept(v):
                continue
            cost = rl * (len(col_rows[c]) - 1) if markowitz else 0
            if best is None or cost < best:
                best = cost
                ties = [(r, c)]
            elif cost == best:
                ties.append((r, c))
    if best is None:
        return None
    if rng is None:
        return min(ties, key=lambda rc: (rc[1], rc[0]))
    return ties[rng.randrange(len(ties))]
