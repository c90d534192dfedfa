"""Rank and determinant over prime fields, the 62-bit prime table, CRT lifting."""

from __future__ import annotations

import random
from math import isqrt, prod

from sympy import isprime
from sympy.ntheory.modular import crt

from ..errors import InvalidArgument, NeedMorePrimes
from ..sparse import Q, SparseMatrix
from .elimination import eliminate, pivot_sign

__all__ = [
    "PRIMES_62",
    "draw_primes",
    "as_prime_field",
    "rank_mod_p",
    "det_mod_p",
    "hadamard_bound",
    "det_crt",
]

# The 64 largest primes below 2**62, stored as offsets.
_OFFSETS = (
    57, 87, 117, 143, 153, 167, 171, 195, 203, 273, 287, 317, 443, 483, 495, 575,
    581, 603, 633, 663, 765, 773, 777, 791, 813, 831, 923, 981, 993, 1001, 1007, 1017,
    1197, 1241, 1293, 1353, 1433, 1515, 1553, 1575, 1581, 1595, 1617, 1673, 1697, 1701, 1703, 1823,
    1881, 1911, 1923, 2043, 2073, 2103, 2141, 2187, 2217, 2247, 2285, 2351, 2367, 2375, 2397, 2421,
)
PRIMES_62 = tuple(2**62 - k for k in _OFFSETS)


def draw_primes(k: int, seed: int) -> list[int]:
    """``k`` distinct primes from :data:`PRIMES_62`, drawn with a seeded PRNG."""
    if not 0 <= k <= len(PRIMES_62):
        raise InvalidArgument(f"can draw at most {len(PRIMES_62)} primes, asked for {k}")
    return random.Random(seed).sample(PRIMES_62, k)


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or p < 3 or not isprime(p):
        raise InvalidArgument(f"modulus must be an odd prime, got {p!r}")


def as_prime_field(m: SparseMatrix, p: int) -> SparseMatrix:
    """Reduce ``m`` modulo ``p``; raises :class:`BadPrime` on a vanishing denominator."""
    _check_prime(p)
    return m.mod(p)


def rank_mod_p(m: SparseMatrix, p: int, *, deadline: float | None = None) -> int:
    """Rank of ``m`` over F_p by sparse elimination."""
    mp = as_prime_field(m, p)
    return eliminate(mp.row_dicts(), p, copy=False, deadline=deadline).rank


def det_mod_p(m: SparseMatrix, p: int) -> int:
    """Determinant of a square matrix modulo ``p``, as a residue in ``[0, p)``."""
    if m.rows != m.cols:
        raise InvalidArgument(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    mp = as_prime_field(m, p)
    el = eliminate(mp.row_dicts(), p, copy=False)
    if el.rank < m.rows:
        return 0
    return pivot_sign(el.pivots) * el.product() % p


def hadamard_bound(m: SparseMatrix) -> int:
    """``ceil(prod_rows ||row||_2)``, an upper bound on ``|det m|`` for integer ``m``."""
    if m.rows != m.cols:
        raise InvalidArgument("Hadamard bound needs a square matrix")
    if m.field != Q or not m.is_integral():
        raise InvalidArgument("Hadamard bound needs an integer matrix")
    sq = [0] * m.rows
    for (r, _), v in m.entries.items():
        sq[r] += v * v
    P = prod(sq)
    return 0 if P == 0 else isqrt(P - 1) + 1


def det_crt(m: SparseMatrix, primes, bound: int | None = None) -> int:
    """Exact integer determinant from residues modulo ``primes``.

    The product of the primes must exceed ``2 * bound`` (the Hadamard bound
    when ``bound`` is omitted); the result is the symmetric lift.
    """
    if bound is None:
        bound = hadamard_bound(m)
    primes = list(primes)
    if len(set(primes)) != len(primes):
        raise InvalidArgument("primes must be distinct")
    P = prod(primes)
    if P <= 2 * bound:
        raise NeedMorePrimes(f"product of primes ({P.bit_length()} bits) does not exceed 2*bound "
                             f"({(2 * bound).bit_length()} bits)")
    residues = [det_mod_p(m, p) for p in primes]
    x, _ = crt(primes, residues)
    x = int(x)
    return x - P if x > P // 2 else x


def primes_for_bound(bound: int, primes=PRIMES_62) -> list[int]:
    """The shortest prefix of ``primes`` whose product exceeds ``2 * bound``."""
    out = []
    acc = 1
    for p in primes:
        if acc > 2 * bound:
            break
        out.append(p)
        acc *= p
    if acc <= 2 * bound:
        raise NeedMorePrimes(f"the prime table cannot cover a {bound.bit_length()}-bit bound")
    return out
