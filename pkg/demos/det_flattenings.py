"""
Koszul flattenings of the determinant
=====================================

The flattening of det_n under the plan (1, 2, ..., n-2) is square and of
full rank for n = 3, 4, 5, giving border-rank bounds 5, 11 and 27.
"""

import time

from koszulrank.certificate import render_int
from koszulrank.exact import det_bareiss, det_mod_p, draw_primes, rank_rational
from koszulrank.flattening import FlatteningPlan, border_bound, divisor, rkf_matrix
from koszulrank.tensor import det_tensor

# n = 3: a 9 x 9 isomorphism
m3 = rkf_matrix(det_tensor(3))
print("det_3:", m3.shape, "rank", rank_rational(m3), "bound", border_bound(9, divisor(FlatteningPlan.default(3), (3,) * 3)))

# n = 4: the exact determinant is a power of two
m4 = rkf_matrix(det_tensor(4))
d4 = det_bareiss(m4)
print("det_4:", m4.shape, "det", render_int(d4), "bound", border_bound(96, 9))

# n = 5 is 2500 x 2500; compare residues against +-2^1600 * 3^25
t = time.monotonic()
m5 = rkf_matrix(det_tensor(5))
claimed = 2**1600 * 3**25
for p in draw_primes(3, seed=0):
    r = det_mod_p(m5, p)
    print(f"  p = {p}: residue matches {'+' if r == claimed % p else '-' if r == -claimed % p else 'NEITHER'}")
print("det_5:", m5.shape, "bound", border_bound(2500, divisor(FlatteningPlan.default(5), (5,) * 5)),
      f"({time.monotonic() - t:.1f}s)")
