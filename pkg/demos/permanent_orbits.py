"""
Permanent flattenings through S_n orbits
========================================

The perm_n flattening is a block matrix whose blocks S_n permutes.  One
block per orbit is enough: rank = sum over classes of n!/|H_a| * rank(block).
"""

import time

from koszulrank.exact import rank_mod_p
from koszulrank.flattening import FlatteningPlan, border_bound, divisor, rkf_matrix
from koszulrank.symmetry import symmetric_rank
from koszulrank.tensor import perm_tensor

P = 1000003

# perm_5 both ways
t = time.monotonic()
direct = rank_mod_p(rkf_matrix(perm_tensor(5)), P)
print(f"perm_5 direct rank {direct} ({time.monotonic() - t:.2f}s)")
res = symmetric_rank(perm_tensor(5), None, P)
print(res.report())

# perm_6 only through orbits: 162000 columns, 22 classes
t = time.monotonic()
res6 = symmetric_rank(perm_tensor(6), None, P)
div = divisor(FlatteningPlan.default(6), (6,) * 6)
print(f"perm_6: rank {res6.rank}, bound {border_bound(res6.rank, div)}, "
      f"{len(res6.classes)} classes ({time.monotonic() - t:.1f}s)")
