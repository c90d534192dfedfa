"""
Why det_4 has tensor rank 12
============================

If det_4 had rank 11 then det_4 - S would have border rank <= 10 for some
rank-one S.  Up to symmetry S falls into four families; for each one the
flattening of det_4 - S keeps rank >= 91, so its border rank is >= 11.
"""

import sympy

from koszulrank.certify import CASE_FAMILIES, certify_det4_rank12, render_poly
from koszulrank.exact import det_univariate, rank_rational

# the family S = x e1 (x) e2 (x) e3 (x) e4: a 96 x 96 matrix linear in x
fam = CASE_FAMILIES[4]
pm = fam.matrix()
poly = det_univariate(pm, "x")
print(fam.description)
print("  det =", render_poly(poly))
for root in (1, 2, 4):
    print(f"  x = {root}: rank {rank_rational(pm.evaluate({'x': root}))}")

# the whole case analysis, as a certificate
cert = certify_det4_rank12(0)
print(cert.verdict, "-", cert["claim"])
print("case ranks", dict(zip(cert["fact.case_keys"].split(), cert["fact.case_ranks"])))
print("worst case bound: ceil(91/9) + 1 =", sympy.ceiling(sympy.Rational(91, 9)) + 1)
