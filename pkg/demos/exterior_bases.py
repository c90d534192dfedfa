"""
Exterior powers and ordered product bases
=========================================

Wedge monomials are indexed by their supports, ordered lexicographically.
A flattening's column and row spaces are tensor products of such factors.
"""

from koszulrank.exterior import ProductBasis, WedgeIndex, lambda_basis, subset_rank, wedge_insert
from koszulrank.flattening import FlatteningPlan
from koszulrank.symmetry import Permutation, act

# the 2-subsets of {1,2,3,4}, in order, with their ranks
for w in lambda_basis(4, 2):
    print(subset_rank(w), w)

# inserting e_2 into e_1 ^ e_3 moves it past one smaller index: a sign flip
print(wedge_insert(2, WedgeIndex(4, (1, 3))))
# inserting an index that is already present kills the monomial
print(wedge_insert(3, WedgeIndex(4, (1, 3))))

# the column basis of the default det_4 / perm_4 flattening
plan = FlatteningPlan.default(4)
cols = ProductBasis(plan.column_shape((4,) * 4))
print(plan, "->", cols.size, "columns")
print("first:", cols[0], " second:", cols[1], " last:", cols[-1])

# S_4 acts on basis elements up to sign
x = cols[cols.index((WedgeIndex(4, (1,)), WedgeIndex(4, (1, 2)), 3))]
print(x, "->", act(Permutation.cycle(4, 1, 2), x))
