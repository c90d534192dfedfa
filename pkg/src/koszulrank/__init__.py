"""Recursive Koszul flattenings, exact sparse linear algebra and border-rank certificates."""

__version__ = "0.1.0"

from .errors import (BadPrime, BudgetExceeded, EquivarianceViolation, InternalError, InvalidArgument,
                     KoszulError, NeedMorePrimes, SearchExhausted, TooLarge)
from .tensor import (RankOneTerm, Tensor, basis_vector, det_tensor, expand_rank_one, linear_combine, perm_tensor,
                     verify_decomposition)
from .exterior import BasisElement, ProductBasis, WedgeIndex, lambda_basis, product_index, product_unindex, wedge_insert
from .sparse import SparseMatrix
from .flattening import FlatteningPlan, KoszulMap, border_bound, classical_flattening, divisor, kf_step, rkf_matrix
from .exact import det_bareiss, det_crt, det_mod_p, hadamard_bound, rank_mod_p, rank_rational
from .symmetry import (Permutation, act, connected_components, equivariance_check, orbit_classes,
                       symmetric_group, symmetric_rank)
from .certificate import Certificate

__all__ = [
    "__version__",
    "KoszulError", "InvalidArgument", "BadPrime", "TooLarge", "NeedMorePrimes", "SearchExhausted",
    "EquivarianceViolation", "BudgetExceeded", "InternalError",
    "Tensor", "RankOneTerm", "basis_vector", "det_tensor", "perm_tensor", "expand_rank_one",
    "linear_combine", "verify_decomposition",
    "WedgeIndex", "BasisElement", "ProductBasis", "lambda_basis", "wedge_insert", "product_index",
    "product_unindex",
    "SparseMatrix",
    "FlatteningPlan", "KoszulMap", "rkf_matrix", "classical_flattening", "kf_step", "divisor", "border_bound",
    "rank_mod_p", "rank_rational", "det_bareiss", "det_mod_p", "det_crt", "hadamard_bound",
    "Permutation", "act", "symmetric_group", "equivariance_check", "connected_components", "orbit_classes",
    "symmetric_rank",
    "Certificate",
]
