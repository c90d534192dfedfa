"""Exact rank and determinant engines over Q and prime fields."""

from .elimination import Elimination, eliminate, pivot_sign
from .modp import PRIMES_62, det_crt, det_mod_p, draw_primes, hadamard_bound, primes_for_bound, rank_mod_p
from .rational import det_bareiss, det_rational, rank_rational
from .param import LinearForm, ParamMatrix, det_identity_test, det_univariate, param_flattening
from .submatrix import SubmatrixCertificate, find_unit_submatrix, verify_submatrix

__all__ = [
    "Elimination", "eliminate", "pivot_sign",
    "PRIMES_62", "draw_primes", "rank_mod_p", "det_mod_p", "det_crt", "hadamard_bound", "primes_for_bound",
    "rank_rational", "det_bareiss", "det_rational",
    "LinearForm", "ParamMatrix", "param_flattening", "det_univariate", "det_identity_test",
    "SubmatrixCertificate", "find_unit_submatrix", "verify_submatrix",
]
