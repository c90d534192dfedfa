"""Exception hierarchy shared by every module of the package."""


class KoszulError(Exception):
    """Base class for all errors raised by koszulrank."""


class InvalidArgument(KoszulError, ValueError):
    pass


class BadPrime(KoszulError, ValueError):
    """A denominator vanishes modulo the requested prime."""


class TooLarge(KoszulError):
    """The input exceeds the configured size cap of an exact routine."""


class NeedMorePrimes(KoszulError):
    """The product of the supplied primes does not cover the determinant bound."""


class SearchExhausted(KoszulError):
    """A randomized search ran out of retries. This is not a disproof."""


class EquivarianceViolation(KoszulError):
    """The symmetric-group bookkeeping found an inconsistency."""


class BudgetExceeded(KoszulError):
    """A wall-clock budget ran out before the computation finished."""


class InternalError(KoszulError):
    """An internal consistency check failed (e.g. a degree bound was violated)."""
