"""Exception types shared across the package."""


class RotospecError(Exception):
    """Base class for all errors raised by rotospec."""


class DomainError(RotospecError, ValueError):
    """An argument lies outside the domain of the operation."""


class InsufficientPrecision(RotospecError, ArithmeticError):
    """The available enclosure is too wide to certify the requested fact."""


class FiniteExpansionExhausted(RotospecError, IndexError):
    """A rational continued fraction ran out of partial quotients."""


class InsufficientConvergents(RotospecError):
    """The representation cannot produce convergents reaching the horizon."""


class EigenCollision(RotospecError):
    """The point lambda coincides with r**n, so the divisor vanishes."""

    def __init__(self, n, message=None):
        self.n = n
        super().__init__(message or f"lambda = r**{n}: divisor vanishes at n={n}")


class BitBudgetExceeded(RotospecError):
    """An exact integer would exceed the configured bit budget."""
