"""Exception hierarchy shared by every module."""


class FinslerError(Exception):
    """Base class for all errors raised by conicfinsler."""


class DomainError(FinslerError, ValueError):
    """Input lies outside the region where the object is defined."""


class ConvexityError(DomainError):
    """The strong convexity margin is not positive."""


class SingularityError(FinslerError, ArithmeticError):
    """A quantity that must be divided by vanishes (typically the spray)."""


class ValidationError(FinslerError, ValueError):
    """Parameters violate a documented constraint."""
