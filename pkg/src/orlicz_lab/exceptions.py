"""Exception types raised across the package."""


class OrliczLabError(Exception):
    """Base class for all package errors."""


class RangeError(OrliczLabError, ValueError):
    """Argument outside the representable range of a function model."""


class InvariantViolation(OrliczLabError, ValueError):
    """Input data breaks a structural invariant (monotonicity, positivity, ...)."""


class NotRegularizable(OrliczLabError):
    """The Delta_2 constant of a function exceeds the configured cap."""


class NotInSpace(OrliczLabError):
    """A modular integral diverges, so the function is not in the space."""


class PreconditionError(OrliczLabError, ValueError):
    """A documented precondition of an operation does not hold."""
