"""Exception hierarchy shared across the package.

Two failure families matter to callers: bad inputs (``ValidationError``,
CLI exit code 2) and numerical breakdowns such as separation or rank
deficiency (``NumericalError``, CLI exit code 3).
"""


class TargetLearnError(Exception):
    """Base class for all package errors."""


class ValidationError(TargetLearnError, ValueError):
    """Raised when inputs violate a documented precondition or schema."""


class NumericalError(TargetLearnError, RuntimeError):
    """Raised when an estimator fails numerically (separation, rank loss,
    non-convergence)."""
