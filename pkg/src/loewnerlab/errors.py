"""Exception types shared across the package.

Each error maps to a distinct CLI exit status so batch drivers can tell a
theory-level refusal (non-normalizable law) from a bad request (validation)
or a clock that ran past its tabulated range.
"""


class LoewnerLabError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(LoewnerLabError, ValueError):
    """Raised when an input violates a documented precondition."""


class HorizonExceededError(LoewnerLabError):
    """Requested clock value lies beyond the tabulated range of the time change."""


class NonNormalizableError(LoewnerLabError):
    """The stationary density is not integrable (tail exponent 8/kappa <= 1)."""


class DivergentRegionError(LoewnerLabError):
    """Hypergeometric evaluation requested outside the supported real domain."""


class PoleError(LoewnerLabError):
    """Evaluation at a pole of gamma/digamma, or c a nonpositive integer."""
