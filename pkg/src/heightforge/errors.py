"""Exception types shared across the package."""
from __future__ import annotations


class HeightforgeError(Exception):
    """Base class for all package-specific errors."""


class SpecError(HeightforgeError):
    """Malformed family or cover specification (bad JSON, bad shape)."""


class DomainError(HeightforgeError):
    """Input outside an operation's domain (pole, zero denominator, d = e, ...)."""


class NormalizationUnavailable(DomainError):
    """No rational monic conjugate exists for this family."""


class PrecisionLoss(HeightforgeError):
    """Internal: a capped-precision computation lost too many digits.

    Callers catch this and retry with a larger working precision; it never
    escapes the public API.
    """


class BudgetExceeded(HeightforgeError):
    """An iteration budget ran out before a certificate was reached.

    Carries the best certified enclosure obtained so far in ``best`` when one
    exists (a pair (lo, hi) of floats), else None.
    """

    def __init__(self, message: str, best=None, steps: int | None = None):
        super().__init__(message)
        self.best = best
        self.steps = steps
