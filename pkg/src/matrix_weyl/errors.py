# -*- encoding: utf-8 -*-
"""
Error hierarchy for matrix-weyl.

Every failure raised by the toolkit derives from SpectralError. Each subclass
also derives from the closest builtin so callers that only know about
ValueError / ArithmeticError keep working.

Non-convergence of an iteration is not an error: it is reported through the
``converged`` flag of the evaluation it belongs to.
"""

from typing import Optional


class SpectralError(Exception):
    """Base class for all matrix-weyl errors."""


class InvalidInputError(SpectralError, ValueError):
    """Input outside the documented domain (non-finite entries, Im z <= 0, empty grid)."""


class NotPositiveDefiniteError(SpectralError, ValueError):
    """A matrix expected to be positive definite is not."""

    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class IllConditionedError(SpectralError, ArithmeticError):
    """Inverse or linear solve with a condition estimate above the limit."""

    def __init__(self, message: str, estimate: float, site: Optional[int] = None):
        super().__init__(message)
        self.estimate = estimate
        self.site = site


class GrowthError(SpectralError, OverflowError):
    """Unnormalized recurrence or transfer product left the representable range."""

    def __init__(self, message: str, last_stable_site: int):
        super().__init__(message)
        self.last_stable_site = last_stable_site


class SpecViolationError(SpectralError, ValueError):
    """A generated potential value breaks symmetry or the declared bound C."""

    def __init__(self, message: str, site: int):
        super().__init__(message)
        self.site = site


class DegenerateConfigurationError(SpectralError, ArithmeticError):
    """Geometric configuration without a finite answer (singular CZ+D, r_k >= 1)."""


class InvalidMapError(SpectralError, ValueError):
    """Fractional linear map that does not send the Siegel space into itself."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class SiteRangeError(SpectralError, KeyError):
    """A sequence was queried at a site where it has no sample."""

    def __init__(self, message: str, site: int):
        super().__init__(message)
        self.site = site

    def __str__(self) -> str:
        return self.args[0] if self.args else ""


class IdentityViolationError(SpectralError, AssertionError):
    """An algebraic identity checked at runtime failed its tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual
