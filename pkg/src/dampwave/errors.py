"""Exception types raised across the package."""

from __future__ import annotations


class DampwaveError(Exception):
    """Base class for all package errors."""


class InvalidParams(DampwaveError, ValueError):
    pass


class RegimeMismatch(DampwaveError, ValueError):
    """A symbol family was requested outside the regime it is defined for."""


class SingularAtZero(DampwaveError, ValueError):
    pass


class OutOfRealBranch(DampwaveError, ValueError):
    """phi_sigma was requested where 1 - nu^2 r^(4 sigma - 2) / 4 < 0."""


class StepUnderflow(DampwaveError, RuntimeError):
    pass


class NonIntegrableSingularity(DampwaveError, ValueError):
    pass


class TolNotMet(DampwaveError, RuntimeError):
    """Quadrature panel budget exhausted before reaching the tolerance.

    The partial result is attached so callers can still inspect it.
    """

    def __init__(self, message: str, value: float = float("nan"), error: float = float("nan")):
        super().__init__(message)
        self.value = value
        self.error = error


class NoDecayBound(DampwaveError, ValueError):
    pass


class InsufficientPoints(DampwaveError, ValueError):
    pass


class BandViolation(DampwaveError, ValueError):
    pass
