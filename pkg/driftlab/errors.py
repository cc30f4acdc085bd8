"""
Error types raised by the drift lab library.

Tool handlers and the CLI translate these into result dictionaries and exit
statuses; library code raises them and never returns error sentinels.
"""

from typing import Optional


class LabError(Exception):
    """Base class for all library errors."""


class ConfigurationError(LabError):
    """Invalid environment setting or scenario document."""


class InvalidDimensionError(LabError):
    """Manifold dimension below 2."""


class PoleSingularityError(LabError):
    """An operation that is singular at r = 0 was evaluated at the pole."""


class ToleranceNotMetError(LabError):
    """Quadrature did not converge within its evaluation budget."""

    def __init__(self, message: str, best_estimate: float, error_estimate: Optional[float] = None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class InternalConsistencyError(LabError):
    """Sampled data violates a property it must have (e.g. monotone volume)."""


class InsufficientGridError(LabError):
    """Grid too short or too coarse for a hypothesis check."""


class InvalidExponentError(LabError):
    """Lebesgue exponent p outside its admissible range."""


class DiscretizationError(LabError):
    """The discrete boundary-value system is singular."""


class InputError(LabError):
    """Non-finite coefficient or malformed input data."""


class IntegratorOverflowError(LabError):
    """Shooting integration overflowed even after renormalisation."""


class NoDataError(LabError):
    """A plot or table was requested from an empty report section."""
