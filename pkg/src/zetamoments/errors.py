"""Exception types shared across the package."""


class ZetaMomentsError(Exception):
    """Base class for all package errors."""


class NoConvergence(ZetaMomentsError):
    """A series or iteration cannot converge for the given arguments."""


class PrecisionExceeded(ZetaMomentsError):
    """An internal error bound cannot be pushed below the requested target."""


class InconsistentInterpolation(ZetaMomentsError):
    """An extra interpolation point disagrees with the fitted polynomial."""


class NonzeroConstant(ZetaMomentsError):
    """series_exp requires a series with vanishing constant term."""


class ShapeTooWide(ZetaMomentsError):
    """An exponent list is longer than the number of available variables."""


class TailFitSingular(ZetaMomentsError):
    """The probe-point linear system for the prime-sum tail is singular."""


class CoincidentShifts(ZetaMomentsError):
    """Two shifts coincide where distinctness is required."""


class PoleHit(ZetaMomentsError):
    """An evaluation point sits on a pole of the integrand."""


class MissingShape(ZetaMomentsError):
    """A required determinant-factor polynomial is absent from the table."""


class ComplementUndefined(ZetaMomentsError):
    """The offsets do not embed into {0,...,2k-1}, so no complement exists."""


class DomainError(ZetaMomentsError):
    """An argument lies outside the mathematical domain of the operation."""


class ConfigError(ZetaMomentsError):
    """Invalid command-line or run configuration."""
