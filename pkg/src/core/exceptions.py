"""
Exception hierarchy for the weighted Bargmann lab.

All errors derive from ValueError so callers that only know about bad input
keep working; the CLI maps the classes below onto process exit codes.
"""


class WeylLabError(ValueError):
    """Base class for every error raised by the lab."""

    exit_code: int = 1


class ConfigError(WeylLabError):
    """Invalid or unknown configuration."""

    exit_code = 2


class InvariantError(WeylLabError):
    """A checked identity failed beyond its tolerance."""

    exit_code = 1


class ConditioningError(WeylLabError):
    """A Gram matrix or linear solve is too ill-conditioned to trust."""

    exit_code = 3


class IntegrabilityError(WeylLabError):
    """A Gaussian combination is not integrable against the weight."""

    exit_code = 3


class OffLambdaError(WeylLabError):
    """A point expected on Lambda_Phi0 is not on it."""


class UnsupportedSymbolError(WeylLabError):
    """The requested operation does not accept this symbol kind."""


class FitError(WeylLabError):
    """Decay fit could not be carried out on the supplied samples."""


class OscillationWarning(UserWarning):
    """Quadrature grid is too coarse for the oscillation scale of the integrand."""
