"""Exception types shared across the package.

Every failure mode the library promises to detect maps to one of these, so
callers (and the CLI) can distinguish "you asked for something outside the
validity domain" from "the numerics did not reach the requested accuracy".
"""


class LandauError(Exception):
    """Base class for all package errors."""


class DomainError(LandauError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class SingularityError(LandauError, ValueError):
    """Spectral parameter too close to an excluded eigenvalue.

    Carries the offending level index in ``level`` when known.
    """

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class AccuracyError(LandauError, RuntimeError):
    """Quadrature or series did not converge to the requested tolerance.

    ``achieved`` holds the best error estimate that was reached.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class QuadratureInadequacyError(LandauError, RuntimeError):
    """Assembled matrix violates a structural bound (hermiticity, spectral
    range) by more than quadrature noise; the grid needs refinement."""


class TruncationInadequacyError(LandauError, RuntimeError):
    """Basis truncation too small for the requested computation."""


class EndpointError(LandauError, ValueError):
    """Spectral interval endpoint too close to an eigenvalue.

    ``nearest`` lists the closest eigenvalues found near the endpoints.
    """

    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest if nearest is not None else []


class ContourError(LandauError, RuntimeError):
    """Integration contour passes too close to the spectrum."""


class ConfigError(LandauError, ValueError):
    """Invalid or unknown configuration content."""
