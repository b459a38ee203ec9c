"""Exception types shared across the package."""


class HorocurvError(Exception):
    """Base class for all package errors."""


class DomainError(HorocurvError):
    """Metric data evaluated to something non-finite or non-positive."""


class ConfigError(HorocurvError):
    """Invalid parameters, schema violations, or unusable windows."""


class NoConvergence(HorocurvError):
    """An iterative solve (shooting, Newton) ran out of iterations."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class RadiusTooSmall(HorocurvError):
    """Circle curvature requested below the integrator step."""


class PreconditionError(HorocurvError):
    """An operation was called outside its stated regime."""


class UnderResolved(HorocurvError):
    """Quadrature error estimate exceeded the accuracy contract."""


class NonPositiveMagnitude(HorocurvError):
    """A log-log fit was asked to handle zero or negative magnitudes."""


class InternalError(HorocurvError):
    """An invariant that should be mathematically impossible failed."""
