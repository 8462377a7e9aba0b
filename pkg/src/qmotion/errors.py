"""Exception types raised by qmotion."""


class QMotionError(Exception):
    """Base class for all qmotion errors."""


class InvalidParameterError(QMotionError, ValueError):
    """A physical parameter violates its validity range."""


class ConfigError(QMotionError, ValueError):
    """A solver or run configuration is invalid."""


class DegenerateRootsError(QMotionError, ArithmeticError):
    """Two roots of the characteristic cubic (nearly) coincide.

    The residue expansion is undefined there; use the Volterra solver.
    """

    def __init__(self, message, roots=None):
        super().__init__(message)
        self.roots = roots


class AmplitudeZeroError(QMotionError, ArithmeticError):
    """The excited-state amplitude vanishes, so the log-derivative rates diverge."""


class RecurrenceGuardError(ConfigError):
    """A discrete mode grid would show Poincare recurrences inside the horizon."""


class QuadratureError(QMotionError, ArithmeticError):
    """Adaptive quadrature failed to converge."""


class ScanResolutionWarning(UserWarning):
    """Adjacent extrema are too close for the chosen scan step."""


class HorizonWarning(UserWarning):
    """The time horizon was capped before the amplitude tail became negligible."""
