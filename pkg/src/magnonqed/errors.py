"""Exception types raised across the toolkit."""


class MagnonQEDError(Exception):
    """Base class for toolkit errors."""


class SingularityError(MagnonQEDError, ZeroDivisionError):
    """A formula was evaluated at (or numerically on top of) a pole."""

    def __init__(self, message, pole=None):
        super().__init__(message)
        self.pole = pole


class ResourceLimitError(MagnonQEDError):
    """A brute-force computation would exceed its size cap."""


class ConfigurationError(MagnonQEDError, ValueError):
    """The system or run configuration is missing something required."""


class ConvergenceError(MagnonQEDError, RuntimeError):
    """An iterative procedure ran out of iterations."""


class DegenerateFitError(MagnonQEDError, ValueError):
    """The fit model cannot produce a meaningful signal for the given guess."""


class InsufficientDataError(MagnonQEDError, ValueError):
    """Too few data points for the requested fit."""


class NonFiniteResidualError(MagnonQEDError, FloatingPointError):
    """The residual function returned NaN or inf during the search."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class SchemaError(MagnonQEDError, ValueError):
    """A data file does not have the expected columns or values."""
