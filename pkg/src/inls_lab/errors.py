"""Exception hierarchy shared across the package."""


class InlsLabError(Exception):
    """Base class for all package errors."""


class ConfigurationError(InlsLabError, ValueError):
    """Invalid grid, parameter or run configuration."""


class OperatorError(InlsLabError):
    """A multiplier or matrix realization is ill-defined or inconsistent."""


class StateError(InlsLabError):
    """The evolving state left the admissible range (NaN, Inf or blow-up)."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NumericalError(InlsLabError):
    """A linear-algebra routine failed."""


class SnapshotError(InlsLabError, OSError):
    """Malformed or truncated snapshot file."""
