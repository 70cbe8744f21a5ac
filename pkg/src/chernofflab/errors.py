"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when an operation receives arguments outside its contract."""


class PreconditionError(InputError):
    """Raised when a documented precondition fails (e.g. centering probes)."""


class GridTooSmallError(InputError):
    """Raised when a parameter grid is too small for the requested quantity."""


class ConfigError(ValueError):
    """Raised for malformed experiment configuration files."""

    def __init__(self, message, line=None, field=None):
        super().__init__(message)
        self.line = line
        self.field = field


class DegenerateSetError(InputError):
    """Raised when an event has probability zero for every sample size."""
