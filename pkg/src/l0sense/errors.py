"""Exception hierarchy shared by every l0sense module."""


class SensingError(Exception):
    """Base class for all l0sense errors."""


class DomainError(SensingError, ValueError):
    """An argument lies outside the domain of the operation."""


class InfeasibleError(SensingError):
    """The requested construction cannot exist under the given constraints.

    ``capacity`` carries the largest achievable column count when known.
    """

    def __init__(self, message, capacity=None):
        super().__init__(message)
        self.capacity = capacity


class InvalidMatrixError(SensingError, ValueError):
    """The matrix cannot support one-sparse recovery (e.g. duplicate columns)."""


class MatrixParseError(SensingError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(SensingError, ValueError):
    """Invalid sweep configuration."""
