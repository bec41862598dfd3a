"""Custom exceptions for sensing-matrix design and recovery."""


class WignerCSError(Exception):
    """Base exception for all package errors."""


class DomainError(WignerCSError, ValueError):
    """Raised when a numeric argument lies outside its admissible domain."""


class DimensionError(WignerCSError, ValueError):
    """Raised when array shapes or grid definitions do not agree."""


class DegenerateColumnError(WignerCSError):
    """Raised when a sensing-matrix column has zero Euclidean norm."""

    def __init__(self, message: str, column: int | None = None):
        self.column = column
        super().__init__(message)


class FormatError(WignerCSError):
    """Raised when a CSV/JSON input file cannot be read."""

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(message)


class ConfigError(WignerCSError):
    """Raised when configuration is invalid."""
