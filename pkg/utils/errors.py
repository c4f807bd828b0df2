"""
Exception hierarchy shared by every package.

Each error carries the process exit code the command line reports for it.
"""
from typing import Optional


class CompositeDiffusionError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1


class ConfigError(CompositeDiffusionError):
    """Malformed configuration file or unknown/out-of-range field."""

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")


class InvalidParameter(CompositeDiffusionError, ValueError):
    """A parameter lies outside the range an operation accepts."""

    exit_code = 2


class MinLength(InvalidParameter):
    """A series is too short for the requested window."""


class InvalidData(CompositeDiffusionError, ValueError):
    """Input data is not finite or otherwise unusable."""

    exit_code = 3


class DegenerateData(InvalidData):
    """Input data collapses a statistic (e.g. all distances zero)."""


class ShapeError(CompositeDiffusionError):
    """Array dimensions or axes do not agree."""

    exit_code = 3


class DataParseError(InvalidData):
    """A data file could not be parsed."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = path or "<input>"
        if line is not None:
            where = f"{where}:{line}"
        super().__init__(f"{where}: {message}")


class NumericalFailure(CompositeDiffusionError):
    """A decomposition failed or produced nothing usable."""

    exit_code = 4


class SymmetryViolation(NumericalFailure):
    """A matrix expected to be (anti)symmetric is not, within tolerance."""
