"""Exception types shared across the package."""

from __future__ import annotations


class PolyhamError(Exception):
    """Base class for all package-specific errors."""


class ParseError(PolyhamError):
    """Malformed system-definition input."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            message = f"{where}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class MappingError(PolyhamError):
    """A pipeline stage received input violating its contract."""

    def __init__(self, message: str, stage: str | None = None):
        if stage is not None:
            message = f"{stage}: {message}"
        super().__init__(message)
        self.stage = stage


class ReconstructionError(PolyhamError):
    """Classical variables could not be recovered from a quantum state."""

    def __init__(self, message: str, step: int | None = None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


class SimulationError(PolyhamError):
    """Trajectory evolution failed."""


class GridMismatchError(PolyhamError):
    """Diagnostics inputs do not share a recording grid."""
