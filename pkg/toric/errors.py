"""Exception hierarchy for the toric library."""

from __future__ import annotations

from typing import Any


class ToricError(Exception):
    """Base class for every error raised by the library."""


class DimensionMismatch(ToricError, ValueError):
    pass


class InvalidCone(ToricError, ValueError):
    pass


class InvalidFan(ToricError, ValueError):
    pass


class UnknownCone(ToricError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown cone"


class InfeasibleDecomposition(ToricError, ValueError):
    pass


class NotATriangulation(ToricError, ValueError):
    pass


class OutsideHull(ToricError, ValueError):
    pass


class NotAMember(ToricError, ValueError):
    pass


class ConvergenceError(ToricError, RuntimeError):
    def __init__(self, message: str, *, residual: float, iterations: int) -> None:
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NotAFanMap(ToricError, ValueError):
    def __init__(self, message: str, *, cone: Any) -> None:
        super().__init__(message)
        self.cone = cone


class InputError(ToricError, ValueError):
    """Malformed user input; ``field`` locates the offending entry."""

    def __init__(self, message: str, *, field: str | None = None) -> None:
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
