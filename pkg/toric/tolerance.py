"""Numerical tolerances shared by every geometric decision."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerance:
    eps_geom: float = 1e-9
    eps_opt: float = 1e-10
    eps_limit: float = 1e-6

    def __post_init__(self) -> None:
        for name in ("eps_geom", "eps_opt", "eps_limit"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.eps_opt > self.eps_geom:
            raise ValueError(
                f"eps_opt ({self.eps_opt}) must not exceed eps_geom ({self.eps_geom})"
            )

    def scaled(self, magnitude: float) -> float:
        """Absolute geometric threshold for quantities of the given size."""
        return self.eps_geom * max(1.0, float(magnitude))


DEFAULT_TOLERANCE = Tolerance()
