"""Environment configuration, per-run settings and logging setup."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import load_dotenv

from toric.errors import InputError
from toric.tolerance import DEFAULT_TOLERANCE, Tolerance

load_dotenv()

SEED_MAX = 2**64 - 1
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        raise InputError(f"{raw!r} is not a number", field=name) from None


def env_tolerance() -> Tolerance:
    """Tolerance from TORIC_EPS_GEOM / TORIC_EPS_OPT / TORIC_EPS_LIMIT."""
    return make_tolerance(
        _env_float("TORIC_EPS_GEOM", DEFAULT_TOLERANCE.eps_geom),
        _env_float("TORIC_EPS_OPT", DEFAULT_TOLERANCE.eps_opt),
        _env_float("TORIC_EPS_LIMIT", DEFAULT_TOLERANCE.eps_limit),
    )


def make_tolerance(eps_geom: float, eps_opt: float, eps_limit: float) -> Tolerance:
    try:
        return Tolerance(eps_geom, eps_opt, eps_limit)
    except ValueError as exc:
        raise InputError(str(exc), field="tolerance") from None


def degen_threads() -> int:
    """Worker cap from TORIC_DEGEN_THREADS; anything unusable means 1."""
    raw = os.getenv("TORIC_DEGEN_THREADS", "").strip()
    try:
        value = int(raw)
    except ValueError:
        return 1
    return value if value > 0 else 1


def configure_logging(level: str | int | None = None) -> None:
    """Install a stderr handler; only entry points call this."""
    level = level or os.getenv("TORIC_LOG_LEVEL", "WARNING")
    if isinstance(level, str):
        level = logging.getLevelName(level.strip().upper())
        if not isinstance(level, int):
            level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation: command, inputs, tolerance, seed and output directory."""

    command: str
    inputs: dict[str, Path] = field(default_factory=dict)
    tol: Tolerance = DEFAULT_TOLERANCE
    seed: int = 0
    out_dir: Path | None = None
    n_jobs: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= SEED_MAX:
            raise InputError(f"seed must lie in [0, {SEED_MAX}]", field="seed")
        if self.n_jobs < 1:
            raise InputError("at least one worker is needed", field="n_jobs")

    @classmethod
    def from_options(
        cls,
        command: str,
        inputs: dict[str, Path | None],
        *,
        seed: int = 0,
        out_dir: Path | None = None,
        tol_geom: float | None = None,
        tol_opt: float | None = None,
        tol_limit: float | None = None,
    ) -> "RunConfig":
        """Environment values overridden by whatever flags were given."""
        base = env_tolerance()
        tol = make_tolerance(
            tol_geom if tol_geom is not None else base.eps_geom,
            tol_opt if tol_opt is not None else base.eps_opt,
            tol_limit if tol_limit is not None else base.eps_limit,
        )
        return cls(
            command=command,
            inputs={name: path for name, path in inputs.items() if path is not None},
            tol=tol,
            seed=seed,
            out_dir=out_dir,
            n_jobs=degen_threads(),
        )

    def output(self, name: str) -> Path | None:
        return self.out_dir / name if self.out_dir is not None else None
