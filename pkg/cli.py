"""Command-line interface: subdivide, secondary, birch, limit, degenerate, verify.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import contextlib
import logging
from pathlib import Path
from typing import Annotated, Iterator, Optional

import numpy as np
import typer

import fixtures
from config import RunConfig, configure_logging
from toric.errors import ConvergenceError, InputError, ToricError
from toric.pointconfig import PointConfig
from tools.birch import build_birch
from tools.degenerations import DEFAULT_DENSITY, DEFAULT_SCHEDULE, build_degeneration
from tools.limits import build_limit
from tools.secondary import build_secondary
from tools.subdivisions import build_subdivision
from tools.verification import SUITE_NAMES, build_verify

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

app = typer.Typer(
    name="toric",
    help="Irrational toric geometry: subdivisions, secondary polytopes, moment maps, limits and degenerations.",
    add_completion=False,
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)

ConfigPath = Annotated[Path, typer.Option("--config", help="Point configuration JSON.")]
Seed = Annotated[int, typer.Option("--seed", help="Random seed (unsigned 64-bit).")]
OutDir = Annotated[Optional[Path], typer.Option("--out", help="Directory for JSON/SVG/CSV outputs.")]
Svg = Annotated[bool, typer.Option("--svg", help="Also write an SVG figure (needs --out).")]
TolGeom = Annotated[Optional[float], typer.Option("--tol-geom", help="Geometric tolerance.")]
TolOpt = Annotated[Optional[float], typer.Option("--tol-opt", help="Optimizer tolerance.")]
TolLimit = Annotated[Optional[float], typer.Option("--tol-limit", help="Limit-detection tolerance.")]


@contextlib.contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except ConvergenceError as exc:
        typer.echo(f"error: {exc} (residual {exc.residual:.3g})", err=True)
        raise typer.Exit(EXIT_FAILED) from None
    except ToricError as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_INPUT) from None


def _emit(run: RunConfig, payload: dict, *, svg: str | None = None, want_svg: bool = False) -> None:
    typer.echo(fixtures.dumps(payload), nl=False)
    target = run.output(f"{run.command}.json")
    if target is not None:
        fixtures.write_json(target, payload)
    if not want_svg:
        return
    if svg is None:
        typer.echo("note: no figure for this input (plots are two-dimensional only)", err=True)
        return
    fixtures.write_atomic(run.output(f"{run.command}.svg"), svg)


def _require_out(run: RunConfig, flag: str) -> None:
    if run.out_dir is None:
        raise InputError("needs --out DIR", field=flag)


def _values(text: str, config: PointConfig, *, field: str) -> np.ndarray:
    """A JSON file keyed by label, or comma-separated numbers in label order."""
    path = Path(text)
    if path.suffix == ".json" or path.is_file():
        return fixtures.load_values(path, config.labels, field=field)
    vec = fixtures.parse_vector(text, field=field)
    if vec.shape[0] != len(config):
        raise InputError(f"expected {len(config)} values, got {vec.shape[0]}", field=field)
    return vec


def _cone_key(text: str | None) -> int | str | None:
    if text is None:
        return None
    return int(text) if text.isdigit() else text


@app.callback()
def main(
    log_level: Annotated[Optional[str], typer.Option("--log-level", help="Overrides TORIC_LOG_LEVEL.")] = None,
) -> None:
    configure_logging(log_level)


@app.command()
def subdivide(
    config: ConfigPath,
    lift: Annotated[str, typer.Option("--lift", help="Lift JSON {label: value} or comma-separated values.")],
    axes: Annotated[Optional[str], typer.Option("--axes", help="Coordinate pair to draw, e.g. 0,2.")] = None,
    seed: Seed = 0,
    out: OutDir = None,
    svg: Svg = False,
    tol_geom: TolGeom = None,
    tol_opt: TolOpt = None,
    tol_limit: TolLimit = None,
) -> None:
    """Regular subdivision S(λ) of a configuration."""
    with _exit_codes():
        run = RunConfig.from_options(
            "subdivide", {"config": config}, seed=seed, out_dir=out,
            tol_geom=tol_geom, tol_opt=tol_opt, tol_limit=tol_limit,
        )
        if svg:
            _require_out(run, "svg")
        points = fixtures.load_config(config, tol=run.tol)
        pair = None if axes is None else [int(x) for x in fixtures.parse_vector(axes, field="axes")]
        if pair is not None and (len(pair) != 2 or not all(0 <= a < points.dim for a in pair)):
            raise InputError(f"expected two coordinates below {points.dim}", field="axes")
        payload, figure = build_subdivision(points, _values(lift, points, field="lift"), axes=pair, with_svg=svg)
        _emit(run, payload, svg=figure, want_svg=svg)


@app.command()
def secondary(
    config: ConfigPath,
    budget: Annotated[int, typer.Option("--budget", help="Number of random lifts.")] = 200,
    seed: Seed = 0,
    out: OutDir = None,
    svg: Svg = False,
    tol_geom: TolGeom = None,
    tol_opt: TolOpt = None,
    tol_limit: TolLimit = None,
) -> None:
    """Regular triangulations and GKZ vertices of the secondary polytope."""
    with _exit_codes():
        run = RunConfig.from_options(
            "secondary", {"config": config}, seed=seed, out_dir=out,
            tol_geom=tol_geom, tol_opt=tol_opt, tol_limit=tol_limit,
        )
        if svg:
            _require_out(run, "svg")
        points = fixtures.load_config(config, tol=run.tol)
        payload, figure = build_secondary(points, budget, run.seed, n_jobs=run.n_jobs, with_svg=svg)
        if payload["budget_exhausted"]:
            typer.echo("warning: enumeration budget exhausted", err=True)
        _emit(run, payload, svg=figure, want_svg=svg)


@app.command()
def birch(
    config: ConfigPath,
    target: Annotated[str, typer.Option("--target", help="Target moment u, comma-separated.")],
    weights: Annotated[Optional[str], typer.Option("--weights", help="Weights JSON or comma-separated values.")] = None,
    out: OutDir = None,
    tol_geom: TolGeom = None,
    tol_opt: TolOpt = None,
    tol_limit: TolLimit = None,
) -> None:
    """Invert the moment map: the z in w.Z_A over the target."""
    with _exit_codes():
        run = RunConfig.from_options(
            "birch", {"config": config}, out_dir=out,
            tol_geom=tol_geom, tol_opt=tol_opt, tol_limit=tol_limit,
        )
        points = fixtures.load_config(config, tol=run.tol)
        w = None if weights is None else _values(weights, points, field="weights")
        u = fixtures.parse_vector(target, field="target")
        payload = build_birch(points, w, u)
        _emit(run, payload)
        if payload["residual"] > payload["tolerance"]:
            raise typer.Exit(EXIT_FAILED)


@app.command()
def limit(
    fan: Annotated[Path, typer.Option("--fan", help="Fan JSON.")],
    direction: Annotated[str, typer.Option("--direction", help="Direction v, comma-separated.")],
    cone: Annotated[Optional[str], typer.Option("--cone", help="Cone label or id of the start point.")] = None,
    coord: Annotated[Optional[str], typer.Option("--coord", help="Orbit coordinate of the start point.")] = None,
    out: OutDir = None,
    tol_geom: TolGeom = None,
    tol_opt: TolOpt = None,
    tol_limit: TolLimit = None,
) -> None:
    """Limit of γ_{sv}.p as s → ∞ (p defaults to the dense point ε)."""
    with _exit_codes():
        run = RunConfig.from_options(
            "limit", {"fan": fan}, out_dir=out,
            tol_geom=tol_geom, tol_opt=tol_opt, tol_limit=tol_limit,
        )
        parsed = fixtures.load_fan(fan, tol=run.tol)
        v = fixtures.parse_vector(direction, field="direction")
        x = None if coord is None else fixtures.parse_vector(coord, field="coord")
        payload = build_limit(parsed, v, cone=_cone_key(cone), coord=x)
        _emit(run, payload)


@app.command()
def degenerate(
    config: ConfigPath,
    direction: Annotated[str, typer.Option("--direction", help="Direction v: JSON {label: value} or comma-separated.")],
    weights: Annotated[Optional[str], typer.Option("--weights", help="Weights JSON or comma-separated values.")] = None,
    schedule: Annotated[str, typer.Option("--schedule", help="start:end:step (end included).")] = DEFAULT_SCHEDULE,
    density: Annotated[int, typer.Option("--density", help="Samples per facet.")] = DEFAULT_DENSITY,
    seed: Seed = 0,
    out: OutDir = None,
    svg: Svg = False,
    csv: Annotated[bool, typer.Option("--csv", help="Export the limit and final clouds as CSV (needs --out).")] = False,
    tol_geom: TolGeom = None,
    tol_opt: TolOpt = None,
    tol_limit: TolLimit = None,
) -> None:
    """Hausdorff distances of w·exp(-s·v).Z_A to Z(S(v), w) along a schedule."""
    with _exit_codes():
        run = RunConfig.from_options(
            "degenerate", {"config": config}, seed=seed, out_dir=out,
            tol_geom=tol_geom, tol_opt=tol_opt, tol_limit=tol_limit,
        )
        if svg:
            _require_out(run, "svg")
        if csv:
            _require_out(run, "csv")
        points = fixtures.load_config(config, tol=run.tol)
        w = None if weights is None else _values(weights, points, field="weights")
        v = _values(direction, points, field="direction")
        report, payload, figure = build_degeneration(
            points, w, v, fixtures.parse_schedule(schedule), density, run.seed,
            n_jobs=run.n_jobs, with_svg=svg,
        )
        _emit(run, payload, svg=figure, want_svg=svg)
        if csv:
            fixtures.write_csv(run.output("degenerate_limit.csv"), report.target.to_frame())
            fixtures.write_csv(run.output("degenerate_final.csv"), report.final.to_frame())
        if not report.passed:
            raise typer.Exit(EXIT_FAILED)


@app.command()
def verify(
    suite: Annotated[str, typer.Argument(help="One of: " + ", ".join(SUITE_NAMES))],
    seed: Seed = 0,
    scale: Annotated[float, typer.Option("--scale", help="Multiplier on sample counts.")] = 1.0,
    out: OutDir = None,
) -> None:
    """Run a numerical property suite and report pass/fail."""
    with _exit_codes():
        run = RunConfig.from_options("verify", {}, seed=seed, out_dir=out)
        if not scale > 0:
            raise InputError("scale must be positive", field="scale")
        payload = build_verify(suite, run.seed, scale=scale)
        _emit(run, payload)
        if not payload["passed"]:
            raise typer.Exit(EXIT_FAILED)


if __name__ == "__main__":
    app()
