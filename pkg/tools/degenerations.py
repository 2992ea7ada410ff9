"""Toric degeneration tools: Hausdorff limits of translated varieties."""

from __future__ import annotations

from typing import Any, Sequence

import numpy as np
from mcp.server.fastmcp import FastMCP
from mcp.types import CallToolResult, ToolAnnotations

import fixtures
from config import degen_threads, env_tolerance
from toric.errors import ToricError
from toric.moduli import DegenerationReport, degenerate
from toric.pointconfig import PointConfig
from tools.markdown import error_result, fmt, md_checks, md_facets, md_section, md_table, text_result
from tools.plots import distance_svg

DEFAULT_SCHEDULE = "1:40:1"
DEFAULT_DENSITY = 200


def build_degeneration(
    config: PointConfig,
    weights,
    direction,
    schedule: Sequence[float],
    density: int,
    seed: int = 0,
    *,
    n_jobs: int = 1,
    with_svg: bool = True,
) -> tuple[DegenerationReport, dict[str, Any], str | None]:
    weights = np.ones(len(config)) if weights is None else weights
    report = degenerate(config, weights, direction, schedule, density, seed, n_jobs=n_jobs)
    payload = report.as_dict()
    payload["labels"] = list(config.labels)
    payload["direction"] = np.asarray(direction, dtype=float).tolist()
    svg = distance_svg(report.schedule, report.distances, report.threshold) if with_svg else None
    return report, payload, svg


def render_degeneration(payload: dict[str, Any]) -> str:
    verdict = "PASS" if payload["verdict"] == "pass" else "FAIL"
    return md_section(
        "Toric Degeneration",
        f"Predicted limit Z(S(v), w) with S(v) = {md_facets(payload['predicted_subdivision'])}; "
        f"secondary-fan limit cone `{fmt(payload['limit_cone'])}`.",
        md_table(["s", "d_H"], zip(payload["schedule"], payload["distances"]), max_rows=8),
        md_checks(
            [
                ("final distance", payload["final_distance"]),
                ("threshold", payload["threshold"]),
                ("calibration c", payload["calibration"]),
                ("tail nonincreasing", payload["monotone"]),
                ("cone consistent", payload["cone_consistent"]),
            ]
        ),
        f"Verdict: **{verdict}**.",
    )


def register(mcp: FastMCP) -> None:
    @mcp.tool(
        name="degenerate",
        description=(
            "Follow the translates w·exp(-s·v).Z_A of a projective toric "
            "variety along a schedule of s values and measure the Hausdorff "
            "distance to the predicted limit Z(S(v), w). The schedule is "
            "'start:end:step' (end included) or comma-separated values; "
            "density is the number of samples per facet."
        ),
        annotations=ToolAnnotations(
            readOnlyHint=True,
            destructiveHint=False,
            idempotentHint=True,
            openWorldHint=False,
        ),
    )
    def degenerate_tool(
        points: dict[str, list[float]],
        direction: dict[str, float],
        weights: dict[str, float] | None = None,
        schedule: str = DEFAULT_SCHEDULE,
        density: int = DEFAULT_DENSITY,
        seed: int = 0,
        affine: bool | None = None,
    ) -> CallToolResult:
        try:
            config = fixtures.parse_config({"points": points, "affine": affine}, tol=env_tolerance())
            v = fixtures.parse_values(direction, config.labels, field="direction")
            w = None if weights is None else fixtures.parse_values(weights, config.labels, field="weights")
            _, payload, _ = build_degeneration(
                config,
                w,
                v,
                fixtures.parse_schedule(schedule),
                density,
                seed,
                n_jobs=degen_threads(),
                with_svg=False,
            )
        except ToricError as exc:
            return error_result(str(exc))
        return text_result(render_degeneration(payload), payload)
