"""Secondary polytope tools: regular triangulations and their GKZ vertices."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np
from mcp.server.fastmcp import FastMCP
from mcp.types import CallToolResult, ToolAnnotations

import fixtures
from config import degen_threads, env_tolerance
from toric.errors import ToricError
from toric.pointconfig import PointConfig, enumerate_regular_triangulations
from tools.markdown import error_result, fmt, md_facets, md_section, md_table, md_vector, text_result
from tools.plots import secondary_svg

logger = logging.getLogger(__name__)

PREVIEW_ROWS = 20


def build_secondary(
    config: PointConfig, budget: int, seed: int = 0, *, n_jobs: int = 1, with_svg: bool = True
) -> tuple[dict[str, Any], str | None]:
    report = enumerate_regular_triangulations(config, budget, seed, n_jobs=n_jobs)
    if report.budget_exhausted:
        logger.warning("budget %d exhausted; the list may be incomplete", budget)
    payload = {
        "labels": list(config.labels),
        "triangulations": [
            {"facets": t.sorted_facets(), "gkz": list(gkz.coords)} for t, gkz in report.triangulations
        ],
        "count": len(report),
        "budget": report.budget,
        "evaluations": report.evaluations,
        "seed": report.seed,
        "budget_exhausted": report.budget_exhausted,
        "oracle_match": report.oracle_match,
        "complete": report.oracle_match is True,
    }
    svg = None
    if with_svg and len(report):
        svg = secondary_svg(
            np.vstack([gkz.as_array() for gkz in report.vertices]),
            [f"T{i}" for i in range(len(report))],
        )
    return payload, svg


def render_secondary(payload: dict[str, Any]) -> str:
    rows = payload["triangulations"]
    preview = rows[:PREVIEW_ROWS]
    if payload["oracle_match"] is None:
        completeness = "Too large for the exhaustive check; completeness is not asserted."
    elif payload["complete"]:
        completeness = "Matches the exhaustive check: the list is complete."
    else:
        completeness = "**Disagrees with the exhaustive check.**"
    return md_section(
        "Secondary Polytope",
        f"Found **{payload['count']}** regular triangulation(s) after {payload['evaluations']} lift evaluations.",
        completeness,
        md_table(
            ["#", "Facets", "GKZ vertex"],
            [[f"T{i}", md_facets(row["facets"]), md_vector(row["gkz"])] for i, row in enumerate(preview)],
        ),
        f"_Showing first {len(preview)} of {len(rows)} triangulations._" if len(rows) > len(preview) else None,
        f"_Budget exhausted: {fmt(payload['budget'])} random lifts._" if payload["budget_exhausted"] else None,
    )


def register(mcp: FastMCP) -> None:
    @mcp.tool(
        name="secondary_polytope",
        description=(
            "Enumerate the regular triangulations of a labelled point "
            "configuration (at most 12 points) with their GKZ vectors, the "
            "vertices of the secondary polytope. Random lifts are sampled up "
            "to the budget and chamber walls are crossed; small planar "
            "configurations are checked against an exhaustive check."
        ),
        annotations=ToolAnnotations(
            readOnlyHint=True,
            destructiveHint=False,
            idempotentHint=True,
            openWorldHint=False,
        ),
    )
    def secondary_polytope(
        points: dict[str, list[float]],
        budget: int = 200,
        seed: int = 0,
        affine: bool | None = None,
    ) -> CallToolResult:
        try:
            config = fixtures.parse_config({"points": points, "affine": affine}, tol=env_tolerance())
            payload, _ = build_secondary(config, budget, seed, n_jobs=degen_threads(), with_svg=False)
        except ToricError as exc:
            return error_result(str(exc))
        return text_result(render_secondary(payload), payload)
