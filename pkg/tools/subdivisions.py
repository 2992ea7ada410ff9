"""Regular subdivision tools."""

from __future__ import annotations

from typing import Any, Sequence

from mcp.server.fastmcp import FastMCP
from mcp.types import CallToolResult, ToolAnnotations

import fixtures
from config import env_tolerance
from toric.errors import ToricError
from toric.pointconfig import (
    PointConfig,
    check_subdivision,
    is_triangulation,
    lift_vector,
    regular_subdivision,
)
from tools.markdown import error_result, fmt, md_bullets, md_facets, md_label_set, md_section, md_table, text_result
from tools.plots import subdivision_svg


def build_subdivision(
    config: PointConfig, lift, *, axes: Sequence[int] | None = None, with_svg: bool = True
) -> tuple[dict[str, Any], str | None]:
    """Face system of S(λ) plus an SVG drawing when the configuration is planar."""
    lam = lift_vector(config, lift)
    subdivision = regular_subdivision(config, lam)
    faces = sorted(subdivision.faces, key=lambda f: (len(f), config.indices(f)))
    payload = {
        "labels": list(config.labels),
        "lift": dict(zip(config.labels, lam.tolist())),
        "facets": subdivision.sorted_facets(),
        "faces": [config.ordered(f) for f in faces],
        "triangulation": is_triangulation(subdivision, config),
        "problems": check_subdivision(config, subdivision),
    }
    return payload, subdivision_svg(config, subdivision, axes=axes) if with_svg else None


def render_subdivision(payload: dict[str, Any]) -> str:
    facets = payload["facets"]
    return md_section(
        "Regular Subdivision",
        f"S(λ) = {md_facets(facets)}; triangulation: **{fmt(payload['triangulation'])}**.",
        md_table(["Facet", "Points", "Size"], [[i, md_label_set(f), len(f)] for i, f in enumerate(facets)]),
        f"{len(payload['faces'])} face(s) in the face system.",
        "### Problems",
        md_bullets(payload["problems"], empty_text="_Cover and intersection checks passed._"),
    )


def register(mcp: FastMCP) -> None:
    @mcp.tool(
        name="regular_subdivision",
        description=(
            "Compute the regular subdivision S(λ) of a labelled point "
            "configuration induced by a lift λ: the lower faces of the lifted "
            "polytope. Takes points as {label: [x, ...]} and the lift as "
            "{label: value}; returns facets, the face system and whether the "
            "subdivision is a triangulation."
        ),
        annotations=ToolAnnotations(
            readOnlyHint=True,
            destructiveHint=False,
            idempotentHint=True,
            openWorldHint=False,
        ),
    )
    def regular_subdivision_tool(
        points: dict[str, list[float]],
        lift: dict[str, float],
        affine: bool | None = None,
    ) -> CallToolResult:
        try:
            config = fixtures.parse_config({"points": points, "affine": affine}, tol=env_tolerance())
            values = fixtures.parse_values(lift, config.labels, field="lift")
            payload, _ = build_subdivision(config, values, with_svg=False)
        except ToricError as exc:
            return error_result(str(exc))
        return text_result(render_subdivision(payload), payload)
