"""Moment-map inversion tools (Birch's theorem)."""

from __future__ import annotations

from typing import Any

import numpy as np
from mcp.server.fastmcp import FastMCP
from mcp.types import CallToolResult, ToolAnnotations

import fixtures
from config import env_tolerance
from toric.affine import birch_inverse, moment
from toric.errors import ToricError
from toric.pointconfig import PointConfig
from tools.markdown import error_result, fmt, md_label_set, md_label_table, md_section, md_vector, text_result


def build_birch(config: PointConfig, weights, target) -> dict[str, Any]:
    """The point z of w.Z_A with π_A(z) = target; ConvergenceError when Newton falls short."""
    weights = np.ones(len(config)) if weights is None else weights
    solution = birch_inverse(config, weights, target)
    payload = solution.as_dict(config.labels)
    payload["target"] = np.asarray(target, dtype=float).tolist()
    payload["moment"] = moment(config, solution.z).tolist()
    payload["tolerance"] = config.tol.eps_opt * max(1.0, config.diameter)
    return payload


def render_birch(payload: dict[str, Any]) -> str:
    return md_section(
        "Moment Map Inverse",
        f"Target u = {md_vector(payload['target'])} lies on the face `{md_label_set(payload['face'])}`.",
        md_label_table(payload["z"], "z"),
        f"Residual |π(z) - u| = {fmt(payload['residual'])} after {payload['iterations']} Newton step(s).",
        f"Cocharacter v = {md_vector(payload['v'])}.",
        f"_Target moved {fmt(payload['offset'])} onto the face._" if payload.get("offset") else None,
    )


def register(mcp: FastMCP) -> None:
    @mcp.tool(
        name="birch_inverse",
        description=(
            "Invert the moment map of a translated projective toric variety: "
            "given labelled points, positive weights {label: w} (default all "
            "ones) and a target u in the convex hull, return the unique point "
            "z of w.Z_A with sum_a z_a a = u, with its residual."
        ),
        annotations=ToolAnnotations(
            readOnlyHint=True,
            destructiveHint=False,
            idempotentHint=True,
            openWorldHint=False,
        ),
    )
    def birch_inverse_tool(
        points: dict[str, list[float]],
        target: list[float],
        weights: dict[str, float] | None = None,
        affine: bool | None = None,
    ) -> CallToolResult:
        try:
            config = fixtures.parse_config({"points": points, "affine": affine}, tol=env_tolerance())
            w = None if weights is None else fixtures.parse_values(weights, config.labels, field="weights")
            payload = build_birch(config, w, fixtures.parse_point(target, config.dim, field="target"))
        except ToricError as exc:
            return error_result(str(exc))
        return text_result(render_birch(payload), payload)
