"""One-parameter limit tools on the toric variety of a fan."""

from __future__ import annotations

from typing import Any

import numpy as np
from mcp.server.fastmcp import FastMCP
from mcp.types import CallToolResult, ToolAnnotations

import fixtures
from config import env_tolerance
from toric.errors import ToricError
from toric.fans import Fan
from toric.linalg import as_vector
from toric.variety import FanPoint, one_param_limit
from tools.markdown import error_result, md_section, md_vector, text_result


def build_limit(fan: Fan, direction, *, cone: int | str | None = None, coord=None) -> dict[str, Any]:
    """lim γ_{s·direction}.p for p = γ_coord.x_cone (default ε) as s grows."""
    start_id = fan.minimal_cone_id if cone is None else fan.resolve(cone)
    coord = np.zeros(fan.dim) if coord is None else as_vector(coord, fan.dim)
    start = FanPoint(fan, start_id, coord)
    direction = as_vector(direction, fan.dim)
    limit = one_param_limit(fan, start, direction)
    return {
        "start": {"cone": start.label, "orbit_coord": start.coord.tolist()},
        "direction": direction.tolist(),
        "exists": limit is not None,
        "cone": limit.label if limit is not None else None,
        "cone_id": limit.cone_id if limit is not None else None,
        "orbit_coord": limit.coord.tolist() if limit is not None else None,
    }


def render_limit(payload: dict[str, Any]) -> str:
    start = payload["start"]
    if payload["exists"]:
        outcome = (
            f"The limit exists in the orbit of cone `{payload['cone']}` "
            f"with orbit coordinate {md_vector(payload['orbit_coord'])}."
        )
    else:
        outcome = "**No limit**: the direction is not covered by the star of the starting cone."
    return md_section(
        "One-Parameter Limit",
        f"Start: γ_v.x_σ with σ = `{start['cone']}`, v = {md_vector(start['orbit_coord'])}; "
        f"direction {md_vector(payload['direction'])}.",
        outcome,
    )


def register(mcp: FastMCP) -> None:
    @mcp.tool(
        name="fan_limit",
        description=(
            "Compute the limit of a one-parameter subgroup orbit on the "
            "irrational toric variety of a fan. The fan is given as "
            '{"cones": [{"label": ..., "generators": [[...], ...]}], '
            '"lineality": [[...]]} (faces are added automatically); the '
            "start point is γ_coord.x_cone (default the dense point ε)."
        ),
        annotations=ToolAnnotations(
            readOnlyHint=True,
            destructiveHint=False,
            idempotentHint=True,
            openWorldHint=False,
        ),
    )
    def fan_limit(
        fan: dict[str, Any],
        direction: list[float],
        cone: str | None = None,
        coord: list[float] | None = None,
    ) -> CallToolResult:
        try:
            parsed = fixtures.parse_fan(fan, tol=env_tolerance())
            v = fixtures.parse_point(direction, parsed.dim, field="direction")
            x = None if coord is None else fixtures.parse_point(coord, parsed.dim, field="coord")
            payload = build_limit(parsed, v, cone=cone, coord=x)
        except ToricError as exc:
            return error_result(str(exc))
        return text_result(render_limit(payload), payload)
