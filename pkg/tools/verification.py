"""Property-suite tools."""

from __future__ import annotations

from typing import Any

from mcp.server.fastmcp import FastMCP
from mcp.types import CallToolResult, ToolAnnotations

from toric.errors import ToricError
from toric.suites import SUITES, run_suite
from tools.markdown import error_result, md_section, md_table, text_result

SUITE_NAMES = (*SUITES, "all")


def build_verify(name: str, seed: int = 0, *, scale: float = 1.0) -> dict[str, Any]:
    results = run_suite(name, seed, scale=scale)
    return {
        "suite": name,
        "seed": seed,
        "scale": scale,
        "passed": all(r.passed for r in results),
        "results": [r.as_dict() for r in results],
    }


def render_verify(payload: dict[str, Any]) -> str:
    rows = [
        [result["suite"], check["name"], "pass" if check["passed"] else "FAIL", check["detail"]]
        for result in payload["results"]
        for check in result["checks"]
    ]
    failed = sum(1 for row in rows if row[2] == "FAIL")
    return md_section(
        f"Verification: {payload['suite']}",
        f"**{len(rows) - failed}** of {len(rows)} check(s) passed (seed {payload['seed']}).",
        md_table(["Suite", "Check", "Result", "Detail"], rows),
    )


def register(mcp: FastMCP) -> None:
    @mcp.tool(
        name="verify_suite",
        description=(
            "Run a numerical property suite: "
            + ", ".join(SUITE_NAMES)
            + ". Scale shrinks or grows the sample counts (1.0 is the full "
            "acceptance size). Returns one row per check with its detail."
        ),
        annotations=ToolAnnotations(
            readOnlyHint=True,
            destructiveHint=False,
            idempotentHint=True,
            openWorldHint=False,
        ),
    )
    def verify_suite(suite: str, seed: int = 0, scale: float = 0.1) -> CallToolResult:
        try:
            payload = build_verify(suite, seed, scale=scale)
        except ToricError as exc:
            return error_result(str(exc))
        return text_result(render_verify(payload), payload)
