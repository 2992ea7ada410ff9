"""Markdown for tool output: vectors, facet lists, label tables and check lists."""

from __future__ import annotations

from numbers import Real
from typing import Any, Iterable, Sequence

from mcp.types import CallToolResult, TextContent

from fixtures import json_safe

ELLIPSIS = "…"


def fmt(value: Any, fallback: str = "n/a") -> str:
    """Display form of a scalar; floats get 6 significant digits."""
    if value is None:
        return fallback
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6g}"
    text = str(value).strip()
    return text if text else fallback


def md_escape(value: Any) -> str:
    """A table cell: pipes, backslashes and newlines would break the row."""
    return fmt(value).replace("\\", "\\\\").replace("|", "\\|").replace("\n", " ")


def md_vector(values: Iterable[float]) -> str:
    """A point of M or N as a code span, e.g. `(0.5, 1)`."""
    return "`(" + ", ".join(f"{float(x):.6g}" for x in values) + ")`"


def md_label_set(labels: Iterable[str]) -> str:
    return "{" + ",".join(labels) + "}"


def md_facets(facets: Iterable[Iterable[str]]) -> str:
    """A subdivision as a code span of its facets, e.g. `{{0,1}, {1,2}}`."""
    return "`{" + ", ".join(md_label_set(f) for f in facets) + "}`"


def _is_number(cell: Any) -> bool:
    return isinstance(cell, Real) and not isinstance(cell, bool)


def md_table(headers: Sequence[str], rows: Iterable[Sequence[Any]], *, max_rows: int | None = None) -> str:
    """Pipe table; all-numeric columns are right-aligned.

    With ``max_rows`` the middle of a long table collapses to a single row of ellipses.
    """
    rows = [list(row) for row in rows]
    if not rows:
        return "_No data._"
    numeric = [all(_is_number(row[i]) for row in rows) for i in range(len(headers))]
    if max_rows is not None and len(rows) > max_rows:
        head = max_rows // 2
        rows = rows[:head] + [[ELLIPSIS] * len(headers)] + rows[len(rows) - (max_rows - head):]
    header_line = "| " + " | ".join(md_escape(h) for h in headers) + " |"
    separator_line = "| " + " | ".join("---:" if n else "---" for n in numeric) + " |"
    body_lines = ["| " + " | ".join(md_escape(cell) for cell in row) + " |" for row in rows]
    return "\n".join([header_line, separator_line, *body_lines])


def md_label_table(values: dict[str, Any], column: str) -> str:
    """One row per point label, e.g. the coordinates of z ∈ Δ^A."""
    return md_table(["Label", column], values.items())


def md_checks(checks: Iterable[tuple[str, Any]]) -> str:
    """A verdict breakdown: one row per named check."""
    return md_table(["Check", "Value"], checks)


def md_bullets(items: Iterable[Any], empty_text: str = "_None._") -> str:
    values = [fmt(item) for item in items if item is not None]
    if not values:
        return empty_text
    return "\n".join(f"- {value}" for value in values)


def md_section(title: str, *blocks: str | None) -> str:
    """A `##` section; empty blocks are dropped."""
    return "\n\n".join([f"## {title}", *(block for block in blocks if block)])


def text_result(markdown: str, structured: dict[str, Any]) -> CallToolResult:
    return CallToolResult(
        content=[TextContent(type="text", text=markdown)],
        structuredContent=json_safe(structured),
    )


def error_result(message: str) -> CallToolResult:
    return CallToolResult(isError=True, content=[TextContent(type="text", text=message)])
