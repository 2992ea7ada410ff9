"""Irrational toric geometry MCP server (stdio transport)."""

from __future__ import annotations

import logging
import os

from mcp.server.fastmcp import FastMCP

from config import configure_logging
from tools import birch, degenerations, limits, secondary, subdivisions, verification

logger = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# Server
# ---------------------------------------------------------------------------

SERVER_NAME = os.getenv("TORIC_SERVER_NAME", "irrational-toric")

mcp = FastMCP(
    SERVER_NAME,
    instructions=(
        "Computations on irrational toric varieties: regular subdivisions, "
        "secondary polytopes, moment-map inversion, one-parameter limits on "
        "fans, toric degenerations and numerical property suites."
    ),
)


# ---------------------------------------------------------------------------
# Register tools
# ---------------------------------------------------------------------------

subdivisions.register(mcp)
secondary.register(mcp)
birch.register(mcp)
limits.register(mcp)
degenerations.register(mcp)
verification.register(mcp)


def main() -> None:
    configure_logging()
    logger.info("starting %s over stdio", SERVER_NAME)
    mcp.run(transport="stdio")


if __name__ == "__main__":
    main()
