"""
Solve scenario tool for the Drift Lab MCP server.
"""

from typing import Any, Dict, Optional

from fastmcp import FastMCP

from .common import run_command_tool


def register_tool(mcp: FastMCP):
    """Register the solve_scenario tool with the FastMCP server."""

    @mcp.tool
    async def solve_scenario(
        preset: Optional[str] = None,
        scenario: Optional[Dict[str, Any]] = None,
        nodes: Optional[int] = None,
    ) -> Dict[str, Any]:
        """
        Solve the truncated radial boundary-value problem of a scenario with u(R) = 1.

        Args:
            preset: Name of a shipped preset (see list_presets)
            scenario: Inline scenario document, same schema as the CLI config
            nodes: Optional grid node count override

        Returns:
            Dictionary with the solution summary, residual, shooting-oracle difference and a sampled (r, u) table
        """
        return await run_command_tool("solve", preset, scenario, nodes)
