"""
Check scenario tool for the Drift Lab MCP server.
"""

from typing import Any, Dict, Optional

from fastmcp import FastMCP

from .common import run_command_tool


def register_tool(mcp: FastMCP):
    """Register the check_scenario tool with the FastMCP server."""

    @mcp.tool
    async def check_scenario(
        preset: Optional[str] = None,
        scenario: Optional[Dict[str, Any]] = None,
        nodes: Optional[int] = None,
    ) -> Dict[str, Any]:
        """
        Check the drift, potential and weight hypotheses of a scenario and compute admissible parameters.

        Args:
            preset: Name of a shipped preset (see list_presets)
            scenario: Inline scenario document, same schema as the CLI config
            nodes: Optional grid node count override

        Returns:
            Dictionary with per-hypothesis verdicts, fitted constants, witnesses and the admissibility report
        """
        return await run_command_tool("check", preset, scenario, nodes)
