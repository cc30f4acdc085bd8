"""
Dichotomy scan tool for the Drift Lab MCP server.
"""

from typing import Any, Dict, Optional

from fastmcp import FastMCP

from .common import run_command_tool


def register_tool(mcp: FastMCP):
    """Register the run_dichotomy tool with the FastMCP server."""

    @mcp.tool
    async def run_dichotomy(
        preset: Optional[str] = None,
        scenario: Optional[Dict[str, Any]] = None,
        nodes: Optional[int] = None,
        strict: bool = False,
    ) -> Dict[str, Any]:
        """
        Probe truncated solutions along the scenario's R ladder and classify decay versus convergence.

        Args:
            preset: Name of a shipped preset (see list_presets)
            scenario: Inline scenario document, same schema as the CLI config
            nodes: Optional grid node count override
            strict: Treat an inconclusive classification as a failure

        Returns:
            Dictionary with probe values, classification, limit estimate and hypothesis cross-check
        """
        return await run_command_tool("dichotomy", preset, scenario, nodes, strict)
