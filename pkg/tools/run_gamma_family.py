"""
Gamma family tool for the Drift Lab MCP server.
"""

from typing import Any, Dict, Optional

from fastmcp import FastMCP

from .common import run_command_tool


def register_tool(mcp: FastMCP):
    """Register the run_gamma_family tool with the FastMCP server."""

    @mcp.tool
    async def run_gamma_family(
        preset: Optional[str] = None,
        scenario: Optional[Dict[str, Any]] = None,
        nodes: Optional[int] = None,
    ) -> Dict[str, Any]:
        """
        Solve one boundary-value problem per gamma in the scenario's gamma list at the largest truncation radius.

        Args:
            preset: Name of a shipped preset (see list_presets)
            scenario: Inline scenario document, same schema as the CLI config
            nodes: Optional grid node count override

        Returns:
            Dictionary with residuals, sup-norms, pairwise sup-distances and weighted-norm memberships
        """
        return await run_command_tool("family", preset, scenario, nodes)
