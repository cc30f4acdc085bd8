"""
Model dichotomy tool for the Drift Lab MCP server.
"""

from typing import Any, Dict, Optional

from fastmcp import FastMCP

from .common import run_command_tool


def register_tool(mcp: FastMCP):
    """Register the reproduce_dichotomy tool with the FastMCP server."""

    @mcp.tool
    async def reproduce_dichotomy(
        preset: Optional[str] = "model-dichotomy",
        config: Optional[Dict[str, Any]] = None,
        nodes: Optional[int] = None,
    ) -> Dict[str, Any]:
        """
        Run both halves of the uniqueness / multiplicity dichotomy on one model manifold.

        Args:
            preset: Name of a model-dichotomy preset; ignored when config is given
            config: Inline document with 'uniqueness', 'multiplicity' and 'supersolution' keys
            nodes: Optional grid node count override

        Returns:
            Dictionary with both parts of the report and the names of any failed assertions
        """
        return await run_command_tool("reproduce", None if config is not None else preset, config, nodes)
