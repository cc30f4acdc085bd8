"""
List presets tool for the Drift Lab MCP server.
"""

from typing import Any, Dict

from fastmcp import FastMCP

from driftlab.config import describe, list_presets as preset_names, load_preset


def register_tool(mcp: FastMCP):
    """Register the list_presets tool with the FastMCP server."""

    @mcp.tool
    async def list_presets(include_documents: bool = False) -> Dict[str, Any]:
        """
        List the scenario presets shipped with the lab.

        Args:
            include_documents: Also return each preset's full JSON document

        Returns:
            Dictionary with preset names and, optionally, their documents
        """
        names = preset_names()
        result: Dict[str, Any] = {"success": True, "count": len(names), "presets": names}
        if include_documents:
            result["documents"] = {name: describe(load_preset(name)) for name in names}
        return result
