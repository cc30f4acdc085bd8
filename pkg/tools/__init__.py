"""
Tools package for the Drift Lab MCP server.

Each tool module has a register_tool function that takes a FastMCP instance
and registers the tool with it.
"""

from fastmcp import FastMCP

from . import (
    admissible_parameters,
    check_scenario,
    classify_growth,
    list_presets,
    reproduce_dichotomy,
    run_dichotomy,
    run_gamma_family,
    solve_scenario,
)


def register_all_tools(mcp: FastMCP):
    """
    Register all tools with the FastMCP server.

    Args:
        mcp: The FastMCP server instance to register tools with
    """
    list_presets.register_tool(mcp)
    check_scenario.register_tool(mcp)
    solve_scenario.register_tool(mcp)
    run_dichotomy.register_tool(mcp)
    run_gamma_family.register_tool(mcp)
    reproduce_dichotomy.register_tool(mcp)
    classify_growth.register_tool(mcp)
    admissible_parameters.register_tool(mcp)


__all__ = [
    "register_all_tools",
    "list_presets",
    "check_scenario",
    "solve_scenario",
    "run_dichotomy",
    "run_gamma_family",
    "reproduce_dichotomy",
    "classify_growth",
    "admissible_parameters",
]
