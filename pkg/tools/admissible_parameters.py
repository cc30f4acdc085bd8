"""
Admissible parameters tool for the Drift Lab MCP server.
"""

from typing import Any, Dict, Optional

from fastmcp import FastMCP

from driftlab.weights import admissible_params, growth_allowance

from .common import run_lab_call


def register_tool(mcp: FastMCP):
    """Register the admissible_parameters tool with the FastMCP server."""

    @mcp.tool
    async def admissible_parameters(
        regime: str,
        alpha: float,
        constant: float,
        dimension: int,
        p: float,
        c0: float,
        parameter: float,
        theta: Optional[float] = None,
    ) -> Dict[str, Any]:
        """
        Compute the lower bound on p*c0 for a uniqueness regime and check feasibility.

        Args:
            regime: exponential, stretched or polynomial
            alpha: Volume growth exponent
            constant: Drift hypothesis constant K
            dimension: Manifold dimension N
            p: Lebesgue exponent (> 1)
            c0: Potential floor
            parameter: beta for exponential-type weights, tau for the polynomial weight
            theta: Stretching exponent, required for the stretched regime

        Returns:
            Dictionary with thresholds, feasibility and the growth allowance for unbounded solutions
        """
        params = {
            "regime": regime,
            "alpha": alpha,
            "constant": constant,
            "dimension": dimension,
            "p": p,
            "c0": c0,
            "parameter": parameter,
            "theta": theta,
        }

        def compute() -> Dict[str, Any]:
            result = admissible_params(regime, alpha, constant, dimension, p, c0, parameter, theta)
            allowance = growth_allowance(result.regime, alpha, p, dimension, parameter)
            return {"admissible": result.as_dict(), "growth_allowance": allowance}

        return await run_lab_call("admissible_parameters", params, compute)
