"""
Volume growth classification tool for the Drift Lab MCP server.
"""

from typing import Any, Dict, List, Optional

import numpy as np
from fastmcp import FastMCP

from driftlab.config import WarpingConfig, build_warping
from driftlab.geometry import ModelManifold, classify_volume_growth, volume

from .common import run_lab_call


def register_tool(mcp: FastMCP):
    """Register the classify_growth tool with the FastMCP server."""

    @mcp.tool
    async def classify_growth(
        dimension: int,
        warping: Dict[str, Any],
        radii: Optional[List[float]] = None,
    ) -> Dict[str, Any]:
        """
        Classify the volume growth of geodesic balls on a model manifold.

        Args:
            dimension: Manifold dimension N (>= 2)
            warping: Warping document, e.g. {"kind": "power_law", "lambda": 2}
            radii: Increasing sample radii (default: 32 radii from 1 to 100)

        Returns:
            Dictionary with the growth class, fitted exponents and V(1)
        """
        params = {"dimension": dimension, "warping": warping, "radii": radii}

        def compute() -> Dict[str, Any]:
            manifold = ModelManifold(dimension, build_warping(WarpingConfig.model_validate(warping)))
            sample = np.geomspace(1.0, 100.0, 32) if radii is None else np.asarray(radii, dtype=float)
            report = classify_volume_growth(manifold, sample)
            return {"growth": report.as_dict(), "unit_ball_volume": volume(manifold, 1.0)}

        return await run_lab_call("classify_growth", params, compute)
