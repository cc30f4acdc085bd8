"""
Drift lab: numerical experiments for Laplace equations with drift and potential
on rotationally symmetric model manifolds.
"""

__version__ = "1.0.0"
