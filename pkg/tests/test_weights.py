"""
Unit tests for weights, admissible parameters and weighted norms
"""

import math

import numpy as np
import pytest

from driftlab.errors import InputError, InvalidExponentError
from driftlab.fields import ConstantPotential, ZeroDrift
from driftlab.geometry import HyperbolicWarping, ModelManifold
from driftlab.solver import BVPProblem, SolutionGrid, uniform_grid
from driftlab.weights import (
    ExponentialWeight,
    PolynomialWeight,
    Regime,
    StretchedExponentialWeight,
    TailVerdict,
    admissible_params,
    delta_min,
    growth_allowance,
    tail_verdict,
    weight_eval,
    weighted_lp_norm,
)


def test_weight_values():
    assert weight_eval(ExponentialWeight(1.0), 0.0) == 1.0
    assert weight_eval(PolynomialWeight(5.0), 1.0) == pytest.approx(0.03125)
    assert weight_eval(StretchedExponentialWeight(2.0, 0.5), 4.0) == pytest.approx(math.exp(-4.0))


def test_weight_rejects_negative_radius():
    with pytest.raises(InputError):
        weight_eval(ExponentialWeight(1.0), -1.0)


def test_stretched_weight_theta_range():
    with pytest.raises(InputError):
        StretchedExponentialWeight(1.0, 1.0)


@pytest.mark.parametrize("p, expected", [(2.0, 1.0), (3.0, 0.75), (1.5, 1.5)])
def test_delta_min(p, expected):
    assert delta_min(p) == pytest.approx(expected)


@pytest.mark.parametrize("p", [1.0, 0.5])
def test_delta_min_rejects_small_p(p):
    with pytest.raises(InvalidExponentError):
        delta_min(p)


def test_exponential_threshold():
    beta, k, p = 1.5, 1.0, 2.0
    result = admissible_params("exponential", alpha=1.0, constant=k, dimension=3, p=p, c0=2.0, parameter=beta)
    # p c0 > beta^2 delta + beta K with delta = p / (2 (p - 1)) = 1
    assert result.threshold == pytest.approx(beta**2 * 1.0 + beta * k)
    assert result.c0_threshold == pytest.approx(1.875)
    assert result.feasible


def test_exponential_threshold_not_met():
    result = admissible_params("exponential", alpha=1.0, constant=1.0, dimension=3, p=2.0, c0=1.8, parameter=1.5)
    assert result.parameter_ok
    assert not result.c0_ok
    assert not result.feasible


def test_polynomial_threshold():
    tau, k, p = 5.0, 2.0, 2.0
    result = admissible_params(Regime.POLYNOMIAL, alpha=1.0, constant=k, dimension=3, p=p, c0=15.0, parameter=tau)
    assert result.threshold == pytest.approx((tau * 1.0 / 2.0) * (tau + 2.0) + k * (tau + 1.0))
    assert result.c0_threshold == pytest.approx(14.75)
    assert result.parameter_lower_bound == pytest.approx(3.0)
    assert result.feasible


def test_stretched_threshold():
    result = admissible_params(
        "stretched", alpha=1.0, constant=1.0, dimension=3, p=2.0, c0=2.0, parameter=2.0, theta=0.5
    )
    assert result.threshold == pytest.approx(4.0 * 0.25 + 2.0 * 0.5 + 1.0)
    assert result.c0_threshold == pytest.approx(1.5)


def test_stretched_threshold_needs_theta():
    with pytest.raises(InputError):
        admissible_params("stretched", alpha=1.0, constant=1.0, dimension=3, p=2.0, c0=2.0, parameter=2.0)


def test_parameter_on_boundary_is_infeasible():
    result = admissible_params("exponential", alpha=1.5, constant=1.0, dimension=3, p=2.0, c0=1e6, parameter=1.5)
    assert result.c0_ok
    assert not result.parameter_ok
    assert not result.feasible


def test_unknown_regime():
    with pytest.raises(InputError):
        Regime.parse("quadratic")
    assert Regime.parse("Polynomial") is Regime.POLYNOMIAL


def test_admissible_report_fields():
    document = admissible_params("polynomial", 3.0, 2.1, 3, 2.0, 30.0, 6.0).as_dict()
    assert document["regime"] == "polynomial"
    assert document["feasible"] is True
    assert document["threshold_c0"] == pytest.approx(document["threshold_p_c0"] / 2.0)


def test_growth_allowance():
    assert growth_allowance("polynomial", alpha=3.0, p=2.0, dimension=3, parameter=6.0) == pytest.approx(0.5)
    assert growth_allowance("exponential", alpha=1.0, p=2.0, dimension=3, parameter=3.0) == pytest.approx(1.0)
    assert growth_allowance("stretched", alpha=2.0, p=2.0, dimension=3, parameter=1.0) < 0


def test_norm_of_constant_with_polynomial_weight(euclidean3):
    report = weighted_lp_norm(euclidean3, lambda r: 1.0, PolynomialWeight(5.0), p=2.0)
    assert report.value == pytest.approx(math.pi / 3, rel=1e-8)
    assert report.tail is TailVerdict.CONVERGENT
    assert math.isinf(report.r_max)


def test_norm_with_slowly_decaying_weight_diverges(euclidean3):
    report = weighted_lp_norm(euclidean3, lambda r: 1.0, PolynomialWeight(2.0), p=2.0, r_max=100.0)
    assert report.tail is TailVerdict.DIVERGENT


def test_norm_of_zero_function(euclidean3):
    report = weighted_lp_norm(euclidean3, lambda r: 0.0, PolynomialWeight(1.0), p=2.0, r_max=50.0)
    assert report.value == 0.0
    assert report.tail is TailVerdict.CONVERGENT


def test_norm_is_homogeneous(euclidean3):
    weight = ExponentialWeight(1.0)
    base = weighted_lp_norm(euclidean3, lambda r: math.exp(-r), weight, p=3.0).value
    scaled = weighted_lp_norm(euclidean3, lambda r: 2.0 * math.exp(-r), weight, p=3.0).value
    assert scaled == pytest.approx(8.0 * base, rel=1e-9)


def test_norm_rejects_small_p(euclidean3):
    with pytest.raises(InvalidExponentError):
        weighted_lp_norm(euclidean3, lambda r: 1.0, PolynomialWeight(5.0), p=0.5)


def _constant_solution(manifold, radius, nodes):
    problem = BVPProblem(manifold, ZeroDrift(), ConstantPotential(1.0), 1.0, radius)
    grid = uniform_grid(radius, nodes)
    return SolutionGrid(problem, grid, np.ones(grid.size), 0.0, "constant")


def test_grid_norm_matches_quadrature(euclidean3):
    solution = _constant_solution(euclidean3, 5.0, 4097)
    weight = PolynomialWeight(5.0)
    on_grid = weighted_lp_norm(euclidean3, solution, weight, p=2.0)
    closed = weighted_lp_norm(euclidean3, lambda r: 1.0, weight, p=2.0, r_max=5.0)
    assert on_grid.value == pytest.approx(closed.value, rel=1e-8)
    assert on_grid.r_max == 5.0


def test_grid_norm_beyond_grid(euclidean3):
    solution = _constant_solution(euclidean3, 5.0, 257)
    with pytest.raises(InputError):
        weighted_lp_norm(euclidean3, solution, PolynomialWeight(5.0), p=2.0, r_max=10.0)


def test_tail_verdict_on_hyperbolic_space():
    manifold = ModelManifold(3, HyperbolicWarping(1.0))
    assert tail_verdict(manifold, ExponentialWeight(3.0), 2.0) is TailVerdict.CONVERGENT
    assert tail_verdict(manifold, ExponentialWeight(1.0), 2.0) is TailVerdict.DIVERGENT
    assert tail_verdict(manifold, PolynomialWeight(50.0), 2.0) is TailVerdict.DIVERGENT
    assert tail_verdict(manifold, ExponentialWeight(3.0), 2.0, bounded=False) is TailVerdict.UNDETERMINED
