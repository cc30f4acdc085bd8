"""
Unit tests for the dichotomy experiments
"""

import math

import numpy as np
import pytest

from driftlab.config import ScenarioConfig, list_presets, load_preset, to_model_dichotomy, to_scenario
from driftlab.errors import InputError
from driftlab.fields import SampledDrift
from driftlab.experiments import (
    CONVERGENCE_RTOL,
    GROWTH_RADII,
    Classification,
    ExpectedRegime,
    Scenario,
    check_scenario,
    classify_probes,
    dichotomy_scan,
    extrapolate_limits,
    gamma_family,
    regime_alpha,
    reproduce_model_dichotomy,
    solve_scenario,
)
from driftlab.geometry import ModelManifold, SampledWarping, classify_volume_growth, growth_envelope
from driftlab.weights import Regime

SCENARIO_PRESETS = [name for name in list_presets() if isinstance(load_preset(name), ScenarioConfig)]
DECLARED = {
    ExpectedRegime.UNIQUENESS: Classification.DECAY,
    ExpectedRegime.MULTIPLICITY: Classification.CONVERGENCE,
}


def test_uniqueness_probes_follow_closed_form(scenario_u):
    report = dichotomy_scan(scenario_u)
    for probe in report.probes[:3]:
        exact = probe.radius * math.sinh(1.0) / math.sinh(probe.radius)
        assert probe.value == pytest.approx(exact, rel=0.01)
    assert abs(report.probes[-1].value) < 1e-14
    assert report.classification is Classification.DECAY
    assert report.limit_estimate == 0.0
    assert not report.partial


def test_multiplicity_probes_converge(scenario_nu):
    report = dichotomy_scan(scenario_nu)
    values = [p.value for p in report.probes]
    assert report.classification is Classification.CONVERGENCE
    assert abs(report.limit_estimate) >= 0.1
    assert all(abs(v) >= 0.1 for v in values)
    last, previous = report.extrapolated[-1], report.extrapolated[-2]
    assert abs(last - previous) <= CONVERGENCE_RTOL * abs(last)
    assert report.raw_relative_change < 0.05
    assert report.consistent


def test_probe_residuals_are_small(scenario_nu):
    report = dichotomy_scan(scenario_nu)
    assert all(p.residual <= 1e-4 for p in report.probes)
    assert all(p.tail == "convergent" for p in report.probes)


def test_zero_probes_classify_as_decay():
    classification, limit = classify_probes([0.0, 0.0, 0.0, 0.0], extrapolate_limits([5, 10, 20, 40], [0.0] * 4, None))
    assert classification is Classification.DECAY
    assert limit == 0.0


def test_non_settling_probes_are_inconclusive():
    values = [1.0, 0.6, 0.9, 0.4]
    classification, limit = classify_probes(values, extrapolate_limits([5, 10, 20, 40], values, None))
    assert classification is Classification.INCONCLUSIVE
    assert limit is None


def test_richardson_extrapolation_is_exact_for_known_rate():
    radii = [10.0, 20.0, 40.0, 80.0]
    values = [0.7 + 0.3 / r for r in radii]
    estimates = extrapolate_limits(radii, values, sigma=2.0)
    assert estimates == pytest.approx([0.7] * 3, rel=1e-12)


def test_aitken_extrapolation_is_exact_for_geometric_sequence():
    values = [0.5 + 0.25**k for k in range(4)]
    estimates = extrapolate_limits([1.0, 2.0, 4.0, 8.0], values, sigma=None)
    assert estimates == pytest.approx([0.5, 0.5], rel=1e-12)


def test_gamma_family_on_quadratic_drift(scenario_nu):
    report = gamma_family(scenario_nu)
    assert report.superlinear_passed
    assert report.residuals_ok
    assert report.separated
    assert report.bounded
    assert report.distinct_count == 4
    assert not report.regime_mismatch
    assert report.failures() == []

    by_gamma = {s.problem.gamma: s for s in report.solutions}
    assert not np.any(by_gamma[0.0].values)
    np.testing.assert_allclose(by_gamma[2.0].values, 2.0 * by_gamma[1.0].values, rtol=1e-12, atol=1e-14)
    pair = next(d for d in report.distances if {d["gamma_i"], d["gamma_j"]} == {1.0, 2.0})
    assert 1.0 <= pair["distance"] <= 1.1


def test_gamma_family_table(scenario_nu):
    r, members = gamma_family(scenario_nu).table()
    assert len(members) == 4
    assert all(values.shape == r.shape for _, values in members)


def test_check_reports_hypotheses(scenario_nu):
    check = check_scenario(scenario_nu)
    assert check.hypotheses["superlinear"].passed
    assert not check.hypotheses["linear"].passed
    assert check.hypotheses["linear"].witnesses
    assert check.expected is Classification.CONVERGENCE
    assert check.growth is not None and check.growth.growth_class == "polynomial"


def test_solve_agrees_with_oracle(scenario_nu):
    report = solve_scenario(scenario_nu)
    assert report.oracle_difference is not None
    assert report.oracle_difference <= 1e-5
    assert report.solution.residual <= 1e-4
    assert report.as_dict()["oracle_difference"] == report.oracle_difference


@pytest.mark.parametrize("name", SCENARIO_PRESETS)
def test_presets_are_regime_consistent(name):
    scenario = to_scenario(load_preset(name))
    report = dichotomy_scan(scenario)
    assert report.consistent
    assert not report.partial
    if scenario.regime in DECLARED:
        assert report.classification is DECLARED[scenario.regime]


def test_scenario_validation(scenario_u):
    common = dict(
        name="broken",
        manifold=scenario_u.manifold,
        drift=scenario_u.drift,
        potential=scenario_u.potential,
        weight=scenario_u.weight,
        p=2.0,
        gammas=(1.0,),
    )
    with pytest.raises(InputError):
        Scenario(r_star=1.0, ladder=(5.0, 10.0, 20.0), **common)
    with pytest.raises(InputError):
        Scenario(r_star=1.0, ladder=(5.0, 6.0, 7.0, 8.0), **common)
    with pytest.raises(InputError):
        Scenario(r_star=6.0, ladder=(5.0, 10.0, 20.0, 40.0), **common)


def test_model_dichotomy_reproduces():
    report = reproduce_model_dichotomy(to_model_dichotomy(load_preset("model-dichotomy")))
    assert report.failures == []
    assert report.passed
    assert report.uniqueness["alpha_exact"] == 3.0
    assert report.uniqueness["admissible"]["feasible"]
    assert report.multiplicity["power_barrier"]["passed"]
    assert report.multiplicity["constant_barrier"]["passed"]
    assert report.family is not None and report.family.distinct_count >= 3


def test_single_gamma_cannot_show_multiplicity():
    config = load_preset("model-dichotomy")
    experiment = config.multiplicity.experiment.model_copy(update={"gammas": [0.0]})
    multiplicity = config.multiplicity.model_copy(update={"experiment": experiment})
    degenerate = config.model_copy(update={"multiplicity": multiplicity})
    report = reproduce_model_dichotomy(to_model_dichotomy(degenerate))
    assert "multiplicity.regime_mismatch" in report.failures
    assert not report.passed


def test_barrier_exponent_must_stay_below_drift_gap():
    config = load_preset("model-dichotomy")
    barrier = config.supersolution.model_copy(update={"beta": 1.5})
    report = reproduce_model_dichotomy(to_model_dichotomy(config.model_copy(update={"supersolution": barrier})))
    assert "multiplicity.barrier_exponent" in report.failures


@pytest.mark.parametrize("radius", [5.0, 10.0])
def test_uniqueness_value_at_rstar_decays_at_unit_rate(scenario_u, radius):
    near = solve_scenario(scenario_u, radius=radius).solution.at(1.0)
    far = solve_scenario(scenario_u, radius=radius + 2.0).solution.at(1.0)
    assert near > 0
    assert far / near <= math.exp(-1.5)


def test_truncation_error_follows_drift_exponent(scenario_nu):
    report = dichotomy_scan(scenario_nu)
    sigma = report.check.hypotheses["superlinear"].exponent
    assert sigma == pytest.approx(2.0)
    radii = [p.radius for p in report.probes]
    values = [p.value for p in report.probes]
    scaled = [abs(values[k + 1] - values[k]) * radii[k] ** (sigma - 1.0) for k in range(len(values) - 1)]
    bound = 2.0 * scaled[0]
    for k, radius in enumerate(radii[:-1]):
        assert abs(values[k + 1] - values[k]) <= bound * radius ** (1.0 - sigma) + 1e-7


def test_solutions_are_additive_in_boundary_value(scenario_nu):
    first = solve_scenario(scenario_nu, gamma=0.5).solution
    second = solve_scenario(scenario_nu, gamma=1.5).solution
    total = solve_scenario(scenario_nu, gamma=2.0).solution
    np.testing.assert_array_equal(total.grid.nodes, first.grid.nodes)
    np.testing.assert_allclose(total.values, first.values + second.values, rtol=1e-10, atol=1e-13)


@pytest.mark.parametrize("regime, theta", [(Regime.EXPONENTIAL, None), (Regime.STRETCHED, 0.5)])
def test_sampled_warping_alpha_comes_from_envelope(regime, theta):
    manifold = ModelManifold(3, SampledWarping.from_function(lambda r: r, np.linspace(0.0, 120.0, 241)))
    alpha = regime_alpha(manifold, regime, theta)
    assert alpha == growth_envelope(manifold, regime.value, GROWTH_RADII, theta)
    assert alpha < classify_volume_growth(manifold, GROWTH_RADII).alpha


def test_sampled_drift_must_cover_hypothesis_range(scenario_u):
    r = np.linspace(0.0, 50.0, 201)
    short = SampledDrift(radii=tuple(r), values=tuple(0.5 * r))
    with pytest.raises(InputError, match="samples must reach"):
        Scenario(
            name="short",
            manifold=scenario_u.manifold,
            drift=short,
            potential=scenario_u.potential,
            weight=scenario_u.weight,
            p=2.0,
            r_star=1.0,
            ladder=(5.0, 10.0, 20.0, 40.0),
            gammas=(1.0,),
        )
