"""
Scenario driver for the uniqueness / multiplicity dichotomy.

A uniqueness regime shows up as truncated solutions u_R with u_R(R) = 1 whose
probe value u_R(r*) collapses as R grows; a multiplicity regime shows up as
probe values that settle to a nonzero limit, together with a family of
distinct bounded solutions, one for each prescribed boundary value.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError, LabError
from .fields import (
    MIN_GRID_RADIUS,
    Hypothesis,
    HypothesisReport,
    Potential,
    RadialDrift,
    SampledDrift,
    check_hypothesis,
    hypothesis_grid,
)
from .geometry import (
    GrowthReport,
    HyperbolicWarping,
    ModelManifold,
    classify_volume_growth,
    growth_envelope,
    power_law_exponent,
)
from .settings import get_workers
from .solver import (
    BVPProblem,
    SolutionGrid,
    SupersolutionReport,
    constant_barrier,
    make_grid,
    power_barrier,
    shoot_oracle,
    solve_bvp,
    solve_many,
    verify_supersolution,
)
from .weights import (
    AdmissibleParams,
    Regime,
    StretchedExponentialWeight,
    Weight,
    admissible_params,
    growth_allowance,
    weighted_lp_norm,
)

logger = logging.getLogger(__name__)

DECAY_RATIO = 0.01
CONVERGENCE_RTOL = 1e-3
RESIDUAL_TOL = 1e-4
DISTINCT_TOL = 1e-8
MIN_LADDER = 4
MIN_LADDER_SPAN = 8.0
HYPOTHESIS_RADIUS = 1000.0
GROWTH_RADII = np.geomspace(1.0, 100.0, 32)


class ExpectedRegime(str, Enum):
    UNIQUENESS = "uniqueness-expected"
    MULTIPLICITY = "multiplicity-expected"
    UNKNOWN = "unknown"


class Classification(str, Enum):
    DECAY = "decay"
    CONVERGENCE = "convergence"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Scenario:
    name: str
    manifold: ModelManifold
    drift: RadialDrift
    potential: Potential
    weight: Weight
    p: float
    r_star: float
    ladder: Tuple[float, ...]
    gammas: Tuple[float, ...]
    regime: ExpectedRegime = ExpectedRegime.UNKNOWN
    radius: Optional[float] = None  # single-solve truncation radius; defaults to the largest rung
    nodes: Optional[int] = None
    grading: str = "geometric"
    upwind: bool = False

    def __post_init__(self) -> None:
        ladder = np.asarray(self.ladder, dtype=float)
        if ladder.size < MIN_LADDER:
            raise InputError(f"truncation ladder needs at least {MIN_LADDER} radii, got {ladder.size}")
        if np.any(np.diff(ladder) <= 0):
            raise InputError("truncation ladder must be strictly increasing")
        if ladder[-1] / ladder[0] < MIN_LADDER_SPAN:
            raise InputError(f"truncation ladder must span a factor of at least {MIN_LADDER_SPAN}")
        if not 0 < self.r_star < ladder[0]:
            raise InputError(f"probe radius r* = {self.r_star} must lie in (0, {ladder[0]})")
        if not self.gammas:
            raise InputError("gamma list must not be empty")
        if isinstance(self.drift, SampledDrift):
            reach = max(MIN_GRID_RADIUS, float(ladder[-1]), self.solve_radius)
            if self.drift.radii[-1] < reach:
                raise InputError(f"sampled drift ends at r = {self.drift.radii[-1]}; samples must reach r >= {reach}")

    @property
    def theta(self) -> Optional[float]:
        return self.weight.theta if isinstance(self.weight, StretchedExponentialWeight) else None

    @property
    def solve_radius(self) -> float:
        return self.radius if self.radius is not None else self.ladder[-1]

    def problem(self, gamma: float, radius: float) -> BVPProblem:
        return BVPProblem(self.manifold, self.drift, self.potential, gamma, radius)

    def solve(self, problem: BVPProblem) -> SolutionGrid:
        grid = make_grid(problem.radius, self.nodes, self.grading)
        return solve_bvp(problem, grid, upwind=self.upwind)


HYPOTHESIS_FOR_REGIME = {
    Regime.EXPONENTIAL: Hypothesis.BOUNDED,
    Regime.STRETCHED: Hypothesis.SUBLINEAR,
    Regime.POLYNOMIAL: Hypothesis.LINEAR,
}


def _hypothesis_radius(drift: RadialDrift) -> float:
    if isinstance(drift, SampledDrift):
        return float(drift.radii[-1])
    return HYPOTHESIS_RADIUS


def run_hypotheses(scenario: Scenario) -> Dict[str, HypothesisReport]:
    grid = hypothesis_grid(_hypothesis_radius(scenario.drift))
    checks = [Hypothesis.BOUNDED, Hypothesis.LINEAR, Hypothesis.POTENTIAL_FLOOR, Hypothesis.SUPERLINEAR]
    if scenario.theta is not None:
        checks.insert(1, Hypothesis.SUBLINEAR)
    return {
        h.value: check_hypothesis(
            scenario.manifold, scenario.drift, scenario.potential, h, grid, theta=scenario.theta
        )
        for h in checks
    }


def regime_alpha(manifold: ModelManifold, regime: Regime, theta: Optional[float] = None) -> float:
    """Volume-growth exponent alpha of the bound the regime's uniqueness result assumes."""
    exact = power_law_exponent(manifold)
    if exact is not None:
        # polynomial volume sits below e^(alpha r^theta) for every alpha > 0
        return exact if regime is Regime.POLYNOMIAL else 0.0
    if regime is Regime.EXPONENTIAL and isinstance(manifold.warping, HyperbolicWarping):
        return (manifold.dimension - 1) * math.sqrt(manifold.warping.curvature)
    return growth_envelope(manifold, regime.value, GROWTH_RADII, theta)


def admissibility(scenario: Scenario, hypotheses: Dict[str, HypothesisReport]) -> AdmissibleParams:
    regime = scenario.weight.regime
    hypothesis = hypotheses[HYPOTHESIS_FOR_REGIME[regime].value]
    return admissible_params(
        regime,
        alpha=regime_alpha(scenario.manifold, regime, scenario.theta),
        constant=hypothesis.inflated_constant,
        dimension=scenario.manifold.dimension,
        p=scenario.p,
        c0=scenario.potential.floor,
        parameter=scenario.weight.parameter,
        theta=scenario.theta,
    )


def expected_classification(
    hypotheses: Dict[str, HypothesisReport], admissible: Optional[AdmissibleParams]
) -> Optional[Classification]:
    """Decay when the uniqueness hypotheses hold with feasible parameters; convergence when the drift is superlinear."""
    if hypotheses[Hypothesis.SUPERLINEAR.value].passed:
        return Classification.CONVERGENCE
    if admissible is not None and admissible.feasible:
        matching = HYPOTHESIS_FOR_REGIME[admissible.regime].value
        if hypotheses[matching].passed and hypotheses[Hypothesis.POTENTIAL_FLOOR.value].passed:
            return Classification.DECAY
    return None


@dataclass
class CheckReport:
    scenario: str
    hypotheses: Dict[str, HypothesisReport]
    admissibility: Optional[AdmissibleParams]
    admissibility_error: Optional[str]
    growth: Optional[GrowthReport]
    growth_allowance: Optional[float]

    @property
    def expected(self) -> Optional[Classification]:
        return expected_classification(self.hypotheses, self.admissibility)

    def as_dict(self) -> Dict[str, Any]:
        expected = self.expected
        return {
            "scenario": self.scenario,
            "hypotheses": {k: v.as_dict() for k, v in self.hypotheses.items()},
            "admissibility": self.admissibility.as_dict() if self.admissibility else None,
            "admissibility_error": self.admissibility_error,
            "volume_growth": self.growth.as_dict() if self.growth else None,
            "growth_allowance": self.growth_allowance,
            "expected_classification": expected.value if expected else None,
        }


def check_scenario(scenario: Scenario) -> CheckReport:
    """Hypothesis reports, volume growth and admissible parameters for a scenario."""
    hypotheses = run_hypotheses(scenario)
    growth: Optional[GrowthReport] = None
    try:
        growth = classify_volume_growth(scenario.manifold, GROWTH_RADII)
    except LabError as e:
        logger.warning("%s: volume growth not classified: %s", scenario.name, e)
    admissible: Optional[AdmissibleParams] = None
    error: Optional[str] = None
    allowance: Optional[float] = None
    try:
        admissible = admissibility(scenario, hypotheses)
        allowance = growth_allowance(
            admissible.regime, admissible.alpha, scenario.p, scenario.manifold.dimension, admissible.parameter
        )
    except LabError as e:
        error = str(e)
        logger.warning("%s: admissibility not computed: %s", scenario.name, e)
    return CheckReport(scenario.name, hypotheses, admissible, error, growth, allowance)


@dataclass
class SolveReport:
    solution: SolutionGrid
    oracle_difference: Optional[float]

    def as_dict(self) -> Dict[str, Any]:
        return {**self.solution.summary(), "oracle_difference": self.oracle_difference}


def solve_scenario(scenario: Scenario, gamma: float = 1.0, radius: Optional[float] = None) -> SolveReport:
    """One finite-difference solve, cross-checked against the shooting oracle on the same nodes."""
    problem = scenario.problem(gamma, radius if radius is not None else scenario.solve_radius)
    solution = scenario.solve(problem)
    difference: Optional[float] = None
    try:
        oracle = shoot_oracle(problem, solution.grid)
        difference = float(np.max(np.abs(oracle.values - solution.values)))
    except LabError as e:
        logger.warning("%s: shooting oracle failed: %s", scenario.name, e)
    return SolveReport(solution, difference)


@dataclass
class Probe:
    radius: float
    value: Optional[float]
    residual: Optional[float]
    norm: Optional[float] = None
    tail: Optional[str] = None
    error: Optional[str] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "R": self.radius,
            "u_at_rstar": self.value,
            "residual": self.residual,
            "weighted_norm": self.norm,
            "tail": self.tail,
            "error": self.error,
        }


def extrapolate_limits(radii: Sequence[float], values: Sequence[float], sigma: Optional[float]) -> List[float]:
    """
    Limit estimates from consecutive probes.

    With a truncation rate R^(1-sigma) known (sigma > 1), each pair of rungs
    gives a Richardson estimate; otherwise each triple gives Aitken's delta^2.
    """
    r = np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    estimates: List[float] = []
    if sigma is not None and sigma > 1:
        for k in range(len(v) - 1):
            w = (r[k + 1] / r[k]) ** (sigma - 1.0)
            estimates.append(float((w * v[k + 1] - v[k]) / (w - 1.0)))
        return estimates
    for k in range(len(v) - 2):
        d1, d2 = v[k + 1] - v[k], v[k + 2] - v[k + 1]
        denominator = d2 - d1
        estimates.append(float(v[k + 2] if denominator == 0 else v[k + 2] - d2**2 / denominator))
    return estimates


def classify_probes(
    values: Sequence[float], estimates: Sequence[float]
) -> Tuple[Classification, Optional[float]]:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return Classification.INCONCLUSIVE, None
    if not np.any(v) or abs(v[-1]) < DECAY_RATIO * abs(v[0]):
        return Classification.DECAY, 0.0
    if len(estimates) >= 2:
        last, previous = estimates[-1], estimates[-2]
        if last != 0 and abs(last - previous) <= CONVERGENCE_RTOL * abs(last):
            return Classification.CONVERGENCE, last
    return Classification.INCONCLUSIVE, None


@dataclass
class DichotomyReport:
    scenario: str
    r_star: float
    probes: List[Probe]
    classification: Classification
    limit_estimate: Optional[float]
    extrapolated: List[float]
    check: CheckReport
    declared_regime: ExpectedRegime
    partial: bool = False

    @property
    def expected(self) -> Optional[Classification]:
        return self.check.expected

    @property
    def consistent(self) -> bool:
        return self.expected is None or self.classification is self.expected

    @property
    def raw_relative_change(self) -> Optional[float]:
        values = [p.value for p in self.probes if p.value is not None]
        if len(values) < 2 or values[-1] == 0:
            return None
        return abs(values[-1] - values[-2]) / abs(values[-1])

    def failures(self, strict: bool = False) -> List[str]:
        out = []
        if self.partial:
            out.append("dichotomy.solver_failure")
        if not self.consistent:
            out.append("dichotomy.regime_consistency")
        if strict and self.classification is Classification.INCONCLUSIVE:
            out.append("dichotomy.inconclusive")
        return out

    def as_dict(self) -> Dict[str, Any]:
        expected = self.expected
        return {
            "scenario": self.scenario,
            "r_star": self.r_star,
            "probes": [p.as_dict() for p in self.probes],
            "classification": self.classification.value,
            "limit_estimate": self.limit_estimate,
            "extrapolated": self.extrapolated,
            "raw_relative_change": self.raw_relative_change,
            "expected_classification": expected.value if expected else None,
            "declared_regime": self.declared_regime.value,
            "consistent": self.consistent,
            "partial": self.partial,
            "check": self.check.as_dict(),
        }


def _safe_solve(scenario: Scenario, problem: BVPProblem) -> SolutionGrid | LabError:
    try:
        return scenario.solve(problem)
    except LabError as e:
        logger.error("%s: solve at R=%g failed: %s", scenario.name, problem.radius, e)
        return e


def dichotomy_scan(scenario: Scenario, check: Optional[CheckReport] = None) -> DichotomyReport:
    """Probe u_R(r*) with u_R(R) = 1 along the truncation ladder and classify the trend."""
    check = check_scenario(scenario) if check is None else check
    problems = [scenario.problem(1.0, radius) for radius in scenario.ladder]
    results = solve_many(problems, lambda pr: _safe_solve(scenario, pr), get_workers())

    probes: List[Probe] = []
    for problem, result in zip(problems, results):
        if isinstance(result, LabError):
            probes.append(Probe(problem.radius, None, None, error=f"{type(result).__name__}: {result}"))
            continue
        norm = weighted_lp_norm(scenario.manifold, result, scenario.weight, scenario.p)
        probes.append(Probe(problem.radius, result.at(scenario.r_star), result.residual, norm.value, norm.tail.value))
        logger.info("%s: R=%g u(r*)=%.6e", scenario.name, problem.radius, probes[-1].value)

    ok = [p for p in probes if p.value is not None]
    superlinear = check.hypotheses[Hypothesis.SUPERLINEAR.value]
    sigma = superlinear.exponent if superlinear.passed else None
    estimates = extrapolate_limits([p.radius for p in ok], [p.value for p in ok], sigma)
    classification, limit = classify_probes([p.value for p in ok], estimates)

    report = DichotomyReport(
        scenario=scenario.name,
        r_star=scenario.r_star,
        probes=probes,
        classification=classification,
        limit_estimate=limit,
        extrapolated=estimates,
        check=check,
        declared_regime=scenario.regime,
        partial=len(ok) < len(probes),
    )
    if not report.consistent:
        logger.warning(
            "%s: classified %s but the hypotheses predict %s",
            scenario.name,
            classification.value,
            report.expected.value if report.expected else None,
        )
    declared = {ExpectedRegime.UNIQUENESS: Classification.DECAY, ExpectedRegime.MULTIPLICITY: Classification.CONVERGENCE}
    if scenario.regime in declared and declared[scenario.regime] is not classification:
        logger.warning("%s: declared %s but classified %s", scenario.name, scenario.regime.value, classification.value)
    return report


@dataclass
class FamilyMember:
    gamma: float
    residual: float
    sup_norm: float
    boundary_value: float
    norm: float
    tail: str

    def as_dict(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "residual": self.residual,
            "sup_norm": self.sup_norm,
            "boundary_value": self.boundary_value,
            "weighted_norm": self.norm,
            "tail": self.tail,
        }


@dataclass
class FamilyReport:
    scenario: str
    radius: float
    members: List[FamilyMember]
    distances: List[Dict[str, float]]
    superlinear_passed: bool
    solutions: List[SolutionGrid] = field(repr=False, default_factory=list)

    @property
    def residuals_ok(self) -> bool:
        return all(m.residual <= RESIDUAL_TOL for m in self.members)

    @property
    def separated(self) -> bool:
        return all(d["distance"] >= d["required"] * (1 - 1e-12) for d in self.distances)

    @property
    def bounded(self) -> bool:
        return all(m.sup_norm <= abs(m.gamma) * (1 + 1e-9) + 1e-12 for m in self.members)

    @property
    def distinct_count(self) -> int:
        """Number of solutions pairwise further apart than DISTINCT_TOL in sup-norm."""
        kept: List[SolutionGrid] = []
        for s in self.solutions:
            if all(np.max(np.abs(s.values - k.values)) > DISTINCT_TOL for k in kept):
                kept.append(s)
        return len(kept)

    @property
    def regime_mismatch(self) -> bool:
        return not self.superlinear_passed or self.distinct_count < 2

    def failures(self) -> List[str]:
        out = []
        if not self.residuals_ok:
            out.append("family.residual")
        if not self.separated:
            out.append("family.separation")
        if not self.bounded:
            out.append("family.boundedness")
        return out

    def table(self) -> Tuple[np.ndarray, List[Tuple[float, np.ndarray]]]:
        if not self.solutions:
            return np.empty(0), []
        return self.solutions[0].grid.nodes, [(s.problem.gamma, s.values) for s in self.solutions]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "R": self.radius,
            "members": [m.as_dict() for m in self.members],
            "pairwise_sup_distances": self.distances,
            "residuals_ok": self.residuals_ok,
            "separated": self.separated,
            "bounded": self.bounded,
            "distinct_solutions": self.distinct_count,
            "superlinear_passed": self.superlinear_passed,
            "regime_mismatch": self.regime_mismatch,
        }


def gamma_family(
    scenario: Scenario, radius: Optional[float] = None, superlinear: Optional[HypothesisReport] = None
) -> FamilyReport:
    """One solve per boundary value gamma at the largest truncation radius."""
    radius = scenario.ladder[-1] if radius is None else radius
    if superlinear is None:
        superlinear = check_hypothesis(
            scenario.manifold,
            scenario.drift,
            scenario.potential,
            Hypothesis.SUPERLINEAR,
            hypothesis_grid(_hypothesis_radius(scenario.drift)),
        )
    if not superlinear.passed:
        logger.warning("%s: drift is not superlinear; a gamma family is not expected to persist", scenario.name)

    problems = [scenario.problem(g, radius) for g in scenario.gammas]
    solutions = solve_many(problems, scenario.solve, get_workers())
    members = []
    for s in solutions:
        norm = weighted_lp_norm(scenario.manifold, s, scenario.weight, scenario.p)
        members.append(
            FamilyMember(s.problem.gamma, s.residual, s.sup_norm(), float(s.values[-1]), norm.value, norm.tail.value)
        )
    distances = []
    for i in range(len(solutions)):
        for j in range(i + 1, len(solutions)):
            gi, gj = solutions[i].problem.gamma, solutions[j].problem.gamma
            distances.append(
                {
                    "gamma_i": gi,
                    "gamma_j": gj,
                    "distance": float(np.max(np.abs(solutions[i].values - solutions[j].values))),
                    "required": abs(gi - gj),
                }
            )
    report = FamilyReport(scenario.name, radius, members, distances, superlinear.passed, list(solutions))
    if report.regime_mismatch:
        logger.warning("%s: gamma family does not exhibit multiplicity", scenario.name)
    return report


@dataclass(frozen=True)
class BarrierSpec:
    constant: float
    beta: float
    domain: Tuple[float, float]


@dataclass(frozen=True)
class ModelDichotomy:
    uniqueness: Scenario
    multiplicity: Scenario
    barrier: BarrierSpec


@dataclass
class ModelDichotomyReport:
    uniqueness: Dict[str, Any]
    multiplicity: Dict[str, Any]
    failures: List[str]
    family: Optional[FamilyReport] = None
    scans: List[DichotomyReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "failures": self.failures,
            "uniqueness": self.uniqueness,
            "multiplicity": self.multiplicity,
        }


def _uniqueness_part(scenario: Scenario, failures: List[str]) -> Tuple[Dict[str, Any], DichotomyReport]:
    check = check_scenario(scenario)
    scan = dichotomy_scan(scenario, check)
    if not check.hypotheses[Hypothesis.LINEAR.value].passed:
        failures.append("uniqueness.linear_hypothesis")
    if scan.classification is not Classification.DECAY:
        failures.append("uniqueness.decay")
    if check.admissibility is None or check.admissibility.regime is not Regime.POLYNOMIAL:
        failures.append("uniqueness.polynomial_weight")
    elif not check.admissibility.feasible:
        failures.append("uniqueness.admissible_parameters")
    growth = check.growth
    part = {
        "scan": scan.as_dict(),
        "alpha_exact": power_law_exponent(scenario.manifold),
        "alpha_fitted": growth.alpha if growth else None,
        "volume_growth": growth.as_dict() if growth else None,
        "admissible": check.admissibility.as_dict() if check.admissibility else None,
    }
    return part, scan


def _multiplicity_part(
    scenario: Scenario, barrier: BarrierSpec, failures: List[str]
) -> Tuple[Dict[str, Any], FamilyReport, DichotomyReport]:
    check = check_scenario(scenario)
    superlinear = check.hypotheses[Hypothesis.SUPERLINEAR.value]
    scan = dichotomy_scan(scenario, check)
    family = gamma_family(scenario, superlinear=superlinear)
    if not superlinear.passed:
        failures.append("multiplicity.superlinear_hypothesis")
    if family.distinct_count < 3:
        failures.append("multiplicity.regime_mismatch")
    failures.extend(f"multiplicity.{name}" for name in family.failures())
    if scan.classification is not Classification.CONVERGENCE:
        failures.append("multiplicity.convergence")

    sigma = superlinear.constants.get("sigma", superlinear.exponent)
    if not barrier.beta < sigma - 1.0:
        failures.append("multiplicity.barrier_exponent")
    power, floor = barrier_report(scenario, barrier)
    if not power.passed:
        failures.append("multiplicity.power_barrier")
    if not floor.passed:
        failures.append("multiplicity.constant_barrier")
    part = {
        "scan": scan.as_dict(),
        "superlinear": superlinear.as_dict(),
        "family": family.as_dict(),
        "power_barrier": power.as_dict(),
        "constant_barrier": floor.as_dict(),
    }
    return part, family, scan


def reproduce_model_dichotomy(config: ModelDichotomy) -> ModelDichotomyReport:
    """
    Both halves of the dichotomy on one model manifold.

    Uniqueness: linear drift, decay of truncated solutions, feasible polynomial
    weight. Multiplicity: superlinear drift, at least three distinct bounded
    solutions with small residuals and verified barriers. Every failed
    assertion is named in the report.
    """
    failures: List[str] = []
    first, scan_u = _uniqueness_part(config.uniqueness, failures)
    second, family, scan_m = _multiplicity_part(config.multiplicity, config.barrier, failures)
    if failures:
        logger.warning("model dichotomy failed: %s", ", ".join(failures))
    return ModelDichotomyReport(first, second, failures, family, [scan_u, scan_m])


def barrier_report(
    scenario: Scenario, barrier: BarrierSpec
) -> Tuple[SupersolutionReport, SupersolutionReport]:
    """Power and constant barriers for a scenario, as used by the multiplicity half."""
    return (
        verify_supersolution(
            scenario.manifold,
            scenario.drift,
            scenario.potential,
            power_barrier(barrier.constant, barrier.beta),
            barrier.domain,
        ),
        verify_supersolution(
            scenario.manifold, scenario.drift, scenario.potential, constant_barrier(scenario.potential.floor), barrier.domain
        ),
    )
