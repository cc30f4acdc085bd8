"""
Radial drift fields, potentials and hypothesis certification.

A radial drift is b = b_r(r) d/dr. D+ is {b_r > 0}: the region where the
drift points outward along the gradient of the distance to the pole.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import PchipInterpolator

from .errors import InputError, InsufficientGridError, PoleSingularityError
from .geometry import ModelManifold, laplacian_coefficients

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

MIN_GRID_NODES = 1000
MIN_GRID_RADIUS = 100.0
# A ratio that grows by more than this factor per decade is growing polynomially.
DECADE_GROWTH_LIMIT = 10.0**0.05
SUPERLINEAR_SIGMA_MARGIN = 0.05
SUPERLINEAR_SIGMA_STEP = 0.05
WITNESS_MARGIN = 1.01
CONSTANT_INFLATION = 1.05


class RadialDrift(ABC):
    family: str = ""

    @abstractmethod
    def profile(self, r: ArrayLike) -> FloatArray:
        """b_r(r) = <b, grad r>."""

    @abstractmethod
    def derivative(self, r: ArrayLike) -> FloatArray:
        """b_r'(r)."""

    @property
    def exponent(self) -> Optional[float]:
        """Declared growth exponent s with b_r ~ r^s, or None when it has to be fitted."""
        return None

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        ...


class ZeroDrift(RadialDrift):
    family = "zero"

    def profile(self, r: ArrayLike) -> FloatArray:
        return np.zeros_like(np.asarray(r, dtype=float))

    def derivative(self, r: ArrayLike) -> FloatArray:
        return np.zeros_like(np.asarray(r, dtype=float))

    @property
    def exponent(self) -> Optional[float]:
        return 0.0

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family}


@dataclass(frozen=True)
class PowerAffineDrift(RadialDrift):
    """b_r(r) = A (offset + r)^s r / (1 + r); the factor r/(1+r) makes b_r(0) = 0."""

    amplitude: float
    power: float
    offset: float = 1.0
    family = "power_affine"

    def __post_init__(self) -> None:
        if self.offset < 0:
            raise InputError(f"power-affine offset must be >= 0, got {self.offset}")
        if self.offset == 0 and self.power < 0:
            raise InputError("power-affine drift with zero offset needs a non-negative power")

    def profile(self, r: ArrayLike) -> FloatArray:
        r = np.asarray(r, dtype=float)
        return self.amplitude * (self.offset + r) ** self.power * r / (1.0 + r)

    def derivative(self, r: ArrayLike) -> FloatArray:
        r = np.asarray(r, dtype=float)
        base = self.offset + r
        with np.errstate(divide="ignore", invalid="ignore"):
            growth = np.where(
                base > 0, self.power * base**self.power * r / (np.where(base > 0, base, 1.0) * (1.0 + r)), 0.0
            )
        return self.amplitude * (growth + base**self.power / (1.0 + r) ** 2)

    @property
    def exponent(self) -> Optional[float]:
        return self.power

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "amplitude": self.amplitude, "exponent": self.power, "offset": self.offset}


@dataclass(frozen=True)
class OscillatingDrift(RadialDrift):
    """Bounded drift b_r(r) = A sin(w r) r / (1 + r)."""

    amplitude: float
    frequency: float = 1.0
    family = "oscillating"

    def profile(self, r: ArrayLike) -> FloatArray:
        r = np.asarray(r, dtype=float)
        return self.amplitude * np.sin(self.frequency * r) * r / (1.0 + r)

    def derivative(self, r: ArrayLike) -> FloatArray:
        r = np.asarray(r, dtype=float)
        w = self.frequency
        return self.amplitude * (w * np.cos(w * r) * r / (1.0 + r) + np.sin(w * r) / (1.0 + r) ** 2)

    @property
    def exponent(self) -> Optional[float]:
        return 0.0

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "amplitude": self.amplitude, "frequency": self.frequency}


@dataclass(frozen=True)
class SampledDrift(RadialDrift):
    """Drift profile from (r, b_r) samples; its growth exponent is fitted, never declared."""

    radii: tuple[float, ...]
    values: tuple[float, ...]
    family = "sampled"
    _spline: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 4:
            raise InputError("sampled drift needs at least 4 matching (r, b_r) pairs")
        if r[0] != 0.0 or v[0] != 0.0:
            raise InputError("sampled drift must start at (0, 0): a radial field vanishes at the pole")
        if np.any(np.diff(r) <= 0):
            raise InputError("sampled drift radii must be strictly increasing")
        object.__setattr__(self, "_spline", PchipInterpolator(r, v, extrapolate=False))

    def _checked(self, out: FloatArray) -> FloatArray:
        if not np.all(np.isfinite(out)):
            raise InputError(f"sampled drift evaluated outside [0, {self.radii[-1]}]")
        return out

    def profile(self, r: ArrayLike) -> FloatArray:
        return self._checked(np.asarray(self._spline(r), dtype=float))

    def derivative(self, r: ArrayLike) -> FloatArray:
        return self._checked(np.asarray(self._spline(r, 1), dtype=float))

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "samples": [list(p) for p in zip(self.radii, self.values)]}


class Potential(ABC):
    """Zero-order coefficient c(r) with a declared floor c0 > 0."""

    kind: str = ""

    @property
    @abstractmethod
    def floor(self) -> float:
        ...

    @abstractmethod
    def value(self, r: ArrayLike) -> FloatArray:
        ...

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        ...


@dataclass(frozen=True)
class ConstantPotential(Potential):
    c0: float
    kind = "constant"

    def __post_init__(self) -> None:
        if not self.c0 > 0:
            raise InputError(f"potential floor c0 must be positive, got {self.c0}")

    @property
    def floor(self) -> float:
        return self.c0

    def value(self, r: ArrayLike) -> FloatArray:
        return np.full_like(np.asarray(r, dtype=float), self.c0)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "c0": self.c0}


@dataclass(frozen=True)
class PolynomialPotential(Potential):
    """c(r) = sum_k a_k r^k with coefficients listed from a_0 upwards."""

    coefficients: tuple[float, ...]
    c0: float
    kind = "polynomial"

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise InputError("polynomial potential needs at least one coefficient")
        if not self.c0 > 0:
            raise InputError(f"potential floor c0 must be positive, got {self.c0}")

    @property
    def floor(self) -> float:
        return self.c0

    def value(self, r: ArrayLike) -> FloatArray:
        return np.polynomial.polynomial.polyval(np.asarray(r, dtype=float), self.coefficients)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "c0": self.c0, "coefficients": list(self.coefficients)}


def divergence(manifold: ModelManifold, drift: RadialDrift, r: float) -> float:
    """div b = b_r' + (N-1) (phi'/phi) b_r at r > 0."""
    if r <= 0:
        raise PoleSingularityError("divergence is evaluated at the pole through pole_divergence()")
    return float(drift.derivative(r) + laplacian_coefficients(manifold, r) * drift.profile(r))


def pole_divergence(manifold: ModelManifold, drift: RadialDrift) -> float:
    """Limit of div b at the pole: N b_r'(0)."""
    return manifold.dimension * float(drift.derivative(0.0))


def divergence_on(manifold: ModelManifold, drift: RadialDrift, r: ArrayLike) -> FloatArray:
    """Divergence on a grid, using the pole limit at r = 0."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    at_pole = r == 0.0
    inner = ~at_pole
    out[inner] = drift.derivative(r[inner]) + laplacian_coefficients(manifold, r[inner]) * drift.profile(r[inner])
    out[at_pole] = pole_divergence(manifold, drift)
    return out


class Hypothesis(str, Enum):
    BOUNDED = "bounded"  # |b| <= K on D+, [div b]- <= K
    SUBLINEAR = "sublinear"  # b_r <= K (1+r)^sigma on D+, sigma <= 1 - theta
    LINEAR = "linear"  # b_r <= K (1+r)^sigma on D+, sigma <= 1
    POTENTIAL_FLOOR = "potential-floor"  # c >= c0 > 0
    SUPERLINEAR = "superlinear"  # b_r >= 0, b_r >= K r^sigma beyond R0, sigma > 1, K > 1


@dataclass(frozen=True)
class Witness:
    radius: float
    lhs: float
    rhs: float
    relation: str  # "<=" or ">=": the inequality lhs relation rhs that fails here
    term: str

    def as_dict(self) -> Dict[str, Any]:
        return {"radius": self.radius, "lhs": self.lhs, "rhs": self.rhs, "relation": self.relation, "term": self.term}


@dataclass
class HypothesisReport:
    hypothesis: Hypothesis
    passed: bool
    constants: Dict[str, float]
    witnesses: List[Witness]
    exponent: float
    exponent_exact: bool
    grid_passed: bool

    @property
    def constant(self) -> float:
        return self.constants.get("K", 0.0)

    @property
    def inflated_constant(self) -> float:
        """Fitted constant with the safety inflation applied before admissibility checks."""
        return CONSTANT_INFLATION * self.constant

    def as_dict(self) -> Dict[str, Any]:
        return {
            "hypothesis": self.hypothesis.value,
            "passed": self.passed,
            "grid_passed": self.grid_passed,
            "constants": self.constants,
            "exponent": self.exponent,
            "exponent_exact": self.exponent_exact,
            "witnesses": [w.as_dict() for w in self.witnesses],
        }


def hypothesis_grid(r_max: float = 1000.0, nodes: int = 2000) -> FloatArray:
    """Uniform on [0, 1], geometric on [1, r_max]."""
    inner = max(nodes // 10, 2)
    return np.concatenate([np.linspace(0.0, 1.0, inner + 1)[:-1], np.geomspace(1.0, r_max, nodes - inner)])


def _validate_grid(grid: ArrayLike) -> FloatArray:
    r = np.asarray(grid, dtype=float)
    if r.ndim != 1 or r.size < MIN_GRID_NODES:
        raise InsufficientGridError(f"hypothesis grid needs >= {MIN_GRID_NODES} nodes, got {r.size}")
    if r[0] != 0.0 or np.any(np.diff(r) <= 0):
        raise InsufficientGridError("hypothesis grid must start at 0 and increase strictly")
    if r[-1] < MIN_GRID_RADIUS:
        raise InsufficientGridError(f"hypothesis grid must reach r >= {MIN_GRID_RADIUS}, got {r[-1]}")
    return r


def _tail_slope(r: FloatArray, values: FloatArray) -> Optional[float]:
    """log-log slope over the last decade of the grid, or None if values are not positive there."""
    tail = r >= r[-1] / 10.0
    if np.any(values[tail] <= 0):
        return None
    slope, _ = np.polyfit(np.log(r[tail]), np.log(values[tail]), 1)
    return float(slope)


def drift_exponent(drift: RadialDrift, grid: ArrayLike) -> tuple[float, bool]:
    """Declared exponent (exact) or a log-log fit of |b_r| over the last grid decade."""
    if drift.exponent is not None:
        return drift.exponent, True
    r = np.asarray(grid, dtype=float)
    magnitude = np.abs(drift.profile(r))
    if not np.any(magnitude[r >= r[-1] / 10.0] > 0):
        return 0.0, False
    slope = _tail_slope(r, np.maximum(magnitude, np.finfo(float).tiny))
    return (slope if slope is not None else 0.0), False


def _collect(
    r: FloatArray, lhs: FloatArray, rhs: FloatArray, violated: NDArray[np.bool_], relation: str, term: str
) -> List[Witness]:
    return [
        Witness(radius=float(r[i]), lhs=float(lhs[i]), rhs=float(rhs[i]), relation=relation, term=term)
        for i in np.flatnonzero(violated)
    ]


def _worst(r: FloatArray, lhs: FloatArray, rhs: FloatArray, relation: str, term: str) -> Witness:
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = lhs / rhs if relation == "<=" else rhs / np.maximum(lhs, np.finfo(float).tiny)
    i = int(np.nanargmax(ratio))
    return Witness(radius=float(r[i]), lhs=float(lhs[i]), rhs=float(rhs[i]), relation=relation, term=term)


def _growth_factor(r: FloatArray, ratio: FloatArray) -> float:
    inner = r <= r[-1] / 10.0
    inner_sup = float(np.max(ratio[inner]))
    tail_sup = float(np.max(ratio[~inner]))
    if inner_sup == 0.0:
        return 1.0 if tail_sup == 0.0 else math.inf
    return tail_sup / inner_sup


def _check_upper_bound(
    manifold: ModelManifold,
    drift: RadialDrift,
    r: FloatArray,
    hypothesis: Hypothesis,
    theta: Optional[float],
    constant: Optional[float],
) -> HypothesisReport:
    if hypothesis is Hypothesis.BOUNDED:
        sigma_max = 0.0
    elif hypothesis is Hypothesis.SUBLINEAR:
        if theta is None or not 0 < theta < 1:
            raise InputError("the sublinear hypothesis needs theta in (0, 1)")
        sigma_max = 1.0 - theta
    else:
        sigma_max = 1.0

    exponent, exact = drift_exponent(drift, r)
    sigma = min(max(exponent, 0.0), sigma_max)

    b = drift.profile(r)
    outward = np.where(b > 0, b, 0.0)  # on D+, |b| = b_r for a radial field
    drift_shape = (1.0 + r) ** sigma
    div_negative = np.maximum(0.0, -divergence_on(manifold, drift, r))
    div_shape = np.ones_like(r) if hypothesis is Hypothesis.BOUNDED else (1.0 + r) ** (sigma - 1.0)

    drift_ratio = outward / drift_shape
    div_ratio = div_negative / div_shape
    inner = r <= r[-1] / 10.0
    exponent_ok = exponent <= sigma_max + 1e-12

    witnesses: List[Witness] = []
    if constant is not None:
        bound = constant * (1.0 + 1e-12)
        witnesses += _collect(r, outward, constant * drift_shape, drift_ratio > bound, "<=", "drift")
        witnesses += _collect(r, div_negative, constant * div_shape, div_ratio > bound, "<=", "divergence")
        grid_passed = not witnesses
        passed = grid_passed and exponent_ok
        fitted = constant
    else:
        drift_ok = _growth_factor(r, drift_ratio) <= DECADE_GROWTH_LIMIT
        div_ok = _growth_factor(r, div_ratio) <= DECADE_GROWTH_LIMIT
        grid_passed = drift_ok and div_ok
        passed = exponent_ok and div_ok
        fitted = float(max(drift_ratio.max(), div_ratio.max()))
        if not passed or not grid_passed:
            for ratio, lhs, shape, term in (
                (drift_ratio, outward, drift_shape, "drift"),
                (div_ratio, div_negative, div_shape, "divergence"),
            ):
                k_inner = float(ratio[inner].max())
                witnesses += _collect(r, lhs, k_inner * shape, (~inner) & (ratio > WITNESS_MARGIN * k_inner), "<=", term)
    if not passed and not witnesses:
        k_inner = float(drift_ratio[inner].max())
        witnesses.append(_worst(r, outward, k_inner * drift_shape, "<=", "drift"))

    constants: Dict[str, float] = {"K": fitted, "sigma": sigma, "K_inflated": CONSTANT_INFLATION * fitted}
    if theta is not None and hypothesis is Hypothesis.SUBLINEAR:
        constants["theta"] = theta
    if passed != grid_passed:
        logger.warning(
            "%s: exponent verdict %s disagrees with grid verdict %s", hypothesis.value, passed, grid_passed
        )
    return HypothesisReport(hypothesis, passed, constants, witnesses, exponent, exact, grid_passed)


def _superlinear_verdict(
    r: FloatArray, b: FloatArray, sigma: float, sigma_floor: float
) -> tuple[bool, Dict[str, float], List[Witness]]:
    """Certify b_r >= K r^sigma beyond some R0 > 1 with sigma > 1, K > 1."""
    witnesses: List[Witness] = []
    anchor = r >= r[-1] / 10.0
    if sigma <= sigma_floor:
        sigma_test = max(sigma + 0.5, 1.0 + SUPERLINEAR_SIGMA_MARGIN)
        r_anchor = float(r[anchor][0])
        b_anchor = float(b[anchor][0])
        k_test = max(WITNESS_MARGIN, b_anchor / r_anchor**sigma_test)
        rhs = k_test * r**sigma_test
        witnesses = _collect(r, b, rhs, anchor & (b * WITNESS_MARGIN < rhs), ">=", "growth")
        if not witnesses:
            witnesses.append(_worst(r[anchor], b[anchor], rhs[anchor], ">=", "growth"))
        return False, {"sigma": sigma}, witnesses

    # Any sigma' in (1, sigma] will do; take the largest one the grid certifies.
    steps = int(math.ceil((sigma - 1.0) / SUPERLINEAR_SIGMA_STEP))
    for candidate in sigma - SUPERLINEAR_SIGMA_STEP * np.arange(steps):
        if candidate <= 1.0 + 1e-9:
            break
        certificate = _certify_beyond(r, b, float(candidate))
        if certificate is not None:
            certificate["declared_sigma"] = sigma
            return True, certificate, witnesses

    beyond = r > 1.0
    tail_k = float(b[beyond][-1] / r[beyond][-1] ** sigma)
    constants = {"sigma": sigma, "K": tail_k}
    if tail_k <= 1.0:
        rhs = r**sigma
        witnesses = _collect(r, b, rhs, anchor & (b * WITNESS_MARGIN < rhs), ">=", "constant")
        if not witnesses:
            witnesses.append(_worst(r[anchor], b[anchor], rhs[anchor], ">=", "constant"))
        return False, constants, witnesses
    rb = r[beyond]
    target = 1.0 + (tail_k - 1.0) / 3.0
    witnesses.append(_worst(rb, b[beyond], target * rb**sigma, ">=", "constant"))
    return False, constants, witnesses


def _certify_beyond(r: FloatArray, b: FloatArray, sigma: float) -> Optional[Dict[str, float]]:
    """R0 > 1 and K > 1 with b_r >= K r^sigma on the grid beyond R0, or None.

    The certified range must cover at least the upper half of the grid.
    """
    beyond = r > 1.0
    rb = r[beyond]
    ratio = b[beyond] / rb**sigma
    tail_k = float(ratio[-1])
    if tail_k <= 1.0:
        return None
    target = 1.0 + (tail_k - 1.0) / 3.0
    suffix_inf = np.minimum.accumulate(ratio[::-1])[::-1]
    admissible = np.flatnonzero((suffix_inf >= target) & (rb <= r[-1] / 2.0))
    if admissible.size == 0:
        return None
    i = int(admissible[0])
    return {"sigma": sigma, "K": tail_k, "R0": float(rb[i]), "K_beyond_R0": float(suffix_inf[i])}


def _check_superlinear(drift: RadialDrift, r: FloatArray) -> HypothesisReport:
    b = drift.profile(r)
    negative = b < 0
    exponent, exact = drift_exponent(drift, r)
    fitted = _tail_slope(r, b)
    grid_sigma = fitted if fitted is not None else -math.inf

    passed, constants, witnesses = _superlinear_verdict(r, b, exponent, 1.0)
    grid_passed, _, grid_witnesses = _superlinear_verdict(r, b, grid_sigma, 1.0 + SUPERLINEAR_SIGMA_MARGIN)
    if np.any(negative):
        sign_witnesses = _collect(r, b, np.zeros_like(r), negative, ">=", "sign")
        passed = grid_passed = False
        witnesses = sign_witnesses + witnesses
    elif not passed and not witnesses:
        witnesses = grid_witnesses
    if not grid_passed and passed:
        witnesses = grid_witnesses
    constants["grid_sigma"] = grid_sigma
    if passed != grid_passed:
        logger.warning("superlinear: exponent verdict %s disagrees with grid verdict %s", passed, grid_passed)
    return HypothesisReport(Hypothesis.SUPERLINEAR, passed, constants, witnesses, exponent, exact, grid_passed)


def _check_potential_floor(potential: Potential, r: FloatArray) -> HypothesisReport:
    c = potential.value(r)
    inf_c = float(np.min(c))
    declared = potential.floor
    floor = declared if inf_c > 0 else 0.0
    violated = c < floor * (1.0 - 1e-12) if inf_c > 0 else c <= 0
    witnesses = _collect(r, c, np.full_like(r, floor), violated, ">=", "potential")
    passed = inf_c > 0 and not witnesses
    constants = {"c0": inf_c, "declared_c0": declared}
    return HypothesisReport(Hypothesis.POTENTIAL_FLOOR, passed, constants, witnesses, 0.0, True, passed)


def check_hypothesis(
    manifold: ModelManifold,
    drift: RadialDrift,
    potential: Potential,
    hypothesis: Hypothesis,
    grid: Sequence[float] | FloatArray,
    theta: Optional[float] = None,
    constant: Optional[float] = None,
) -> HypothesisReport:
    """
    Certify one hypothesis on a grid.

    Upper-bound hypotheses fit the smallest constant on the grid and pass when
    the drift's growth exponent meets the sigma constraint; with `constant`
    given they instead check the inequality with that constant. Failures
    always carry at least one witness radius with both sides of the inequality.
    """
    r = _validate_grid(grid)
    if hypothesis is Hypothesis.POTENTIAL_FLOOR:
        report = _check_potential_floor(potential, r)
    elif hypothesis is Hypothesis.SUPERLINEAR:
        report = _check_superlinear(drift, r)
    else:
        report = _check_upper_bound(manifold, drift, r, hypothesis, theta, constant)
    logger.info(
        "hypothesis %s: %s (K=%s, %d witnesses)",
        hypothesis.value,
        "pass" if report.passed else "fail",
        report.constants.get("K", report.constants.get("c0")),
        len(report.witnesses),
    )
    return report
