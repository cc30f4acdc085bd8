"""
Weight families, admissible parameters and weighted L^p norms.

The uniqueness classes are L^p_w(M) = {u : int_M |u|^p w dmu < inf} with
w one of

    exponential             psi(r) = exp(-beta r)
    stretched exponential   eta(r) = exp(-beta r^theta)
    polynomial              xi(r)  = (1 + r)^(-tau)
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Optional, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import simpson

from .errors import InputError, InvalidExponentError
from .geometry import (
    EuclideanWarping,
    HyperbolicWarping,
    ModelManifold,
    PowerLawWarping,
    quad,
    sphere_constant,
)
from .settings import get_quad_tol
from .solver import SolutionGrid

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


class Regime(str, Enum):
    """Volume-growth regime, paired with the weight family its uniqueness result uses."""

    EXPONENTIAL = "exponential"
    STRETCHED = "stretched"
    POLYNOMIAL = "polynomial"

    @classmethod
    def parse(cls, value: Union[str, "Regime"]) -> "Regime":
        if isinstance(value, Regime):
            return value
        try:
            return cls(value.lower())
        except ValueError as e:
            raise InputError(f"unknown regime {value!r}") from e


class Weight(ABC):
    family: str = ""

    @property
    @abstractmethod
    def regime(self) -> Regime:
        ...

    @property
    @abstractmethod
    def parameter(self) -> float:
        """beta for exponential-type weights, tau for the polynomial weight."""

    @abstractmethod
    def __call__(self, r: ArrayLike) -> FloatArray:
        ...

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        ...


@dataclass(frozen=True)
class ExponentialWeight(Weight):
    beta: float
    family = "exponential"

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise InputError(f"beta must be positive, got {self.beta}")

    @property
    def regime(self) -> Regime:
        return Regime.EXPONENTIAL

    @property
    def parameter(self) -> float:
        return self.beta

    def __call__(self, r: ArrayLike) -> FloatArray:
        return np.exp(-self.beta * np.asarray(r, dtype=float))

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "beta": self.beta}


@dataclass(frozen=True)
class StretchedExponentialWeight(Weight):
    beta: float
    theta: float
    family = "stretched_exponential"

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise InputError(f"beta must be positive, got {self.beta}")
        if not 0 < self.theta < 1:
            raise InputError(f"theta must lie in (0, 1), got {self.theta}")

    @property
    def regime(self) -> Regime:
        return Regime.STRETCHED

    @property
    def parameter(self) -> float:
        return self.beta

    def __call__(self, r: ArrayLike) -> FloatArray:
        return np.exp(-self.beta * np.asarray(r, dtype=float) ** self.theta)

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "beta": self.beta, "theta": self.theta}


@dataclass(frozen=True)
class PolynomialWeight(Weight):
    tau: float
    family = "polynomial"

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise InputError(f"tau must be positive, got {self.tau}")

    @property
    def regime(self) -> Regime:
        return Regime.POLYNOMIAL

    @property
    def parameter(self) -> float:
        return self.tau

    def __call__(self, r: ArrayLike) -> FloatArray:
        return (1.0 + np.asarray(r, dtype=float)) ** (-self.tau)

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "tau": self.tau}


def weight_eval(weight: Weight, r: float) -> float:
    if r < 0:
        raise InputError(f"radius must be >= 0, got {r}")
    return float(weight(r))


def delta_min(p: float) -> float:
    """Smallest admissible delta = 1/eps with 0 < eps <= 2 - 2/p."""
    if not p > 1:
        raise InvalidExponentError(f"p must be > 1, got {p}")
    return p / (2.0 * (p - 1.0))


@dataclass(frozen=True)
class AdmissibleParams:
    regime: Regime
    p: float
    delta_min: float
    alpha: float
    constant: float
    dimension: int
    parameter: float
    parameter_lower_bound: float
    threshold: float  # p c0 must exceed this
    c0: float
    theta: Optional[float] = None

    @property
    def c0_threshold(self) -> float:
        return self.threshold / self.p

    @property
    def parameter_ok(self) -> bool:
        return self.parameter > self.parameter_lower_bound

    @property
    def c0_ok(self) -> bool:
        return self.p * self.c0 > self.threshold

    @property
    def feasible(self) -> bool:
        return self.parameter_ok and self.c0_ok

    def as_dict(self) -> Dict[str, Any]:
        return {
            "regime": self.regime.value,
            "p": self.p,
            "delta_min": self.delta_min,
            "alpha": self.alpha,
            "K": self.constant,
            "dimension": self.dimension,
            "parameter": self.parameter,
            "parameter_lower_bound": self.parameter_lower_bound,
            "threshold_p_c0": self.threshold,
            "threshold_c0": self.c0_threshold,
            "c0": self.c0,
            "theta": self.theta,
            "parameter_ok": self.parameter_ok,
            "c0_ok": self.c0_ok,
            "feasible": self.feasible,
        }


def admissible_params(
    regime: Union[Regime, str],
    alpha: float,
    constant: float,
    dimension: int,
    p: float,
    c0: float,
    parameter: float,
    theta: Optional[float] = None,
) -> AdmissibleParams:
    """
    Lower bound on p c0 for the uniqueness argument of a regime, at delta = delta_min(p).

    exponential: p c0 > beta^2 delta + beta K,               beta > alpha
    stretched:   p c0 > beta^2 theta^2 delta + beta K theta + K, beta > alpha
    polynomial:  p c0 > (tau delta / 2)(tau + 2) + K (tau + 1), tau > alpha + N - 1
    """
    regime = Regime.parse(regime)
    delta = delta_min(p)
    if not c0 > 0:
        raise InputError(f"c0 must be positive, got {c0}")
    if alpha < 0 or constant < 0:
        raise InputError("alpha and K must be non-negative")
    k = constant
    if regime is Regime.EXPONENTIAL:
        beta = parameter
        threshold = beta**2 * delta + beta * k
        lower = alpha
    elif regime is Regime.STRETCHED:
        if theta is None or not 0 < theta < 1:
            raise InputError("the stretched regime needs theta in (0, 1)")
        beta = parameter
        threshold = beta**2 * theta**2 * delta + beta * k * theta + k
        lower = alpha
    else:
        tau = parameter
        threshold = (tau * delta / 2.0) * (tau + 2.0) + k * (tau + 1.0)
        lower = alpha + dimension - 1
    result = AdmissibleParams(
        regime=regime,
        p=p,
        delta_min=delta,
        alpha=alpha,
        constant=k,
        dimension=dimension,
        parameter=parameter,
        parameter_lower_bound=lower,
        threshold=threshold,
        c0=c0,
        theta=theta,
    )
    logger.debug("admissible %s: p c0 > %.6g, parameter > %.6g", regime.value, threshold, lower)
    return result


def growth_allowance(
    regime: Union[Regime, str], alpha: float, p: float, dimension: int, parameter: float
) -> float:
    """
    Largest growth rate g a solution may have and still lie in the weighted class.

    |u| <= C e^(g r) (exponential), C e^(g r^theta) (stretched) or C r^g
    (polynomial) with g below the returned value. Non-positive means only
    bounded (or decaying) solutions are covered.
    """
    regime = Regime.parse(regime)
    if not p >= 1:
        raise InvalidExponentError(f"p must be >= 1, got {p}")
    if regime is Regime.POLYNOMIAL:
        return (parameter - alpha - dimension + 1) / p
    return (parameter - alpha) / p


class TailVerdict(str, Enum):
    CONVERGENT = "convergent"
    DIVERGENT = "divergent"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class NormReport:
    value: float  # truncated integral c_N int_0^R |u|^p w phi^(N-1) dr
    tail: TailVerdict
    r_max: float

    def as_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "tail": self.tail.value, "r_max": self.r_max}


def tail_verdict(manifold: ModelManifold, weight: Weight, p: float, bounded: bool = True) -> TailVerdict:
    """Exponent arithmetic for the tail of int |u|^p w phi^(N-1) dr with u bounded."""
    if not bounded:
        return TailVerdict.UNDETERMINED
    warping = manifold.warping
    n = manifold.dimension
    if isinstance(warping, (EuclideanWarping, PowerLawWarping)):
        lam = 1.0 if isinstance(warping, EuclideanWarping) else warping.lam
        if isinstance(weight, PolynomialWeight):
            exponent = (n - 1) * lam - weight.tau
            return TailVerdict.CONVERGENT if exponent < -1 else TailVerdict.DIVERGENT
        return TailVerdict.CONVERGENT
    if isinstance(warping, HyperbolicWarping):
        if isinstance(weight, ExponentialWeight):
            rate = (n - 1) * math.sqrt(warping.curvature)
            return TailVerdict.CONVERGENT if weight.beta > rate else TailVerdict.DIVERGENT
        return TailVerdict.DIVERGENT
    return TailVerdict.UNDETERMINED


def weighted_lp_norm(
    manifold: ModelManifold,
    u: Union[SolutionGrid, Callable[[float], float]],
    weight: Weight,
    p: float,
    r_max: Optional[float] = None,
    bounded: bool = True,
    tol: Optional[float] = None,
) -> NormReport:
    """
    Truncated weighted L^p integral of a radial function plus a tail verdict.

    Closed forms are integrated by adaptive quadrature (r_max may be inf);
    solution grids by Simpson's rule on their own nodes up to r_max.
    """
    if not p >= 1:
        raise InvalidExponentError(f"p must be >= 1, got {p}")
    n = manifold.dimension
    c_n = sphere_constant(n)

    if isinstance(u, SolutionGrid):
        r = u.grid.nodes
        upper = float(r[-1]) if r_max is None else r_max
        if upper > r[-1] * (1 + 1e-12):
            raise InputError(f"solution is defined up to {r[-1]}, norm requested up to {upper}")
        mask = r <= upper
        r, values = r[mask], u.values[mask]
        density = np.abs(values) ** p * weight(r) * manifold.phi(r) ** (n - 1)
        value = c_n * float(simpson(density, x=r))
        is_zero = not np.any(values)
    else:
        upper = math.inf if r_max is None else r_max
        tol = get_quad_tol() if tol is None else tol

        def integrand(t: float) -> float:
            return abs(u(t)) ** p * float(weight(t)) * float(manifold.phi(t)) ** (n - 1)

        value = c_n * quad(integrand, 0.0, upper, tol, what="weighted norm")
        probe = np.geomspace(1e-3, 1e3, 61) if math.isinf(upper) else np.linspace(0.0, upper, 61)
        is_zero = value == 0.0 and all(u(float(t)) == 0.0 for t in probe)

    verdict = TailVerdict.CONVERGENT if is_zero else tail_verdict(manifold, weight, p, bounded)
    return NormReport(value=value, tail=verdict, r_max=upper)
