"""
Model manifold geometry.

A model manifold is [0, inf) x S^{N-1} with metric dr^2 + phi(r)^2 dtheta^2.
Everything radial the rest of the lab needs lives here: warping functions,
the first-order coefficient of the radial Laplacian, geodesic-ball volume and
volume-growth classification.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .errors import (
    InputError,
    InternalConsistencyError,
    InvalidDimensionError,
    PoleSingularityError,
    ToleranceNotMetError,
)
from .settings import get_quad_tol

logger = logging.getLogger(__name__)

# Quadrature budget: QUADPACK spends 21 evaluations per subinterval.
QUAD_EVALUATION_BUDGET = 1_000_000
QUAD_SUBINTERVAL_LIMIT = QUAD_EVALUATION_BUDGET // 21

# A growth class fits when log V deviates from the fitted model by at most this.
GROWTH_FIT_RESIDUAL = 0.1
# Growth order bands: ~0 polynomial, in between stretched, ~1 exponential.
POLYNOMIAL_ORDER_MAX = 0.2
EXPONENTIAL_ORDER_MIN = 0.9
EXPONENTIAL_ORDER_MAX = 1.1

FloatArray = NDArray[np.float64]


class WarpingFunction(ABC):
    """Radial profile phi of a rotationally symmetric metric."""

    kind: str = ""

    @abstractmethod
    def value(self, r: ArrayLike) -> FloatArray:
        """phi(r)."""

    @abstractmethod
    def derivative(self, r: ArrayLike) -> FloatArray:
        """phi'(r)."""

    def log_derivative(self, r: ArrayLike) -> FloatArray:
        """phi'/phi for r > 0."""
        return self.derivative(r) / self.value(r)

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """JSON-friendly description, used for hashing and reports."""

    @property
    def max_radius(self) -> float:
        return math.inf

    def validate(self) -> None:
        """Check phi(0) = 0, phi'(0) = 1 and positivity numerically."""
        if abs(float(self.value(0.0))) > 1e-12:
            raise InputError(f"{self.kind} warping: phi(0) must be 0")
        for r in (1e-6, 1e-4):
            ratio = float(self.value(r)) / r
            if abs(ratio - 1.0) > 1e-3:
                raise InputError(
                    f"{self.kind} warping: phi(r)/r = {ratio:.6g} at r={r:g}, expected 1 (phi'(0) = 1)"
                )
        upper = min(self.max_radius, 100.0)
        probe = np.linspace(upper / 1000.0, upper, 1000)
        if np.any(self.value(probe) <= 0.0):
            raise InputError(f"{self.kind} warping: phi must be positive for r > 0")


class EuclideanWarping(WarpingFunction):
    kind = "euclidean"

    def value(self, r: ArrayLike) -> FloatArray:
        return np.asarray(r, dtype=float)

    def derivative(self, r: ArrayLike) -> FloatArray:
        return np.ones_like(np.asarray(r, dtype=float))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind}


@dataclass(frozen=True)
class HyperbolicWarping(WarpingFunction):
    """phi(r) = sinh(sqrt(k) r) / sqrt(k): constant curvature -k."""

    curvature: float = 1.0
    kind = "hyperbolic"

    def __post_init__(self) -> None:
        if not self.curvature > 0:
            raise InputError(f"hyperbolic curvature must be positive, got {self.curvature}")

    def value(self, r: ArrayLike) -> FloatArray:
        s = math.sqrt(self.curvature)
        return np.sinh(s * np.asarray(r, dtype=float)) / s

    def derivative(self, r: ArrayLike) -> FloatArray:
        s = math.sqrt(self.curvature)
        return np.cosh(s * np.asarray(r, dtype=float))

    def log_derivative(self, r: ArrayLike) -> FloatArray:
        s = math.sqrt(self.curvature)
        return s / np.tanh(s * np.asarray(r, dtype=float))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "curvature": self.curvature}


@dataclass(frozen=True)
class PowerLawWarping(WarpingFunction):
    """phi(r) = r (1 + r)^(lam - 1), a smooth stand-in for phi = r^lam on r > 1."""

    lam: float = 1.0
    kind = "power_law"

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise InputError(f"power-law exponent must be >= 0, got {self.lam}")

    def value(self, r: ArrayLike) -> FloatArray:
        r = np.asarray(r, dtype=float)
        return r * (1.0 + r) ** (self.lam - 1.0)

    def derivative(self, r: ArrayLike) -> FloatArray:
        r = np.asarray(r, dtype=float)
        return (1.0 + r) ** (self.lam - 2.0) * (1.0 + self.lam * r)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "lambda": self.lam}


@dataclass(frozen=True)
class SampledWarping(WarpingFunction):
    """Warping given by (r, phi(r)) samples, interpolated monotone-cubically."""

    radii: tuple[float, ...] = ()
    values: tuple[float, ...] = ()
    kind = "sampled"
    _spline: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 4:
            raise InputError("sampled warping needs at least 4 matching (r, phi) pairs")
        if r[0] != 0.0 or v[0] != 0.0:
            raise InputError("sampled warping must start at (0, 0)")
        if np.any(np.diff(r) <= 0):
            raise InputError("sampled warping radii must be strictly increasing")
        object.__setattr__(self, "_spline", PchipInterpolator(r, v, extrapolate=False))

    @classmethod
    def from_function(cls, func: Callable[[FloatArray], FloatArray], radii: ArrayLike) -> "SampledWarping":
        r = np.asarray(radii, dtype=float)
        return cls(radii=tuple(r.tolist()), values=tuple(np.asarray(func(r), dtype=float).tolist()))

    @property
    def max_radius(self) -> float:
        return float(self.radii[-1])

    def _checked(self, out: FloatArray) -> FloatArray:
        if not np.all(np.isfinite(out)):
            raise InputError(f"sampled warping evaluated outside [0, {self.max_radius}]")
        return out

    def value(self, r: ArrayLike) -> FloatArray:
        return self._checked(np.asarray(self._spline(r), dtype=float))

    def derivative(self, r: ArrayLike) -> FloatArray:
        return self._checked(np.asarray(self._spline(r, 1), dtype=float))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "samples": [list(p) for p in zip(self.radii, self.values)]}


@dataclass(frozen=True)
class ModelManifold:
    dimension: int
    warping: WarpingFunction

    def __post_init__(self) -> None:
        if not isinstance(self.dimension, int) or self.dimension < 2:
            raise InvalidDimensionError(f"dimension must be an integer >= 2, got {self.dimension!r}")
        self.warping.validate()

    def phi(self, r: ArrayLike) -> FloatArray:
        return self.warping.value(r)

    def dphi(self, r: ArrayLike) -> FloatArray:
        return self.warping.derivative(r)

    def describe(self) -> Dict[str, Any]:
        return {"dimension": self.dimension, "warping": self.warping.describe()}


def sphere_constant(dimension: int) -> float:
    """Area of the unit (N-1)-sphere: 2 pi^(N/2) / Gamma(N/2)."""
    if dimension < 2:
        raise InvalidDimensionError(f"dimension must be >= 2, got {dimension}")
    return 2.0 * math.pi ** (dimension / 2.0) / math.gamma(dimension / 2.0)


def laplacian_coefficients(manifold: ModelManifold, r: ArrayLike) -> FloatArray:
    """Vectorised (N-1) phi'/phi for r > 0; no pole check."""
    r = np.asarray(r, dtype=float)
    return (manifold.dimension - 1) * manifold.warping.log_derivative(r)


def radial_laplacian_coeff(manifold: ModelManifold, r: float) -> float:
    """Delta r = (N-1) phi'(r)/phi(r), the first-order coefficient of the radial Laplacian."""
    if r <= 0:
        raise PoleSingularityError(f"radial Laplacian coefficient is singular at r={r}")
    return float(laplacian_coefficients(manifold, r))


def quad(
    integrand: Callable[[float], float],
    lower: float,
    upper: float,
    tol: float,
    what: str = "integral",
) -> float:
    """Adaptive quadrature with a purely relative tolerance; raises when it does not converge."""
    out = integrate.quad(
        integrand, lower, upper, epsabs=0.0, epsrel=tol, limit=QUAD_SUBINTERVAL_LIMIT, full_output=1
    )
    value, error = float(out[0]), float(out[1])
    if len(out) > 3:
        raise ToleranceNotMetError(
            f"{what} on [{lower}, {upper}] did not reach rtol={tol:g}: {out[3]}",
            best_estimate=value,
            error_estimate=error,
        )
    logger.debug("%s on [%g, %g] = %.12g (err %.2e, %d evals)", what, lower, upper, value, error, out[2]["neval"])
    return value


def volume(manifold: ModelManifold, r: float, tol: Optional[float] = None) -> float:
    """V(o, r) = c_N int_0^r phi^(N-1)(t) dt."""
    if r < 0:
        raise InputError(f"radius must be >= 0, got {r}")
    if r == 0:
        return 0.0
    if r > manifold.warping.max_radius:
        raise InputError(f"radius {r} outside the sampled warping range")
    tol = get_quad_tol() if tol is None else tol
    n = manifold.dimension

    def integrand(t: float) -> float:
        return float(manifold.phi(t)) ** (n - 1)

    return sphere_constant(n) * quad(integrand, 0.0, r, tol, what="volume")


def volumes(manifold: ModelManifold, radii: Sequence[float], tol: Optional[float] = None) -> FloatArray:
    """Volumes at increasing radii, accumulated interval by interval."""
    tol = get_quad_tol() if tol is None else tol
    n = manifold.dimension
    c_n = sphere_constant(n)

    def integrand(t: float) -> float:
        return float(manifold.phi(t)) ** (n - 1)

    total = 0.0
    previous = 0.0
    out = []
    for r in radii:
        if r > previous:
            total += c_n * quad(integrand, previous, float(r), tol, what="volume")
        out.append(total)
        previous = float(r)
    return np.asarray(out)


def power_law_exponent(manifold: ModelManifold) -> Optional[float]:
    """Exact polynomial volume exponent (N-1) lam + 1, when the warping is a power law."""
    warping = manifold.warping
    if isinstance(warping, EuclideanWarping):
        return float(manifold.dimension)
    if isinstance(warping, PowerLawWarping):
        return (manifold.dimension - 1) * warping.lam + 1.0
    return None


@dataclass(frozen=True)
class GrowthReport:
    growth_class: str  # polynomial | stretched-exponential | exponential | super-exponential
    alpha: Optional[float]
    theta: Optional[float]
    residual: float
    fits: Dict[str, Dict[str, float]]
    exact_exponent: Optional[float] = None
    growth_order: Optional[float] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "class": self.growth_class,
            "alpha": self.alpha,
            "theta": self.theta,
            "residual": self.residual,
            "fits": self.fits,
            "exact_exponent": self.exact_exponent,
            "growth_order": self.growth_order,
        }


def _least_squares(basis: Sequence[FloatArray], y: FloatArray) -> tuple[FloatArray, float]:
    design = np.column_stack(basis)
    coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.max(np.abs(y - design @ coeffs)))
    return coeffs, residual


def _tail_mask(radii: FloatArray) -> NDArray[np.bool_]:
    """Upper half of the samples."""
    mask = np.zeros(radii.size, dtype=bool)
    mask[radii.size // 2 :] = True
    return mask


def growth_order(manifold: ModelManifold, r: float, vol: float) -> float:
    """
    d log s / d log r with s = r V'/V the local volume exponent.

    Tends to 0 for polynomial growth, to theta for V ~ exp(a r^theta) and to 1
    for exponential growth; power-law prefactors of V only shift it by O(1/r).
    """
    n = manifold.dimension
    s = r * sphere_constant(n) * float(manifold.phi(r)) ** (n - 1) / vol
    return float(1.0 + r * laplacian_coefficients(manifold, r) - s)


def classify_volume_growth(
    manifold: ModelManifold, radii: Sequence[float], tol: Optional[float] = None
) -> GrowthReport:
    """
    Fit the sampled volume against the nested growth classes and report the tightest.

    The growth order at the largest radius picks the first candidate class;
    a class fits when the largest deviation of log V from its model over the
    upper half of the samples is at most GROWTH_FIT_RESIDUAL, otherwise the
    next wider class is tried. Each model carries a log r prefactor term
    (a 1/r correction for the polynomial class).
    """
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1 or r.size < 8:
        raise InputError("volume growth classification needs at least 8 radii")
    if np.any(np.diff(r) <= 0) or r[0] <= 0:
        raise InputError("radii must be positive and strictly increasing")
    if r[-1] < 10:
        raise InputError("largest radius must be at least 10")

    vols = volumes(manifold, r, tol)
    if np.any(np.diff(vols) <= 0) or not np.all(np.isfinite(vols)):
        raise InternalConsistencyError("sampled volumes are not strictly increasing")

    mask = _tail_mask(r)
    rt, log_v = r[mask], np.log(vols[mask])
    ones = np.ones_like(rt)
    exact = power_law_exponent(manifold)
    order = growth_order(manifold, float(r[-1]), float(vols[-1]))
    fits: Dict[str, Dict[str, float]] = {}

    candidates = ["polynomial", "stretched-exponential", "exponential"]
    if order > POLYNOMIAL_ORDER_MAX:
        candidates.remove("polynomial")
    if order >= EXPONENTIAL_ORDER_MIN:
        candidates.remove("stretched-exponential")
    if order > EXPONENTIAL_ORDER_MAX:
        candidates = []

    for growth_class in candidates:
        theta: Optional[float] = None
        if growth_class == "polynomial":
            (alpha, correction, intercept), residual = _least_squares([np.log(rt), 1.0 / rt, ones], log_v)
            fits[growth_class] = {"alpha": alpha, "correction": correction, "intercept": intercept}
        elif growth_class == "stretched-exponential":
            theta = min(max(order, POLYNOMIAL_ORDER_MAX), EXPONENTIAL_ORDER_MIN)
            (alpha, prefactor, intercept), residual = _least_squares([rt**theta, np.log(rt), ones], log_v)
            fits[growth_class] = {"alpha": alpha, "theta": theta, "prefactor": prefactor, "intercept": intercept}
        else:
            (alpha, prefactor, intercept), residual = _least_squares([rt, np.log(rt), ones], log_v)
            fits[growth_class] = {"alpha": alpha, "prefactor": prefactor, "intercept": intercept}
        fits[growth_class]["residual"] = residual
        if residual <= GROWTH_FIT_RESIDUAL and alpha > 0:
            if growth_class == "polynomial" and exact is not None and abs(alpha - exact) > 0.05 * exact:
                logger.warning("fitted volume exponent %.4f disagrees with the exact %.4f", alpha, exact)
            logger.debug("volume growth %s, alpha=%.4f, order=%.3f", growth_class, alpha, order)
            return GrowthReport(growth_class, float(alpha), theta, residual, fits, exact, order)

    residual = max((f["residual"] for f in fits.values()), default=math.inf)
    return GrowthReport("super-exponential", None, None, residual, fits, exact, order)


def growth_envelope(
    manifold: ModelManifold,
    regime: str,
    radii: Sequence[float],
    theta: Optional[float] = None,
    tol: Optional[float] = None,
) -> float:
    """
    Smallest alpha for which the sampled volume obeys the regime's growth bound.

    exponential: V <= e^(alpha r); stretched: V <= e^(alpha r^theta), both
    enforced on samples with r >= 1. polynomial: the fitted tail exponent.
    """
    r = np.asarray(radii, dtype=float)
    if regime == "polynomial":
        report = classify_volume_growth(manifold, r, tol)
        if report.growth_class != "polynomial" or report.alpha is None:
            raise InputError(f"volume growth is {report.growth_class}, not polynomial")
        return report.alpha
    if regime == "stretched":
        if theta is None or not 0 < theta < 1:
            raise InputError("stretched envelope needs theta in (0, 1)")
        power = theta
    elif regime == "exponential":
        power = 1.0
    else:
        raise InputError(f"unknown regime {regime!r}")
    r = r[r >= 1.0]
    if r.size == 0:
        raise InputError("growth envelope needs radii >= 1")
    log_v = np.log(volumes(manifold, r, tol))
    return max(0.0, float(np.max(log_v / r**power)))
