"""
Radial boundary-value solver for  Delta u + <b, grad u> - c u = 0  on B(o, R).

For radial data the equation reduces to

    u'' + [(N-1) phi'/phi + b_r] u' - c u = 0,   u'(0) = 0,   u(R) = gamma,

which solve_bvp discretises with second-order differences and shoot_oracle
integrates as an initial-value problem from a series start at the pole.
"""

import hashlib
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np
from numpy.typing import NDArray
from scipy import optimize
from scipy.integrate import solve_ivp
from scipy.linalg import LinAlgError, solve_banded

from .errors import DiscretizationError, InputError, IntegratorOverflowError
from .fields import Potential, RadialDrift
from .geometry import EuclideanWarping, ModelManifold, PowerLawWarping, laplacian_coefficients
from .settings import get_default_nodes

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

MIN_NODES = 64
UNIFORM_CORE_RADIUS = 2.0
MAX_SPACING_RATIO = 10.0
PECLET_LIMIT = 2.0

SHOOT_RTOL = 1e-11
SHOOT_START = 1e-4
SHOOT_CHUNK = 256
RENORMALISE_ABOVE = 1e50
SUPERSOLUTION_NODES = 4001


@dataclass(frozen=True, eq=False)
class RadialGrid:
    nodes: FloatArray
    spacing: str  # "uniform" | "geometric"
    ratio: Optional[float] = None  # geometric growth factor between consecutive spacings

    def __post_init__(self) -> None:
        r = np.asarray(self.nodes, dtype=float)
        if r.ndim != 1 or r.size < MIN_NODES:
            raise InputError(f"radial grid needs at least {MIN_NODES} nodes, got {r.size}")
        if r[0] != 0.0:
            raise InputError("radial grid must start at the pole r = 0")
        if np.any(np.diff(r) <= 0):
            raise InputError("radial grid must be strictly increasing")
        r.setflags(write=False)
        object.__setattr__(self, "nodes", r)

    @property
    def radius(self) -> float:
        return float(self.nodes[-1])

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    def describe(self) -> Dict[str, Any]:
        return {"nodes": self.size, "R": self.radius, "spacing": self.spacing, "ratio": self.ratio}


def uniform_grid(radius: float, nodes: Optional[int] = None) -> RadialGrid:
    nodes = get_default_nodes() if nodes is None else nodes
    if not radius > 0:
        raise InputError(f"truncation radius must be positive, got {radius}")
    return RadialGrid(np.linspace(0.0, radius, nodes), "uniform")


def _geometric_length(h0: float, q: float, m: int) -> float:
    """h0 (q + q^2 + ... + q^m)."""
    return h0 * q * math.expm1(m * math.log(q)) / (q - 1.0)


def graded_grid(
    radius: float,
    nodes: Optional[int] = None,
    core: float = UNIFORM_CORE_RADIUS,
    max_ratio: float = MAX_SPACING_RATIO,
) -> RadialGrid:
    """
    Uniform on [0, core], geometric on [core, R].

    The split is chosen to keep as many nodes in the core as possible while
    the last spacing stays within max_ratio times the core spacing.
    """
    nodes = get_default_nodes() if nodes is None else nodes
    if radius <= core * 1.05:
        return uniform_grid(radius, nodes)
    n = nodes - 1
    length = radius - core

    n0 = np.arange(1, n, dtype=float)
    m = n - n0
    h0 = core / n0
    q_cap = max_ratio ** (1.0 / m)
    reach = h0 * q_cap * (max_ratio - 1.0) / (q_cap - 1.0)
    feasible = np.flatnonzero((reach >= length) & (h0 * m < length))

    if feasible.size:
        core_intervals = int(n0[feasible[-1]])
        q_hi = float(q_cap[feasible[-1]])
    else:
        core_intervals = max(n // 10, 1)
        logger.warning(
            "graded grid: %d nodes cannot reach R=%g with spacing ratio <= %g; using a steeper grading",
            nodes,
            radius,
            max_ratio,
        )
        q_hi = 1.0 + 1.0 / (n - core_intervals)
        while _geometric_length(core / core_intervals, q_hi, n - core_intervals) < length:
            q_hi = 1.0 + 2.0 * (q_hi - 1.0)

    steps = n - core_intervals
    spacing = core / core_intervals
    q = optimize.brentq(
        lambda x: _geometric_length(spacing, x, steps) - length, 1.0 + 1e-14, q_hi, xtol=1e-15, rtol=1e-15
    )
    outer = core + spacing * np.cumsum(q ** np.arange(1, steps + 1))
    outer[-1] = radius
    r = np.concatenate([np.linspace(0.0, core, core_intervals + 1), outer])
    logger.debug("graded grid: %d core intervals, %d geometric, ratio %.8f", core_intervals, steps, q)
    return RadialGrid(r, "geometric", ratio=float(q))


def make_grid(radius: float, nodes: Optional[int] = None, grading: str = "geometric") -> RadialGrid:
    if grading == "uniform":
        return uniform_grid(radius, nodes)
    if grading == "geometric":
        return graded_grid(radius, nodes)
    raise InputError(f"unknown grid grading {grading!r}")


@dataclass(frozen=True)
class BVPProblem:
    manifold: ModelManifold
    drift: RadialDrift
    potential: Potential
    gamma: float
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise InputError(f"truncation radius must be positive, got {self.radius}")
        if not math.isfinite(self.gamma):
            raise InputError(f"boundary value must be finite, got {self.gamma}")

    def describe(self) -> Dict[str, Any]:
        return {
            "manifold": self.manifold.describe(),
            "drift": self.drift.describe(),
            "potential": self.potential.describe(),
            "gamma": self.gamma,
            "R": self.radius,
        }

    def digest(self) -> str:
        text = json.dumps(self.describe(), sort_keys=True)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def with_gamma(self, gamma: float) -> "BVPProblem":
        return BVPProblem(self.manifold, self.drift, self.potential, gamma, self.radius)

    def with_radius(self, radius: float) -> "BVPProblem":
        return BVPProblem(self.manifold, self.drift, self.potential, self.gamma, radius)


@dataclass(frozen=True, eq=False)
class SolutionGrid:
    problem: BVPProblem
    grid: RadialGrid
    values: FloatArray
    residual: float
    method: str
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values.setflags(write=False)

    @property
    def problem_hash(self) -> str:
        return self.problem.digest()

    def at(self, r: float) -> float:
        """Value at a radius, interpolating linearly between nodes."""
        return float(np.interp(r, self.grid.nodes, self.values))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def summary(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "gamma": self.problem.gamma,
            "R": self.problem.radius,
            "grid": self.grid.describe(),
            "residual": self.residual,
            "sup_norm": self.sup_norm(),
            "problem_hash": self.problem_hash,
            **self.metadata,
        }


def _coefficients(problem: BVPProblem, r: FloatArray) -> tuple[FloatArray, FloatArray]:
    """First-order coefficient (N-1) phi'/phi + b_r at r > 0 and c at every node."""
    drift_at_pole = float(problem.drift.profile(0.0))
    if abs(drift_at_pole) > 1e-12:
        raise InputError(f"radial drift must vanish at the pole, b_r(0) = {drift_at_pole}")
    first = laplacian_coefficients(problem.manifold, r[1:]) + problem.drift.profile(r[1:])
    c = problem.potential.value(r)
    if not (np.all(np.isfinite(first)) and np.all(np.isfinite(c))):
        raise InputError("equation coefficients are not finite on the grid")
    if np.any(c < 0):
        logger.warning("potential is negative somewhere on [0, %g]; the discrete system may be singular", r[-1])
    return first, c


def _check_grid(problem: BVPProblem, grid: RadialGrid) -> None:
    if abs(grid.radius - problem.radius) > 1e-12 * problem.radius:
        raise InputError(f"grid ends at {grid.radius}, problem is posed on [0, {problem.radius}]")


def residual_profile(
    manifold: ModelManifold, drift: RadialDrift, potential: Potential, r: FloatArray, u: FloatArray
) -> FloatArray:
    """
    |u'' + ((N-1) phi'/phi + b_r) u' - c u| with derivatives by numpy.gradient applied twice.

    Only nodes whose second gradient is built from centered first
    differences are reported; the one-sided edge formula is first order there.
    """
    du = np.gradient(u, r, edge_order=2)
    d2u = np.gradient(du, r, edge_order=2)
    inner = slice(2, -2)
    ri = r[inner]
    first = laplacian_coefficients(manifold, ri) + drift.profile(ri)
    return np.abs(d2u[inner] + first * du[inner] - potential.value(ri) * u[inner])


def residual(manifold: ModelManifold, drift: RadialDrift, potential: Potential, solution: SolutionGrid) -> float:
    """Sup-norm of the equation applied to a discrete solution over interior nodes."""
    return float(np.max(residual_profile(manifold, drift, potential, solution.grid.nodes, solution.values)))


def solve_bvp(problem: BVPProblem, grid: Optional[RadialGrid] = None, upwind: bool = False) -> SolutionGrid:
    """
    Centered finite differences on a possibly non-uniform grid.

    The pole row is the limit of the equation as r -> 0, N u''(0) = c(0) u(0),
    with u''(0) ~ 2 (u_1 - u_0) / h_1^2 from u'(0) = 0. With upwind=True the
    first-order term switches to a one-sided difference wherever the cell
    Peclet number |coefficient| h exceeds 2.
    """
    grid = graded_grid(problem.radius) if grid is None else grid
    _check_grid(problem, grid)
    r = grid.nodes
    n = r.size - 1
    first, c = _coefficients(problem, r)
    dim = problem.manifold.dimension

    hm = r[1:-1] - r[:-2]
    hp = r[2:] - r[1:-1]
    hs = hm + hp
    p = first[:-1]

    lower = 2.0 / (hm * hs) - p * hp / (hm * hs)
    diag = -2.0 / (hm * hp) + p * (hp - hm) / (hm * hp) - c[1:-1]
    upper = 2.0 / (hp * hs) + p * hm / (hp * hs)

    peclet = np.abs(p) * np.maximum(hm, hp)
    upwinded = 0
    if upwind:
        fwd = (peclet > PECLET_LIMIT) & (p > 0)
        bwd = (peclet > PECLET_LIMIT) & (p < 0)
        lower = np.where(fwd, 2.0 / (hm * hs), np.where(bwd, 2.0 / (hm * hs) - p / hm, lower))
        diag = np.where(
            fwd,
            -2.0 / (hm * hp) - p / hp - c[1:-1],
            np.where(bwd, -2.0 / (hm * hp) + p / hm - c[1:-1], diag),
        )
        upper = np.where(fwd, 2.0 / (hp * hs) + p / hp, np.where(bwd, 2.0 / (hp * hs), upper))
        upwinded = int(np.count_nonzero(fwd | bwd))

    banded = np.zeros((3, n + 1))
    h1 = r[1]
    banded[1, 0] = -2.0 * dim / h1**2 - c[0]
    banded[0, 1] = 2.0 * dim / h1**2
    banded[0, 2:] = upper
    banded[1, 1:n] = diag
    banded[2, : n - 1] = lower
    banded[1, n] = 1.0

    rhs = np.zeros(n + 1)
    rhs[n] = problem.gamma
    try:
        values = solve_banded((1, 1), banded, rhs)
    except (LinAlgError, ValueError) as e:
        raise DiscretizationError(f"tridiagonal system is singular: {e}") from e
    if not np.all(np.isfinite(values)):
        raise DiscretizationError("tridiagonal solve produced non-finite values")
    values[n] = problem.gamma

    res = float(np.max(residual_profile(problem.manifold, problem.drift, problem.potential, r, values)))
    logger.info(
        "solve_bvp: R=%g gamma=%g nodes=%d residual=%.3e max Peclet=%.3g",
        problem.radius,
        problem.gamma,
        r.size,
        res,
        float(peclet.max()),
    )
    metadata = {"max_cell_peclet": float(peclet.max()), "upwinded_nodes": upwinded}
    return SolutionGrid(problem, grid, values, res, "finite-difference", metadata)


def _shoot_unit(problem: BVPProblem, r: FloatArray, chunk: int) -> tuple[FloatArray, FloatArray]:
    """Regular solution with u(0) = 1 as mantissa and log-scale per node."""
    dim = problem.manifold.dimension
    c0 = float(problem.potential.value(0.0))
    eps = min(SHOOT_START, r[1] / 2.0)

    def rhs(t: float, y: FloatArray) -> FloatArray:
        first = float(laplacian_coefficients(problem.manifold, t) + problem.drift.profile(t))
        return np.array([y[1], -first * y[1] + float(problem.potential.value(t)) * y[0]])

    def jac(t: float, y: FloatArray) -> FloatArray:
        first = float(laplacian_coefficients(problem.manifold, t) + problem.drift.profile(t))
        return np.array([[0.0, 1.0], [float(problem.potential.value(t)), -first]])

    mantissa = np.empty_like(r)
    log_scale = np.zeros_like(r)
    mantissa[0] = 1.0
    state = np.array([1.0 + c0 * eps**2 / (2.0 * dim), c0 * eps / dim])
    start, shift = eps, 0.0
    for lo in range(1, r.size, chunk):
        targets = r[lo : lo + chunk]
        sol = solve_ivp(
            rhs,
            (start, float(targets[-1])),
            state,
            method="LSODA",
            t_eval=targets,
            rtol=SHOOT_RTOL,
            atol=SHOOT_RTOL * 1e-3,
            jac=jac,
        )
        if not sol.success or not np.all(np.isfinite(sol.y)):
            raise IntegratorOverflowError(f"shooting failed on [{start:g}, {targets[-1]:g}]: {sol.message}")
        mantissa[lo : lo + targets.size] = sol.y[0]
        log_scale[lo : lo + targets.size] = shift
        state = sol.y[:, -1]
        start = float(targets[-1])
        size = float(np.max(np.abs(state)))
        if size > RENORMALISE_ABOVE or 0.0 < size < 1.0 / RENORMALISE_ABOVE:
            state = state / size
            shift += math.log(size)
    return mantissa, log_scale


def shoot_oracle(problem: BVPProblem, grid: Optional[RadialGrid] = None) -> SolutionGrid:
    """
    Independent shooting solution on the nodes of `grid`.

    The regular solution u_1 with u_1(0) = 1 is integrated once (LSODA, with
    piecewise renormalisation); the amplitude a = gamma / u_1(R) is then the
    exact secant step of the linear map a -> u(R).
    """
    grid = graded_grid(problem.radius) if grid is None else grid
    _check_grid(problem, grid)
    r = grid.nodes
    _coefficients(problem, r)

    try:
        mantissa, log_scale = _shoot_unit(problem, r, SHOOT_CHUNK)
    except IntegratorOverflowError:
        logger.warning("shoot_oracle: retrying R=%g with finer renormalisation", problem.radius)
        mantissa, log_scale = _shoot_unit(problem, r, 16)

    end = float(mantissa[-1])
    if end == 0.0:
        raise IntegratorOverflowError("regular solution vanishes at R; amplitude is undefined")
    with np.errstate(under="ignore"):
        shape = mantissa / end * np.exp(log_scale - log_scale[-1])
    values = problem.gamma * shape
    values[-1] = problem.gamma

    res = float(np.max(residual_profile(problem.manifold, problem.drift, problem.potential, r, values)))
    amplitude_log = -(math.log(abs(end)) + float(log_scale[-1]))
    logger.info("shoot_oracle: R=%g gamma=%g residual=%.3e", problem.radius, problem.gamma, res)
    metadata = {"log_abs_unit_amplitude": amplitude_log}
    return SolutionGrid(problem, grid, values, res, "shooting", metadata)


@dataclass(frozen=True)
class Barrier:
    """Closed-form candidate with exact first and second derivatives."""

    kind: str
    params: Dict[str, float]
    value: Callable[[FloatArray], FloatArray]
    first: Callable[[FloatArray], FloatArray]
    second: Callable[[FloatArray], FloatArray]

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, **self.params}


def power_barrier(constant: float, beta: float) -> Barrier:
    """h(r) = C r^(-beta)."""
    return Barrier(
        kind="power",
        params={"C": constant, "beta": beta},
        value=lambda r: constant * r ** (-beta),
        first=lambda r: -beta * constant * r ** (-beta - 1.0),
        second=lambda r: beta * (beta + 1.0) * constant * r ** (-beta - 2.0),
    )


def constant_barrier(c0: float) -> Barrier:
    """W = 1 / c0."""
    if not c0 > 0:
        raise InputError(f"c0 must be positive, got {c0}")
    return Barrier(
        kind="constant",
        params={"c0": c0},
        value=lambda r: np.full_like(r, 1.0 / c0),
        first=lambda r: np.zeros_like(r),
        second=lambda r: np.zeros_like(r),
    )


@dataclass(frozen=True)
class SupersolutionReport:
    passed: bool
    margin: float  # rhs_bound - max L[h]
    max_value: float
    worst_radius: float
    domain: tuple[float, float]
    barrier: Dict[str, Any]
    rhs_bound: float
    asymptotic_max: Optional[float] = None

    @property
    def witness(self) -> Optional[Dict[str, float]]:
        if self.passed:
            return None
        return {"radius": self.worst_radius, "value": self.max_value, "bound": self.rhs_bound}

    def as_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "margin": self.margin,
            "max_value": self.max_value,
            "worst_radius": self.worst_radius,
            "domain": list(self.domain),
            "barrier": self.barrier,
            "rhs_bound": self.rhs_bound,
            "asymptotic_max": self.asymptotic_max,
            "witness": self.witness,
        }


def _volume_exponent(manifold: ModelManifold) -> Optional[float]:
    warping = manifold.warping
    if isinstance(warping, EuclideanWarping):
        return 1.0
    if isinstance(warping, PowerLawWarping):
        return warping.lam
    return None


def verify_supersolution(
    manifold: ModelManifold,
    drift: RadialDrift,
    potential: Potential,
    barrier: Barrier,
    domain: tuple[float, float],
    rhs_bound: float = -1.0,
    nodes: int = SUPERSOLUTION_NODES,
) -> SupersolutionReport:
    """Check L[h] = h'' + ((N-1) phi'/phi + b_r) h' - c h <= rhs_bound on a dense grid over domain."""
    lo, hi = float(domain[0]), float(domain[1])
    if not 0 < lo < hi:
        raise InputError(f"supersolution domain must satisfy 0 < R0 < R_max, got [{lo}, {hi}]")
    r = np.geomspace(lo, hi, nodes)
    b = drift.profile(r)
    c = potential.value(r)
    operator = barrier.second(r) + (laplacian_coefficients(manifold, r) + b) * barrier.first(r) - c * barrier.value(r)
    worst = int(np.argmax(operator))
    max_value = float(operator[worst])
    passed = max_value <= rhs_bound + 1e-12 * max(1.0, abs(rhs_bound))

    asymptotic = None
    lam = _volume_exponent(manifold)
    if barrier.kind == "power" and lam is not None:
        big_c, beta = barrier.params["C"], barrier.params["beta"]
        estimate = (
            beta * big_c * (beta + 1.0 - (manifold.dimension - 1) * lam) * r ** (-beta - 2.0)
            - beta * big_c * b * r ** (-beta - 1.0)
            - c * big_c * r ** (-beta)
        )
        asymptotic = float(np.max(estimate))

    report = SupersolutionReport(
        passed=passed,
        margin=rhs_bound - max_value,
        max_value=max_value,
        worst_radius=float(r[worst]),
        domain=(lo, hi),
        barrier=barrier.describe(),
        rhs_bound=rhs_bound,
        asymptotic_max=asymptotic,
    )
    logger.info(
        "supersolution %s on [%g, %g]: %s, margin %.4g", barrier.kind, lo, hi, "pass" if passed else "fail", report.margin
    )
    return report


def solve_many(
    problems: list[BVPProblem], solve: Callable[[BVPProblem], SolutionGrid], workers: int = 1
) -> list[SolutionGrid]:
    """Solve independent problems, in parallel when workers > 1, keeping input order."""
    if workers <= 1 or len(problems) <= 1:
        return [solve(p) for p in problems]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(solve, problems))
