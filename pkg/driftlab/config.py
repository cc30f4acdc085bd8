"""
Scenario documents: strict JSON schema, presets and conversion to domain objects.
"""

import hashlib
import json
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigurationError, LabError
from .experiments import BarrierSpec, ExpectedRegime, ModelDichotomy, Scenario
from .fields import (
    ConstantPotential,
    OscillatingDrift,
    PolynomialPotential,
    Potential,
    PowerAffineDrift,
    RadialDrift,
    SampledDrift,
    ZeroDrift,
)
from .geometry import (
    EuclideanWarping,
    HyperbolicWarping,
    ModelManifold,
    PowerLawWarping,
    SampledWarping,
    WarpingFunction,
)
from .weights import ExponentialWeight, PolynomialWeight, StretchedExponentialWeight, Weight

PRESET_PACKAGE = "driftlab.presets"


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class WarpingConfig(StrictModel):
    kind: Literal["euclidean", "hyperbolic", "power_law", "sampled"]
    lam: Optional[float] = Field(default=None, alias="lambda")
    curvature: Optional[float] = None
    samples: Optional[List[Tuple[float, float]]] = None

    @model_validator(mode="after")
    def _required(self) -> "WarpingConfig":
        if self.kind == "power_law" and self.lam is None:
            raise ValueError("power_law warping needs 'lambda'")
        if self.kind == "hyperbolic" and self.curvature is None:
            raise ValueError("hyperbolic warping needs 'curvature'")
        if self.kind == "sampled" and not self.samples:
            raise ValueError("sampled warping needs 'samples'")
        return self


class DriftConfig(StrictModel):
    family: Literal["power_affine", "oscillating", "zero", "sampled"]
    amplitude: Optional[float] = None
    exponent: Optional[float] = None
    offset: Optional[float] = None
    frequency: Optional[float] = None
    samples: Optional[List[Tuple[float, float]]] = None

    @model_validator(mode="after")
    def _required(self) -> "DriftConfig":
        if self.family == "power_affine" and (self.amplitude is None or self.exponent is None):
            raise ValueError("power_affine drift needs 'amplitude' and 'exponent'")
        if self.family == "oscillating" and self.amplitude is None:
            raise ValueError("oscillating drift needs 'amplitude'")
        if self.family == "sampled" and not self.samples:
            raise ValueError("sampled drift needs 'samples'")
        return self


class PotentialConfig(StrictModel):
    kind: Literal["constant", "polynomial"]
    c0: float = Field(gt=0)
    coefficients: Optional[List[float]] = None

    @model_validator(mode="after")
    def _required(self) -> "PotentialConfig":
        if self.kind == "polynomial" and not self.coefficients:
            raise ValueError("polynomial potential needs 'coefficients'")
        return self


class WeightConfig(StrictModel):
    family: Literal["exponential", "stretched_exponential", "polynomial"]
    beta: Optional[float] = None
    theta: Optional[float] = None
    tau: Optional[float] = None

    @model_validator(mode="after")
    def _required(self) -> "WeightConfig":
        if self.family in ("exponential", "stretched_exponential") and self.beta is None:
            raise ValueError(f"{self.family} weight needs 'beta'")
        if self.family == "stretched_exponential" and self.theta is None:
            raise ValueError("stretched_exponential weight needs 'theta'")
        if self.family == "polynomial" and self.tau is None:
            raise ValueError("polynomial weight needs 'tau'")
        return self


class SolverConfig(StrictModel):
    radius: Optional[float] = Field(default=None, alias="R", gt=0)
    nodes: Optional[int] = Field(default=None, ge=64)
    grading: Literal["uniform", "geometric"] = "geometric"
    upwind: bool = False


class ExperimentConfig(StrictModel):
    r_star: float = Field(gt=0)
    ladder: List[float] = Field(alias="R_ladder")
    gammas: List[float] = Field(default_factory=lambda: [1.0])
    regime: Literal["uniqueness-expected", "multiplicity-expected", "unknown"] = "unknown"


class ScenarioConfig(StrictModel):
    name: Optional[str] = None
    dimension: int = Field(ge=2)
    warping: WarpingConfig
    drift: DriftConfig
    potential: PotentialConfig
    weight: WeightConfig
    p: float = 2.0
    solver: SolverConfig = Field(default_factory=SolverConfig)
    experiment: ExperimentConfig


class SupersolutionConfig(StrictModel):
    constant: float = Field(alias="C", gt=0)
    beta: float = Field(gt=0)
    domain: Tuple[float, float]


class DichotomyConfig(StrictModel):
    name: Optional[str] = None
    uniqueness: ScenarioConfig
    multiplicity: ScenarioConfig
    supersolution: SupersolutionConfig


AnyConfig = Union[ScenarioConfig, DichotomyConfig]


def _diagnostics(error: ValidationError) -> List[str]:
    out = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<root>"
        out.append(f"{path}: {item['msg']}")
    return out


def parse_config(text: str, source: str = "<config>") -> AnyConfig:
    """Parse a scenario or model-dichotomy document; every problem is reported with its key path."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{source}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(document, dict):
        raise ConfigurationError(f"{source}: top level must be a JSON object")
    model = DichotomyConfig if "uniqueness" in document or "multiplicity" in document else ScenarioConfig
    try:
        return model.model_validate(document)
    except ValidationError as e:
        raise ConfigurationError(f"{source}:\n  " + "\n  ".join(_diagnostics(e))) from e


def load_config(path: Union[str, Path]) -> AnyConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ConfigurationError(f"{path}: not UTF-8 text") from e
    return parse_config(text, str(path))


def serialize_config(config: AnyConfig) -> str:
    return json.dumps(config.model_dump(mode="json", by_alias=True, exclude_none=True), indent=2, sort_keys=True)


def config_hash(config: AnyConfig) -> str:
    canonical = json.dumps(config.model_dump(mode="json", by_alias=True, exclude_none=True), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def list_presets() -> List[str]:
    files = resources.files(PRESET_PACKAGE).iterdir()
    return sorted(f.name[: -len(".json")] for f in files if f.name.endswith(".json"))


def load_preset(name: str) -> AnyConfig:
    resource = resources.files(PRESET_PACKAGE) / f"{name}.json"
    if not resource.is_file():
        raise ConfigurationError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return parse_config(resource.read_text(encoding="utf-8"), f"preset:{name}")


def build_warping(cfg: WarpingConfig) -> WarpingFunction:
    if cfg.kind == "euclidean":
        return EuclideanWarping()
    if cfg.kind == "hyperbolic":
        return HyperbolicWarping(curvature=float(cfg.curvature or 0.0))
    if cfg.kind == "power_law":
        return PowerLawWarping(lam=float(cfg.lam or 0.0))
    samples = cfg.samples or []
    return SampledWarping(radii=tuple(r for r, _ in samples), values=tuple(v for _, v in samples))


def build_drift(cfg: DriftConfig) -> RadialDrift:
    if cfg.family == "zero":
        return ZeroDrift()
    if cfg.family == "power_affine":
        return PowerAffineDrift(
            amplitude=float(cfg.amplitude or 0.0),
            power=float(cfg.exponent or 0.0),
            offset=1.0 if cfg.offset is None else cfg.offset,
        )
    if cfg.family == "oscillating":
        return OscillatingDrift(amplitude=float(cfg.amplitude or 0.0), frequency=cfg.frequency or 1.0)
    samples = cfg.samples or []
    return SampledDrift(radii=tuple(r for r, _ in samples), values=tuple(v for _, v in samples))


def build_potential(cfg: PotentialConfig) -> Potential:
    if cfg.kind == "constant":
        return ConstantPotential(cfg.c0)
    return PolynomialPotential(tuple(cfg.coefficients or ()), cfg.c0)


def build_weight(cfg: WeightConfig) -> Weight:
    if cfg.family == "exponential":
        return ExponentialWeight(float(cfg.beta or 0.0))
    if cfg.family == "stretched_exponential":
        return StretchedExponentialWeight(float(cfg.beta or 0.0), float(cfg.theta or 0.0))
    return PolynomialWeight(float(cfg.tau or 0.0))


def to_scenario(cfg: ScenarioConfig, nodes: Optional[int] = None, name: str = "scenario") -> Scenario:
    """Domain scenario for a parsed document; domain-level violations become ConfigurationError."""
    try:
        return Scenario(
            name=cfg.name or name,
            manifold=ModelManifold(cfg.dimension, build_warping(cfg.warping)),
            drift=build_drift(cfg.drift),
            potential=build_potential(cfg.potential),
            weight=build_weight(cfg.weight),
            p=cfg.p,
            r_star=cfg.experiment.r_star,
            ladder=tuple(cfg.experiment.ladder),
            gammas=tuple(cfg.experiment.gammas),
            regime=ExpectedRegime(cfg.experiment.regime),
            radius=cfg.solver.radius,
            nodes=nodes if nodes is not None else cfg.solver.nodes,
            grading=cfg.solver.grading,
            upwind=cfg.solver.upwind,
        )
    except ConfigurationError:
        raise
    except LabError as e:
        raise ConfigurationError(f"{cfg.name or name}: {e}") from e


def to_model_dichotomy(cfg: DichotomyConfig, nodes: Optional[int] = None) -> ModelDichotomy:
    barrier = cfg.supersolution
    return ModelDichotomy(
        uniqueness=to_scenario(cfg.uniqueness, nodes, name="uniqueness"),
        multiplicity=to_scenario(cfg.multiplicity, nodes, name="multiplicity"),
        barrier=BarrierSpec(constant=barrier.constant, beta=barrier.beta, domain=barrier.domain),
    )


def describe(config: AnyConfig) -> Dict[str, Any]:
    return config.model_dump(mode="json", by_alias=True, exclude_none=True)
