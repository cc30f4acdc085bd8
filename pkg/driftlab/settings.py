"""
Runtime settings for the drift lab.

Values come from the environment (optionally seeded from a .env file) and are
read fresh on every call, so tests and long-running servers pick up changes.
"""

import logging
import os
from dataclasses import asdict, dataclass
from typing import Any, Dict

from dotenv import load_dotenv

from .errors import ConfigurationError

load_dotenv()

DEFAULT_NODES = 4096
DEFAULT_QUAD_TOL = 1e-10
DEFAULT_CACHE_TTL = 600  # 10 minutes


def _int_env(name: str, default: int, minimum: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}") from e
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return value


def _float_env(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        value = float(raw)
    except ValueError as e:
        raise ConfigurationError(f"{name} must be a number, got {raw!r}") from e
    if not value > 0:
        raise ConfigurationError(f"{name} must be positive, got {value}")
    return value


def get_log_level() -> str:
    """Get log level from environment."""
    return os.getenv("LAB_LOG_LEVEL", "INFO").upper()


def get_default_nodes() -> int:
    """Default node count for radial grids."""
    return _int_env("LAB_DEFAULT_NODES", DEFAULT_NODES, minimum=64)


def get_quad_tol() -> float:
    """Default relative quadrature tolerance."""
    return _float_env("LAB_QUAD_TOL", DEFAULT_QUAD_TOL)


def get_workers() -> int:
    """Number of parallel workers for independent solves."""
    return _int_env("LAB_WORKERS", 1, minimum=1)


def get_cache_ttl() -> int:
    """Seconds a cached server report stays valid."""
    return _int_env("LAB_CACHE_TTL", DEFAULT_CACHE_TTL, minimum=0)


def get_output_dir() -> str:
    return os.getenv("LAB_OUTPUT_DIR", "lab-output")


@dataclass(frozen=True)
class LabSettings:
    log_level: str
    default_nodes: int
    quad_tol: float
    workers: int
    cache_ttl: int
    output_dir: str
    host: str
    port: int

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def load_settings() -> LabSettings:
    """Snapshot of all settings."""
    return LabSettings(
        log_level=get_log_level(),
        default_nodes=get_default_nodes(),
        quad_tol=get_quad_tol(),
        workers=get_workers(),
        cache_ttl=get_cache_ttl(),
        output_dir=get_output_dir(),
        host=os.getenv("HOST", "0.0.0.0"),
        port=_int_env("PORT", 8000, minimum=1),
    )


def configure_logging() -> None:
    """Configure root logging from LAB_LOG_LEVEL."""
    level = get_log_level()
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigurationError(f"LAB_LOG_LEVEL must be a logging level name, got {level!r}")
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
