"""
Shared fixtures for the drift lab test suite
"""

import sys
from pathlib import Path

import pytest

# Add parent directory to path to import the lab packages
sys.path.insert(0, str(Path(__file__).parent.parent))

from driftlab.config import load_preset, to_scenario
from driftlab.fields import ConstantPotential, PowerAffineDrift, ZeroDrift
from driftlab.geometry import EuclideanWarping, HyperbolicWarping, ModelManifold, PowerLawWarping
from tools.common import clear_cache


@pytest.fixture(autouse=True)
def lab_env(monkeypatch, tmp_path):
    """Keep every test on default settings and away from the working directory"""
    for name in ("LAB_LOG_LEVEL", "LAB_DEFAULT_NODES", "LAB_QUAD_TOL", "LAB_WORKERS", "LAB_CACHE_TTL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("LAB_OUTPUT_DIR", str(tmp_path / "lab-output"))
    clear_cache()
    yield
    clear_cache()


@pytest.fixture
def euclidean3():
    return ModelManifold(3, EuclideanWarping())


@pytest.fixture
def euclidean2():
    return ModelManifold(2, EuclideanWarping())


@pytest.fixture
def hyperbolic2():
    return ModelManifold(2, HyperbolicWarping(curvature=1.0))


@pytest.fixture
def power_law3():
    return ModelManifold(3, PowerLawWarping(lam=2.0))


@pytest.fixture
def zero_drift():
    return ZeroDrift()


@pytest.fixture
def quadratic_drift():
    """b_r = 2 (1 + r)^2 r / (1 + r), asymptotically 2 r^2"""
    return PowerAffineDrift(amplitude=2.0, power=2.0)


@pytest.fixture
def unit_potential():
    return ConstantPotential(1.0)


@pytest.fixture
def scenario_u():
    return to_scenario(load_preset("scenario-u"))


@pytest.fixture
def scenario_nu():
    return to_scenario(load_preset("scenario-nu"))
