from pathlib import Path

import numpy as np
import pytest

from thermovisco.config import Config
from thermovisco.container import ContainerApplication
from thermovisco.grid import Grid, GridOperators
from thermovisco.integrator import FieldState, SolverConfig, TimeIntegrator, ZeroForcing
from thermovisco.materials import ConstantHeatCapacity
from thermovisco.runner import ScenarioConfig, ScenarioRegistry
from thermovisco.tensors import ElasticityTensors, SymMatrix2, isotropic_tensor


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow acceptance tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return

    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def definitions_dir() -> Path:
    return Path(__file__).parent / "thermovisco" / "runner" / "definitions"


@pytest.fixture
def grid():
    return Grid(12, 12)


@pytest.fixture
def operators(grid: Grid):
    return GridOperators(grid)


@pytest.fixture
def coupling():
    return SymMatrix2.identity(0.5)


@pytest.fixture
def tensors(coupling: SymMatrix2):
    return ElasticityTensors.build(isotropic_tensor(1.0, 1.0), isotropic_tensor(1.0, 1.0), coupling)


@pytest.fixture
def heat_capacity():
    return ConstantHeatCapacity(1.0)


@pytest.fixture
def forcing():
    return ZeroForcing()


@pytest.fixture
def solver_config():
    return SolverConfig(dt0=0.01, dt_max=0.05)


@pytest.fixture
def integrator(operators, tensors, heat_capacity, forcing, solver_config):
    return TimeIntegrator(operators, tensors, heat_capacity, 1.0, forcing, solver_config)


@pytest.fixture
def moving_state(grid: Grid):
    """Sine velocity mode and a Gaussian hot spot."""
    mode = np.sin(np.pi * grid.xx) * np.sin(np.pi * grid.yy)
    v = np.stack([0.5 * mode, np.zeros(grid.shape)], axis=-1)
    v[grid.boundary] = 0.0
    theta = 1.0 + np.exp(-((grid.xx - 0.5) ** 2 + (grid.yy - 0.5) ** 2) / (2 * 0.1**2))
    return FieldState(grid.vector(), v, theta, 0.0)


@pytest.fixture
def soft_tensors(coupling: SymMatrix2):
    """Viscous and elastic rates well below 1/dt, for time refinement studies."""
    return ElasticityTensors.build(isotropic_tensor(0.1, 0.1), isotropic_tensor(0.2, 0.2), coupling)


@pytest.fixture
def smooth_state(grid: Grid):
    mode = np.sin(np.pi * grid.xx) * np.sin(np.pi * grid.yy)
    v = np.stack([0.5 * mode, np.zeros(grid.shape)], axis=-1)
    theta = 1.0 + 0.3 * np.cos(np.pi * grid.xx) * np.cos(np.pi * grid.yy)
    return FieldState(grid.vector(), v, theta, 0.0)


@pytest.fixture
def registry():
    return ScenarioRegistry.from_local_yaml()


@pytest.fixture
def trivial_scenario(registry: ScenarioRegistry) -> ScenarioConfig:
    return registry.get("trivial")


@pytest.fixture
def mock_config():
    yield Config(_env_file=None)  # type: ignore[call-arg]


@pytest.fixture
def mock_container(mock_config: Config):
    container_application = ContainerApplication()
    container_application.config.from_dict(mock_config.model_dump())

    yield container_application
