from typing import Any, NamedTuple

import numpy as np
import structlog

from thermovisco.grid import Grid
from thermovisco.integrator import FieldState
from thermovisco.materials import admissibility_check, classify
from thermovisco.runner.config import ScenarioConfig
from thermovisco.runner.container import ContainerSimulation
from thermovisco.runner.errors import ScenarioValidationError

__all__ = ["ValidationReport", "validate_scenario", "initial_state"]

log = structlog.stdlib.get_logger("validation")


class ValidationReport(NamedTuple):
    scenario: str
    classification: dict[str, Any]
    admissibility: dict[str, Any]
    tensors: dict[str, float]
    poincare_korn_constant: float
    forcing: dict[str, float]
    passed: bool
    failures: list[str]

    def as_dict(self) -> dict[str, Any]:
        return self._asdict()


def validate_scenario(
    config: ScenarioConfig, container: ContainerSimulation, raise_on_failure: bool = True
) -> ValidationReport:
    """Admissibility of the initial data, nonnegative heat sources and tensor constants."""
    grid: Grid = container.grid()
    tensors = container.tensors()
    model = container.material()
    forcing = container.forcing()

    _, _, theta0 = config.initial.build(grid)
    admissibility = admissibility_check(
        theta0, model, grid.weights, theta_floor=config.material.theta_floor
    )

    failures = list(admissibility.failures())
    try:
        forcing.validate(grid, config.final_time)
    except ValueError as ex:
        failures.append(str(ex))

    norms = forcing.norms(grid, config.final_time)
    report = ValidationReport(
        scenario=config.name,
        classification=classify(model).as_dict(),
        admissibility=admissibility.as_dict(),
        tensors={
            "k_viscosity": float(tensors.k_viscosity),
            "k_elasticity": float(tensors.k_elasticity),
            "coupling_norm": float(tensors.coupling_norm),
        },
        poincare_korn_constant=container.operators().poincare_korn_constant(),
        forcing={"f_l2_time": norms.f_l2_time, "g_l1_time": norms.g_l1_time},
        passed=not failures,
        failures=failures,
    )

    if failures:
        log.warning("scenario failed validation", scenario=config.name, failures=failures)
        if raise_on_failure:
            raise ScenarioValidationError("scenario is not admissible", report.as_dict())

    return report


def initial_state(config: ScenarioConfig, grid: Grid) -> FieldState:
    """Initial fields with the temperature lifted to theta_floor where it falls below."""
    u0, v0, theta0 = config.initial.build(grid)
    floor = config.material.theta_floor

    lifted = theta0 < floor
    if np.any(lifted):
        log.info("lifting initial temperature to the floor", cells=int(np.count_nonzero(lifted)), floor=floor)
        theta0 = np.maximum(theta0, floor)

    return FieldState(u0, v0, theta0, 0.0).validate(grid)
