from dependency_injector import containers, providers

from thermovisco.diagnostics import DiagnosticsEvaluator
from thermovisco.grid import GridConfig, GridOperators
from thermovisco.instrumentators import SolverInstrumentator
from thermovisco.integrator import Forcing, TimeIntegrator
from thermovisco.materials import MaterialConfig
from thermovisco.runner.config import ScenarioConfig
from thermovisco.tensors import TensorsConfig

__all__ = ["ContainerSimulation"]


def _build_forcing(config) -> Forcing:
    return config.build()


class ContainerSimulation(containers.DeclarativeContainer):
    scenario = providers.Dependency(instance_of=ScenarioConfig)

    grid = providers.Singleton(GridConfig.build, scenario.provided.grid)
    operators = providers.Singleton(GridOperators, grid)
    tensors = providers.Singleton(TensorsConfig.build, scenario.provided.tensors)

    material = providers.Singleton(MaterialConfig.build, scenario.provided.material)
    material_eps = providers.Singleton(MaterialConfig.build_regularized, scenario.provided.material)

    forcing = providers.Singleton(_build_forcing, scenario.provided.forcing)

    instrumentator = providers.Singleton(SolverInstrumentator, scenario.provided.name)

    integrator = providers.Singleton(
        TimeIntegrator,
        operators=operators,
        tensors=tensors,
        model_eps=material_eps,
        diffusivity=scenario.provided.material.diffusivity,
        forcing=forcing,
        config=scenario.provided.solver,
        instrumentator=instrumentator,
    )

    diagnostics = providers.Singleton(
        DiagnosticsEvaluator,
        operators=operators,
        tensors=tensors,
        model=material_eps,
        diffusivity=scenario.provided.material.diffusivity,
        forcing=forcing,
        log_shift=scenario.provided.material.log_shift,
    )
