from dependency_injector import containers, providers

from thermovisco.runner import ScenarioRegistry

__all__ = [
    "ContainerApplication",
]


class ContainerApplication(containers.DeclarativeContainer):
    config = providers.Configuration(strict=True)

    scenarios = providers.Singleton(ScenarioRegistry.from_local_yaml)
