from pathlib import Path
from typing import Optional

import structlog
import yaml

from thermovisco.runner.config import ScenarioConfig

__all__ = ["ScenarioRegistry", "load_scenario"]

log = structlog.stdlib.get_logger("scenarios")


class ScenarioRegistry:
    def __init__(self, scenarios: dict[str, ScenarioConfig]):
        self.scenarios = scenarios

    def __contains__(self, name: str) -> bool:
        return name in self.scenarios

    def names(self) -> list[str]:
        return sorted(self.scenarios)

    def get(self, name: str) -> ScenarioConfig:
        try:
            return self.scenarios[name].model_copy(deep=True)
        except KeyError:
            raise KeyError(
                f"unknown scenario {name!r}, built-in scenarios are {', '.join(self.names())}"
            ) from None

    @classmethod
    def from_local_yaml(cls, definitions_dir: Optional[Path] = None) -> "ScenarioRegistry":
        """Load every definitions/*.yml; the file stem is the scenario name."""
        definitions_dir = definitions_dir or Path(__file__).parent / "definitions"
        scenarios = {}

        for path in sorted(definitions_dir.glob("*.yml")):
            with open(path, "r") as fp:
                definition = yaml.safe_load(fp)
            definition.setdefault("name", path.stem)
            scenarios[path.stem] = ScenarioConfig(**definition)

        log.info("Initializing scenario registry from local yaml", scenarios=sorted(scenarios))

        return cls(scenarios)


def load_scenario(name_or_path: str, registry: Optional[ScenarioRegistry] = None) -> ScenarioConfig:
    """A scenario file path, or the name of a built-in scenario."""
    path = Path(name_or_path)
    if path.suffix in (".yml", ".yaml") or path.is_file():
        config = ScenarioConfig.from_yaml(path)
        log.info("Loaded scenario file", path=str(path), scenario=config.name)
        return config

    registry = registry or ScenarioRegistry.from_local_yaml()
    return registry.get(name_or_path)
