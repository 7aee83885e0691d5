import hashlib
import json
from pathlib import Path
from typing import Annotated, Any, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from thermovisco.diagnostics import DiagnosticsTolerances
from thermovisco.grid import GridConfig
from thermovisco.integrator import SolverConfig, TypeForcingConfig, ZeroForcingConfig
from thermovisco.materials import MaterialConfig
from thermovisco.runner.initial_data import InitialDataConfig
from thermovisco.tensors import TensorsConfig

__all__ = ["OutputPlan", "ScenarioConfig", "set_path"]


class OutputPlan(BaseModel):
    model_config = ConfigDict(extra="forbid")

    # write a diagnostics row every `cadence` accepted steps
    cadence: int = Field(default=1, ge=1)
    snapshot_times: list[float] = []
    checkpoint_times: list[float] = []
    directory: Optional[str] = None
    # window metrics are reported for windows starting at these times
    window_starts: list[float] = [1.0]


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "custom"
    description: str = ""
    grid: Annotated[GridConfig, Field(default_factory=GridConfig)] = GridConfig()
    tensors: TensorsConfig
    material: Annotated[MaterialConfig, Field(default_factory=MaterialConfig)] = MaterialConfig()
    forcing: TypeForcingConfig = ZeroForcingConfig()
    initial: Annotated[InitialDataConfig, Field(default_factory=InitialDataConfig)] = (
        InitialDataConfig()
    )
    solver: Annotated[SolverConfig, Field(default_factory=SolverConfig)] = SolverConfig()
    final_time: float = Field(default=1.0, gt=0)
    output: Annotated[OutputPlan, Field(default_factory=OutputPlan)] = OutputPlan()
    tolerances: Annotated[
        DiagnosticsTolerances, Field(default_factory=DiagnosticsTolerances)
    ] = DiagnosticsTolerances()
    abort_on_violation: bool = True

    @model_validator(mode="after")
    def output_times_in_range(self) -> "ScenarioConfig":
        for name in ("snapshot_times", "checkpoint_times"):
            times = getattr(self.output, name)
            if any(t < 0 or t > self.final_time for t in times):
                raise ValueError(f"output.{name} must lie in [0, final_time]")
        return self

    @classmethod
    def from_yaml(cls, path: Path) -> "ScenarioConfig":
        with open(path, "r") as fp:
            return cls(**yaml.safe_load(fp))

    def canonical_json(self) -> str:
        # output.directory only says where results go
        dump = self.model_dump(mode="json", by_alias=True)
        dump["output"].pop("directory", None)
        return json.dumps(dump, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def with_value(self, path: str, value: Any) -> "ScenarioConfig":
        """Copy with the dotted `path` (e.g. solver.eps_reg) set to `value`, revalidated."""
        dump = self.model_dump(mode="json", by_alias=True)
        set_path(dump, path, value)
        return ScenarioConfig(**dump)


def set_path(tree: dict, path: str, value: Any):
    keys = path.split(".")
    node = tree
    for key in keys[:-1]:
        if not isinstance(node, dict) or key not in node:
            raise KeyError(f"unknown scenario path {path!r}")
        node = node[key]
    if not isinstance(node, dict):
        raise KeyError(f"unknown scenario path {path!r}")
    node[keys[-1]] = value
