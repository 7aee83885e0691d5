from typing import Annotated

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from thermovisco.tensors.algebra import (
    ElasticityTensors,
    SymMatrix2,
    Tensor4,
    isotropic_tensor,
)

__all__ = [
    "IsotropicParams",
    "IsotropicTensorConfig",
    "TypeTensorConfig",
    "TensorsConfig",
]


class IsotropicParams(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    lambda_: float = Field(alias="lambda")
    mu: float


class IsotropicTensorConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    isotropic: IsotropicParams

    def build(self) -> Tensor4:
        return isotropic_tensor(self.isotropic.lambda_, self.isotropic.mu)


# Either {"isotropic": {"lambda": ..., "mu": ...}} or 16 entries, row-major over ijkl.
TypeTensorConfig = IsotropicTensorConfig | Annotated[
    list[float], Field(min_length=16, max_length=16)
]


def _build_tensor(config: TypeTensorConfig) -> Tensor4:
    if isinstance(config, IsotropicTensorConfig):
        return config.build()

    return np.asarray(config, dtype=np.float64).reshape(2, 2, 2, 2)


class TensorsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    viscosity: TypeTensorConfig
    elasticity: TypeTensorConfig
    coupling: list[list[float]] = [[0.0, 0.0], [0.0, 0.0]]

    @field_validator("coupling")
    @classmethod
    def coupling_symmetric(cls, value: list[list[float]]) -> list[list[float]]:
        if len(value) != 2 or any(len(row) != 2 for row in value):
            raise ValueError("coupling must be a 2x2 matrix")
        if value[0][1] != value[1][0]:
            raise ValueError("coupling must be symmetric")
        return value

    def build(self) -> ElasticityTensors:
        return ElasticityTensors.build(
            viscosity=_build_tensor(self.viscosity),
            elasticity=_build_tensor(self.elasticity),
            coupling=SymMatrix2.from_array(self.coupling),
        )
