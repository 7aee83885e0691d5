from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from thermovisco.materials.functionals import E4
from thermovisco.materials.heat_capacity import (
    ConstantHeatCapacity,
    DebyeLikeHeatCapacity,
    HeatCapacityModel,
    PowerGrowthHeatCapacity,
    SlowDecayHeatCapacity,
    TabulatedHeatCapacity,
    regularize_kappa,
)

__all__ = [
    "ConstantParams",
    "PowerGrowthParams",
    "DebyeLikeParams",
    "SlowDecayParams",
    "TabulatedParams",
    "TypeHeatCapacityParams",
    "MaterialConfig",
]


class _BaseParams(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConstantParams(_BaseParams):
    variant: Literal["constant"]
    k0: float = Field(default=1.0, gt=0)

    def build(self) -> HeatCapacityModel:
        return ConstantHeatCapacity(self.k0)


class PowerGrowthParams(_BaseParams):
    variant: Literal["power_growth"]
    k0: float = Field(default=1.0, gt=0)
    omega: float = Field(ge=0)

    def build(self) -> HeatCapacityModel:
        return PowerGrowthHeatCapacity(self.k0, self.omega)


class DebyeLikeParams(_BaseParams):
    variant: Literal["debye_like"]
    k0: float = Field(default=1.0, gt=0)
    xi_d: float = Field(default=1.0, gt=0)

    def build(self) -> HeatCapacityModel:
        return DebyeLikeHeatCapacity(self.k0, self.xi_d)


class SlowDecayParams(_BaseParams):
    variant: Literal["slow_decay"]
    k0: float = Field(default=1.0, gt=0)
    alpha: float = Field(gt=0, lt=1)

    def build(self) -> HeatCapacityModel:
        return SlowDecayHeatCapacity(self.k0, self.alpha)


class TabulatedParams(_BaseParams):
    variant: Literal["tabulated"]
    xi: list[float] = Field(min_length=2)
    kappa: list[float] = Field(min_length=2)

    @model_validator(mode="after")
    def same_length(self) -> "TabulatedParams":
        if len(self.xi) != len(self.kappa):
            raise ValueError("xi and kappa samples must have the same length")
        return self

    def build(self) -> HeatCapacityModel:
        return TabulatedHeatCapacity(self.xi, self.kappa)


TypeHeatCapacityParams = Annotated[
    ConstantParams | PowerGrowthParams | DebyeLikeParams | SlowDecayParams | TabulatedParams,
    Field(discriminator="variant"),
]


class MaterialConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kappa: TypeHeatCapacityParams = ConstantParams(variant="constant")
    diffusivity: float = Field(default=1.0, gt=0, alias="D")
    log_shift: float = Field(default=E4, alias="M")
    eps: float = Field(default=1e-3, gt=0, lt=1)
    theta_floor: float = Field(default=1e-6, gt=0)

    @model_validator(mode="after")
    def log_shift_range(self) -> "MaterialConfig":
        if self.log_shift < E4 * (1.0 - 1e-15):
            raise ValueError(f"M must be at least e^4, got {self.log_shift}")
        return self

    def build(self) -> HeatCapacityModel:
        return self.kappa.build()

    def build_regularized(self) -> HeatCapacityModel:
        return regularize_kappa(self.build(), self.eps)
