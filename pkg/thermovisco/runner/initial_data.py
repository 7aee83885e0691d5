from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from thermovisco.grid import Grid, ScalarField, VectorField

__all__ = [
    "UniformTemperature",
    "HotSpotTemperature",
    "ZerosPatchTemperature",
    "RestField",
    "SineModeField",
    "TypeTemperatureData",
    "TypeVectorData",
    "InitialDataConfig",
]


class _Base(BaseModel):
    model_config = ConfigDict(extra="forbid")


class UniformTemperature(_Base):
    kind: Literal["uniform"] = "uniform"
    value: float = 1.0

    def build(self, grid: Grid) -> ScalarField:
        return grid.scalar(self.value)


class HotSpotTemperature(_Base):
    """base + amplitude * exp(-|x - center|^2 / (2 width^2))"""

    kind: Literal["hot_spot"]
    base: float = 1.0
    amplitude: float = 1.0
    center: tuple[float, float] = (0.5, 0.5)
    width: float = Field(default=0.1, gt=0)

    def build(self, grid: Grid) -> ScalarField:
        r2 = (grid.xx - self.center[0]) ** 2 + (grid.yy - self.center[1]) ** 2
        return self.base + self.amplitude * np.exp(-0.5 * r2 / self.width**2)


class ZerosPatchTemperature(_Base):
    """Uniform temperature with the nodes of a rectangle set to zero."""

    kind: Literal["zeros_patch"]
    value: float = 1.0
    x_range: tuple[float, float] = (0.4, 0.6)
    y_range: tuple[float, float] = (0.4, 0.6)

    def build(self, grid: Grid) -> ScalarField:
        theta = grid.scalar(self.value)
        patch = (
            (grid.xx >= self.x_range[0])
            & (grid.xx <= self.x_range[1])
            & (grid.yy >= self.y_range[0])
            & (grid.yy <= self.y_range[1])
        )
        theta[patch] = 0.0
        return theta


class RestField(_Base):
    kind: Literal["rest"] = "rest"

    def build(self, grid: Grid) -> VectorField:
        return grid.vector()


class SineModeField(_Base):
    """amplitude * sin(k pi x / lx) sin(l pi y / ly) * direction; vanishes on the boundary."""

    kind: Literal["sine_mode"]
    amplitude: float = 0.5
    modes: tuple[int, int] = (1, 1)
    direction: tuple[float, float] = (1.0, 0.0)

    @model_validator(mode="after")
    def positive_modes(self) -> "SineModeField":
        if min(self.modes) < 1:
            raise ValueError("sine mode numbers must be at least 1")
        return self

    def build(self, grid: Grid) -> VectorField:
        shape = np.sin(self.modes[0] * np.pi * grid.xx / grid.lx) * np.sin(
            self.modes[1] * np.pi * grid.yy / grid.ly
        )
        shape = shape * grid.interior
        return self.amplitude * shape[..., None] * np.asarray(self.direction, dtype=np.float64)


TypeTemperatureData = Annotated[
    UniformTemperature | HotSpotTemperature | ZerosPatchTemperature,
    Field(discriminator="kind"),
]
TypeVectorData = Annotated[RestField | SineModeField, Field(discriminator="kind")]


class InitialDataConfig(_Base):
    theta: TypeTemperatureData = UniformTemperature()
    velocity: TypeVectorData = RestField()
    displacement: TypeVectorData = RestField()

    def build(self, grid: Grid) -> tuple[VectorField, VectorField, ScalarField]:
        return self.displacement.build(grid), self.velocity.build(grid), self.theta.build(grid)
