from abc import ABC, abstractmethod
from typing import Annotated, Callable, Literal, NamedTuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import trapezoid

from thermovisco.grid import Grid, ScalarField, VectorField

__all__ = [
    "Forcing",
    "ForcingNorms",
    "ZeroForcing",
    "PulseForcing",
    "ManufacturedForcing",
    "ZeroForcingConfig",
    "PulseForcingConfig",
    "TypeForcingConfig",
]

FieldSource = Callable[[float, npt.NDArray, npt.NDArray], npt.NDArray]


class ForcingNorms(NamedTuple):
    # int_0^T ||f||_{L2} dt and int_0^T ||g||_{L1} dt
    f_l2_time: float
    g_l1_time: float


class Forcing(ABC):
    is_zero: bool = False

    @abstractmethod
    def f(self, t: float, grid: Grid) -> VectorField:
        pass

    @abstractmethod
    def g(self, t: float, grid: Grid) -> ScalarField:
        pass

    def validate(self, grid: Grid, final_time: float, samples: int = 51):
        for t in np.linspace(0.0, final_time, samples):
            g = self.g(float(t), grid)
            if np.min(g) < 0:
                raise ValueError(f"heat source g is negative at t={t:.6g}: min {np.min(g)!r}")

    def norms(self, grid: Grid, final_time: float, samples: int = 1001) -> ForcingNorms:
        if self.is_zero:
            return ForcingNorms(0.0, 0.0)

        times = np.linspace(0.0, final_time, samples)
        f_norms = [np.sqrt(grid.integrate(np.sum(self.f(float(t), grid) ** 2, axis=-1))) for t in times]
        g_norms = [grid.integrate(np.abs(self.g(float(t), grid))) for t in times]
        return ForcingNorms(float(trapezoid(f_norms, times)), float(trapezoid(g_norms, times)))


class ZeroForcing(Forcing):
    is_zero = True

    def f(self, t, grid):
        return grid.vector()

    def g(self, t, grid):
        return grid.scalar()


class PulseForcing(Forcing):
    """Gaussian spatial profile switched on by a sin^2 envelope on [t_on, t_off]."""

    def __init__(
        self,
        f_amplitude: tuple[float, float],
        g_amplitude: float,
        center: tuple[float, float],
        width: float,
        t_on: float,
        t_off: float,
    ):
        self.f_amplitude = np.asarray(f_amplitude, dtype=np.float64)
        self.g_amplitude = g_amplitude
        self.center = center
        self.width = width
        self.t_on = t_on
        self.t_off = t_off

    def envelope(self, t: float) -> float:
        if not self.t_on <= t <= self.t_off:
            return 0.0
        return float(np.sin(np.pi * (t - self.t_on) / (self.t_off - self.t_on)) ** 2)

    def _profile(self, grid: Grid) -> ScalarField:
        r2 = (grid.xx - self.center[0]) ** 2 + (grid.yy - self.center[1]) ** 2
        return np.exp(-0.5 * r2 / self.width**2)

    def f(self, t, grid):
        profile = self.envelope(t) * self._profile(grid) * grid.interior
        return profile[..., None] * self.f_amplitude

    def g(self, t, grid):
        return self.g_amplitude * self.envelope(t) * self._profile(grid)


class ManufacturedForcing(Forcing):
    def __init__(self, f_source: FieldSource, g_source: FieldSource):
        self.f_source = f_source
        self.g_source = g_source

    def f(self, t, grid):
        values = np.asarray(self.f_source(t, grid.xx, grid.yy), dtype=np.float64)
        return values * grid.interior[..., None]

    def g(self, t, grid):
        return np.asarray(self.g_source(t, grid.xx, grid.yy), dtype=np.float64)


class ZeroForcingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["zero"] = "zero"

    def build(self) -> Forcing:
        return ZeroForcing()


class PulseForcingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["pulse"]
    f_amplitude: tuple[float, float] = (0.0, 0.0)
    g_amplitude: float = Field(default=0.0, ge=0)
    center: tuple[float, float] = (0.5, 0.5)
    width: float = Field(default=0.1, gt=0)
    t_on: float = Field(default=0.0, ge=0)
    t_off: float = 1.0

    @model_validator(mode="after")
    def window(self) -> "PulseForcingConfig":
        if self.t_off <= self.t_on:
            raise ValueError("pulse must switch off after it switches on")
        return self

    def build(self) -> Forcing:
        return PulseForcing(
            self.f_amplitude, self.g_amplitude, self.center, self.width, self.t_on, self.t_off
        )


TypeForcingConfig = Annotated[
    ZeroForcingConfig | PulseForcingConfig, Field(discriminator="kind")
]
