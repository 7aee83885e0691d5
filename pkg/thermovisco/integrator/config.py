from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

__all__ = ["KindHeatCapacityCoupling", "SolverConfig"]


class KindHeatCapacityCoupling(StrEnum):
    # kappa_eps evaluated at the start-of-step temperature
    LAGGED = "lagged"
    # (K_eps(theta_new) - K_eps(theta)) / (theta_new - theta), iterated with the coupling
    SECANT = "secant"


class SolverConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dt0: float = Field(default=1e-2, gt=0)
    dt_min: float = Field(default=1e-8, gt=0)
    dt_max: float = Field(default=5e-2, gt=0)
    dt_growth: float = Field(default=1.5, ge=1)
    eps_reg: float = Field(default=0.0, ge=0)
    m: int = Field(default=1, ge=1, le=3)
    theta_safety: float = Field(default=0.5, gt=0, lt=1)
    cg_rtol: float = Field(default=1e-12, gt=0)
    coupling_tol: float = Field(default=1e-10, gt=0)
    coupling_max_iterations: int = Field(default=50, ge=1)
    heat_capacity: KindHeatCapacityCoupling = KindHeatCapacityCoupling.LAGGED

    @model_validator(mode="after")
    def step_bounds(self) -> "SolverConfig":
        if not self.dt_min <= self.dt0 <= self.dt_max:
            raise ValueError(
                f"expected dt_min <= dt0 <= dt_max, got {self.dt_min}, {self.dt0}, {self.dt_max}"
            )
        return self
