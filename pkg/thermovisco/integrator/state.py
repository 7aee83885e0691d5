from typing import NamedTuple

import numpy as np

from thermovisco.grid import Grid, ScalarField, VectorField

__all__ = ["FieldState"]


class FieldState(NamedTuple):
    u: VectorField
    v: VectorField
    theta: ScalarField
    t: float

    @classmethod
    def at_rest(cls, grid: Grid, theta: float = 1.0) -> "FieldState":
        return cls(grid.vector(), grid.vector(), grid.scalar(theta), 0.0)

    def validate(self, grid: Grid) -> "FieldState":
        grid.check_vector(self.u, "displacement", clamped=True)
        grid.check_vector(self.v, "velocity", clamped=True)
        grid.check_scalar(self.theta, "temperature")
        if not np.all(np.isfinite(self.theta)) or np.min(self.theta) <= 0:
            raise ValueError(f"temperature must be positive, min is {np.min(self.theta)!r}")
        return self

    def copy(self) -> "FieldState":
        return FieldState(self.u.copy(), self.v.copy(), self.theta.copy(), self.t)
