import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

__all__ = [
    "ScalarField",
    "VectorField",
    "MatrixField",
    "Grid",
    "GridConfig",
]

# Node-indexed arrays: scalars (nx, ny), vectors (nx, ny, 2),
# symmetric matrices (nx, ny, 3) stored as (a11, a22, a12).
ScalarField = npt.NDArray[np.float64]
VectorField = npt.NDArray[np.float64]
MatrixField = npt.NDArray[np.float64]


class Grid:
    """Uniform node grid on [0, lx] x [0, ly], nodes indexed (i, j) with x_i, y_j."""

    def __init__(self, nx: int, ny: int, lx: float = 1.0, ly: float = 1.0):
        if nx < 4 or ny < 4:
            raise ValueError(f"grid needs at least 4 nodes per direction, got {nx}x{ny}")
        if lx <= 0 or ly <= 0:
            raise ValueError(f"domain lengths must be positive, got {lx}x{ly}")

        self.nx = nx
        self.ny = ny
        self.lx = lx
        self.ly = ly
        self.hx = lx / (nx - 1)
        self.hy = ly / (ny - 1)

        self.x = np.linspace(0.0, lx, nx)
        self.y = np.linspace(0.0, ly, ny)
        self.xx, self.yy = np.meshgrid(self.x, self.y, indexing="ij")

        self.wx = _trapezoid_weights(nx, self.hx)
        self.wy = _trapezoid_weights(ny, self.hy)
        self.weights = np.outer(self.wx, self.wy)

        self.boundary = np.zeros((nx, ny), dtype=bool)
        self.boundary[[0, -1], :] = True
        self.boundary[:, [0, -1]] = True
        self.interior = ~self.boundary

    def __repr__(self):
        return f"Grid(nx={self.nx}, ny={self.ny}, lx={self.lx}, ly={self.ly})"

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def area(self) -> float:
        return self.lx * self.ly

    def integrate(self, f: npt.ArrayLike) -> float:
        return float(np.sum(self.weights * np.asarray(f, dtype=np.float64)))

    def scalar(self, value: float = 0.0) -> ScalarField:
        return np.full(self.shape, value, dtype=np.float64)

    def vector(self) -> VectorField:
        return np.zeros(self.shape + (2,), dtype=np.float64)

    def check_scalar(self, field: npt.NDArray, name: str = "field"):
        if field.shape != self.shape:
            raise ValueError(f"{name} has shape {field.shape}, grid expects {self.shape}")

    def check_vector(self, field: npt.NDArray, name: str = "field", clamped: bool = False):
        if field.shape != self.shape + (2,):
            raise ValueError(
                f"{name} has shape {field.shape}, grid expects {self.shape + (2,)}"
            )
        if clamped and np.any(field[self.boundary] != 0):
            raise ValueError(f"{name} must vanish on boundary nodes")


def _trapezoid_weights(n: int, h: float) -> npt.NDArray[np.float64]:
    weights = np.full(n, h)
    weights[[0, -1]] = 0.5 * h
    return weights


class GridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nx: int = Field(default=32, ge=4)
    ny: int = Field(default=32, ge=4)
    lx: float = Field(default=1.0, gt=0)
    ly: float = Field(default=1.0, gt=0)

    def build(self) -> Grid:
        return Grid(self.nx, self.ny, self.lx, self.ly)
