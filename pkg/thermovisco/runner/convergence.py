from enum import StrEnum
from typing import Callable, NamedTuple, Optional

import numpy as np
import numpy.typing as npt
import structlog
import sympy
from dependency_injector import providers
from pydantic import BaseModel, ConfigDict, Field
from pytools.convergence import EOCRecorder

from thermovisco.grid import Grid
from thermovisco.integrator import FieldState, ManufacturedForcing
from thermovisco.materials import (
    ConstantHeatCapacity,
    DebyeLikeHeatCapacity,
    HeatCapacityModel,
    PowerGrowthHeatCapacity,
    SlowDecayHeatCapacity,
)
from thermovisco.runner.config import ScenarioConfig
from thermovisco.runner.container import ContainerSimulation
from thermovisco.tensors import ElasticityTensors

__all__ = [
    "KindConvergence",
    "ConvergenceConfig",
    "ConvergenceRow",
    "ConvergenceTable",
    "ManufacturedSolution",
    "convergence_study",
]

log = structlog.stdlib.get_logger("convergence")

# errors below this are treated as exact and carry no order
_EXACT = 1e-13
_OFFSET_RATES = [0.0] + [0.01 * 2.0**k for k in range(40)]

t_, x_, y_, c_ = sympy.symbols("t x y c", real=True)


class KindConvergence(StrEnum):
    SPACE = "space"
    TIME = "time"


class ConvergenceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: KindConvergence = KindConvergence.SPACE
    levels: int = Field(default=3, ge=3)
    final_time: float = Field(default=0.5, gt=0)
    # cells per direction on the coarsest level; the time study runs on fine_cells
    cells: int = Field(default=8, ge=4)
    fine_cells: int = Field(default=32, ge=4)
    dt: float = Field(default=0.01, gt=0)
    amplitude: float = 0.5
    theta_amplitude: float = 1.0
    theta_base: float = Field(default=1.0, gt=0)


class ConvergenceRow(NamedTuple):
    level: int
    cells: int
    h: float
    dt: float
    error_u: float
    error_v: float
    error_theta: float


class ConvergenceTable(NamedTuple):
    kind: KindConvergence
    rows: list[ConvergenceRow]
    order_u: Optional[float]
    order_theta: Optional[float]
    monotone: bool

    def as_dict(self) -> dict:
        return {
            "kind": str(self.kind),
            "rows": [row._asdict() for row in self.rows],
            "order_u": self.order_u,
            "order_theta": self.order_theta,
            "monotone": self.monotone,
        }


def _kappa_expression(model: HeatCapacityModel, xi):
    if isinstance(model, ConstantHeatCapacity):
        return sympy.Float(model.k0)
    if isinstance(model, PowerGrowthHeatCapacity):
        return model.k0 * (1 + xi) ** model.omega
    if isinstance(model, DebyeLikeHeatCapacity):
        return model.k0 * xi**3 / (xi**3 + model.xi_d**3)
    if isinstance(model, SlowDecayHeatCapacity):
        return model.k0 / sympy.log(sympy.E + xi) ** model.alpha
    raise ValueError(f"no closed form heat capacity for {type(model).__name__}")


def _sym_grad(w):
    exy = (sympy.diff(w[0], y_) + sympy.diff(w[1], x_)) / 2
    return [[sympy.diff(w[0], x_), exy], [exy, sympy.diff(w[1], y_)]]


def _contract(tensor: npt.NDArray, e):
    return [
        [sum(float(tensor[i, j, k, l]) * e[k][l] for k in range(2) for l in range(2)) for j in range(2)]
        for i in range(2)
    ]


def _frobenius(a, b):
    return sum(a[i][j] * b[i][j] for i in range(2) for j in range(2))


class ManufacturedSolution:
    """u* = A (1 - e^-t) sin(pi x/lx) sin(pi y/ly) (cos t, sin t),
    theta* = theta_b + c t + (B/4) cos(pi x/lx) cos t.

    u* vanishes on the boundary and theta* has zero normal derivative; the residuals are
    injected as f and g, with the offset rate c chosen so that g >= 0.
    """

    def __init__(
        self,
        tensors: ElasticityTensors,
        model: HeatCapacityModel,
        diffusivity: float,
        lx: float,
        ly: float,
        final_time: float,
        amplitude: float = 0.5,
        theta_amplitude: float = 1.0,
        theta_base: float = 1.0,
    ):
        pi = sympy.pi
        shape = sympy.sin(pi * x_ / lx) * sympy.sin(pi * y_ / ly)
        ramp = 1 - sympy.exp(-t_)

        u = [amplitude * ramp * shape * sympy.cos(t_), amplitude * ramp * shape * sympy.sin(t_)]
        v = [sympy.diff(ui, t_) for ui in u]
        theta = theta_base + c_ * t_ + theta_amplitude / 4 * sympy.cos(pi * x_ / lx) * sympy.cos(t_)

        e_u = _sym_grad(u)
        e_v = _sym_grad(v)
        coupling = tensors.coupling.to_array()
        stress_v = _contract(tensors.viscosity, e_v)
        stress = [
            [stress_v[i][j] + _contract(tensors.elasticity, e_u)[i][j] - theta * float(coupling[i, j]) for j in range(2)]
            for i in range(2)
        ]
        divergence = [sympy.diff(stress[i][0], x_) + sympy.diff(stress[i][1], y_) for i in range(2)]
        f = [sympy.diff(v[i], t_) - divergence[i] for i in range(2)]

        dissipation = _frobenius(stress_v, e_v)
        exchange = sum(float(coupling[i, j]) * e_v[i][j] for i in range(2) for j in range(2))
        g = (
            _kappa_expression(model, theta) * sympy.diff(theta, t_)
            - diffusivity * (sympy.diff(theta, x_, 2) + sympy.diff(theta, y_, 2))
            - dissipation
            + theta * exchange
        )

        args = (t_, x_, y_, c_)
        self._u = [sympy.lambdify(args, ui, "numpy") for ui in u]
        self._v = [sympy.lambdify(args, vi, "numpy") for vi in v]
        self._theta = sympy.lambdify(args, theta, "numpy")
        self._f = [sympy.lambdify(args, fi, "numpy") for fi in f]
        self._g = sympy.lambdify(args, g, "numpy")

        self.offset_rate = self._choose_offset_rate(lx, ly, final_time)

    def _choose_offset_rate(self, lx: float, ly: float, final_time: float) -> float:
        ts, xs, ys = np.meshgrid(
            np.linspace(0.0, final_time, 21), np.linspace(0.0, lx, 17), np.linspace(0.0, ly, 17), indexing="ij"
        )
        for rate in _OFFSET_RATES:
            if np.min(_evaluate(self._g, ts, xs, ys, rate)) >= 0:
                return rate
        raise ValueError("no offset rate makes the manufactured heat source nonnegative")

    def _vector(self, components, t: float, grid: Grid) -> npt.NDArray[np.float64]:
        return np.stack([_evaluate(fn, t, grid.xx, grid.yy, self.offset_rate) for fn in components], axis=-1)

    def u(self, t: float, grid: Grid):
        return self._vector(self._u, t, grid) * grid.interior[..., None]

    def v(self, t: float, grid: Grid):
        return self._vector(self._v, t, grid) * grid.interior[..., None]

    def theta(self, t: float, grid: Grid):
        return _evaluate(self._theta, t, grid.xx, grid.yy, self.offset_rate)

    def state(self, t: float, grid: Grid) -> FieldState:
        return FieldState(self.u(t, grid), self.v(t, grid), self.theta(t, grid), t)

    def forcing(self) -> ManufacturedForcing:
        rate = self.offset_rate
        return ManufacturedForcing(
            f_source=lambda t, xx, yy: np.stack([_evaluate(fn, t, xx, yy, rate) for fn in self._f], axis=-1),
            g_source=lambda t, xx, yy: _evaluate(self._g, t, xx, yy, rate),
        )


def _evaluate(fn: Callable, t, xx, yy, rate) -> npt.NDArray[np.float64]:
    values = np.asarray(fn(t, xx, yy, rate), dtype=np.float64)
    return np.broadcast_to(values, np.broadcast(np.asarray(t), xx, yy).shape).copy()


def _level_config(base: ScenarioConfig, cells: int, dt: float, final_time: float) -> ScenarioConfig:
    dump = base.model_dump(mode="json", by_alias=True)
    dump["grid"].update(nx=cells + 1, ny=cells + 1)
    dump["solver"].update(
        dt0=dt, dt_max=dt, dt_min=min(dump["solver"]["dt_min"], dt), dt_growth=1.0, eps_reg=0.0
    )
    dump["forcing"] = {"kind": "zero"}
    dump["final_time"] = final_time
    dump["output"] = {}
    return ScenarioConfig(**dump)


def _solve(base: ScenarioConfig, study: ConvergenceConfig, cells: int, dt: float) -> tuple[Grid, FieldState, ManufacturedSolution]:
    config = _level_config(base, cells, dt, study.final_time)
    container = ContainerSimulation(scenario=config)
    grid = container.grid()

    solution = ManufacturedSolution(
        container.tensors(),
        container.material_eps(),
        config.material.diffusivity,
        grid.lx,
        grid.ly,
        study.final_time,
        amplitude=study.amplitude,
        theta_amplitude=study.theta_amplitude,
        theta_base=study.theta_base,
    )
    container.forcing.override(providers.Object(solution.forcing()))
    integrator = container.integrator()

    state = solution.state(0.0, grid)
    tol = 1e-12 * max(1.0, study.final_time)
    while state.t < study.final_time - tol:
        state, _ = integrator.step(state, max_dt=study.final_time - state.t)

    return grid, state._replace(t=study.final_time), solution


def _l2(grid: Grid, field: npt.NDArray) -> float:
    squared = field**2 if field.ndim == 2 else np.sum(field**2, axis=-1)
    return float(np.sqrt(grid.integrate(squared)))


def _order(steps: list[float], errors: list[float]) -> Optional[float]:
    """Observed order over the last two levels."""
    if len(errors) < 2 or max(errors[-2:]) < _EXACT:
        return None

    recorder = EOCRecorder()
    for step, error in zip(steps[-2:], errors[-2:]):
        recorder.add_data_point(step, error)
    return float(recorder.order_estimate())


def _monotone(errors: list[float]) -> bool:
    return all(b <= a or a < _EXACT for a, b in zip(errors, errors[1:]))


def convergence_study(base: ScenarioConfig, study: Optional[ConvergenceConfig] = None) -> ConvergenceTable:
    """Manufactured-solution errors per level and the observed orders.

    The space study halves h with dt proportional to h^2; the time study halves dt on a
    fixed grid and measures differences between successive levels.
    """
    study = study or ConvergenceConfig()
    rows = []

    if study.kind == KindConvergence.SPACE:
        for level in range(study.levels):
            cells = study.cells * 2**level
            dt = study.dt / 4**level
            grid, state, solution = _solve(base, study, cells, dt)
            exact = solution.state(study.final_time, grid)
            row = ConvergenceRow(
                level=level,
                cells=cells,
                h=grid.hx,
                dt=dt,
                error_u=_l2(grid, state.u - exact.u),
                error_v=_l2(grid, state.v - exact.v),
                error_theta=_l2(grid, state.theta - exact.theta),
            )
            log.info("convergence level done", **row._asdict())
            rows.append(row)
        steps = [row.h for row in rows]
    else:
        solutions = []
        for level in range(study.levels):
            dt = study.dt / 2**level
            grid, state, _ = _solve(base, study, study.fine_cells, dt)
            solutions.append((dt, state))
        for level, ((dt, coarse), (_, fine)) in enumerate(zip(solutions, solutions[1:])):
            row = ConvergenceRow(
                level=level,
                cells=study.fine_cells,
                h=grid.hx,
                dt=dt,
                error_u=_l2(grid, coarse.u - fine.u),
                error_v=_l2(grid, coarse.v - fine.v),
                error_theta=_l2(grid, coarse.theta - fine.theta),
            )
            log.info("convergence level done", **row._asdict())
            rows.append(row)
        steps = [row.dt for row in rows]

    errors_u = [row.error_u for row in rows]
    errors_theta = [row.error_theta for row in rows]
    monotone = _monotone(errors_u) and _monotone(errors_theta)
    if not monotone:
        log.warning("errors are not monotone across levels", errors_u=errors_u, errors_theta=errors_theta)

    return ConvergenceTable(
        kind=study.kind,
        rows=rows,
        order_u=_order(steps, errors_u),
        order_theta=_order(steps, errors_theta),
        monotone=monotone,
    )
