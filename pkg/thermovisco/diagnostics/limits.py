from typing import NamedTuple, Optional

import numpy as np
import numpy.typing as npt
import structlog
from scipy.integrate import trapezoid

from thermovisco.diagnostics.records import DiagnosticsRecord
from thermovisco.grid import Grid, ScalarField
from thermovisco.materials import DomainError, HeatCapacityModel, functionals_for

__all__ = [
    "CoverageError",
    "Trajectory",
    "ThetaInfinity",
    "WindowMetrics",
    "theta_infinity",
    "window_metrics",
]

log = structlog.stdlib.get_logger("diagnostics")

# Window ends may miss a record time by this much.
_TIME_SLACK = 1e-9


class CoverageError(ValueError):
    def __init__(self, message: str, start: float, end: float, covered: tuple[float, float]):
        super().__init__(message)
        self.message = message
        self.start = start
        self.end = end
        self.covered = covered

    def __str__(self):
        return (
            f"{self.message}: window [{self.start:.6g}, {self.end:.6g}], "
            f"records cover [{self.covered[0]:.6g}, {self.covered[1]:.6g}]"
        )


class Trajectory:
    """Records along a run, with the temperature field kept at each record for window integrals."""

    def __init__(self, grid: Grid):
        self.grid = grid
        self.records: list[DiagnosticsRecord] = []
        self.thetas: list[Optional[ScalarField]] = []
        # cumulative dt int f.v_new + dt int g up to each record
        self.work: list[float] = []

    def __len__(self):
        return len(self.records)

    def append(self, record: DiagnosticsRecord, theta: ScalarField, cumulative_work: float = 0.0):
        if self.records and record.t < self.records[-1].t:
            raise ValueError(f"record at t={record.t} precedes t={self.records[-1].t}")
        self.records.append(record)
        self.thetas.append(np.array(theta, copy=True))
        self.work.append(cumulative_work)

    def restore(self, record: DiagnosticsRecord, cumulative_work: float, theta: Optional[ScalarField] = None):
        """Re-append a record read back from diagnostics.csv, with its temperature when one was saved."""
        self.records.append(record)
        self.thetas.append(None if theta is None else np.array(theta, copy=True))
        self.work.append(cumulative_work)

    @property
    def times(self) -> npt.NDArray[np.float64]:
        return np.array([r.t for r in self.records])

    def column(self, name: str) -> npt.NDArray[np.float64]:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def first(self) -> DiagnosticsRecord:
        return self.records[0]

    @property
    def last(self) -> DiagnosticsRecord:
        return self.records[-1]


class ThetaInfinity(NamedTuple):
    L: float
    theta_inf: float
    # K(theta_hat) |Omega| = F(0) + int int f.u_t + int int g
    theta_hat: float
    converged: bool


class WindowMetrics(NamedTuple):
    t: float
    W_theta_half: float
    W_theta_1: float
    W_ut: float
    u_norm: float
    theta_inf: float
    L: Optional[float] = None


def theta_infinity(
    trajectory: Trajectory,
    model: HeatCapacityModel,
    window: int = 10,
    tolerance: float = 1e-8,
) -> ThetaInfinity:
    """Entropy limit L over the last `window` records and theta_inf = ell^-1(L)."""
    if len(trajectory) < window:
        raise CoverageError(
            f"need at least {window} records for the entropy limit",
            trajectory.first.t if trajectory.records else 0.0,
            trajectory.last.t if trajectory.records else 0.0,
            (trajectory.first.t, trajectory.last.t) if trajectory.records else (0.0, 0.0),
        )

    area = trajectory.grid.area
    functionals = functionals_for(model)
    entropy = trajectory.column("S")[-window:]

    decreases = np.diff(entropy)
    converged = bool(np.all(decreases >= -tolerance * (1.0 + np.abs(entropy[1:]))))
    if not converged:
        log.warning("entropy not monotone over the limit window", largest_drop=float(-np.min(decreases)))

    L = float(np.mean(entropy)) / area
    theta_inf = functionals.ell_inverse(L)
    if theta_inf <= 0:
        raise DomainError("entropy limit maps to a nonpositive temperature", L)

    budget = (trajectory.first.F + trajectory.work[-1]) / area
    theta_hat = functionals.k_inverse(budget)

    return ThetaInfinity(L=L, theta_inf=theta_inf, theta_hat=theta_hat, converged=converged)


def window_metrics(
    trajectory: Trajectory,
    t: float,
    theta_inf: float,
    max_gap: float = 0.05,
    L: Optional[float] = None,
) -> WindowMetrics:
    """Trapezoid-in-time integrals over [t, t + 1] of int|theta - theta_inf|^p and int|u_t|."""
    times = trajectory.times
    start, end = t, t + 1.0
    covered = (float(times[0]), float(times[-1])) if len(times) else (0.0, 0.0)
    if not len(times) or times[0] > start + _TIME_SLACK or times[-1] < end - _TIME_SLACK:
        raise CoverageError("trajectory does not cover the window", start, end, covered)

    inside = np.flatnonzero((times > start) & (times < end))
    lo = max(int(np.searchsorted(times, start, side="right")) - 1, 0)
    hi = min(int(np.searchsorted(times, end, side="left")), len(times) - 1)
    used = np.unique(np.concatenate([[lo], inside, [hi]]))
    gaps = np.diff(times[used])
    if len(gaps) and np.max(gaps) > max_gap + _TIME_SLACK:
        raise CoverageError(
            f"record spacing {np.max(gaps):.3g} exceeds {max_gap:.3g}", start, end, covered
        )

    if any(trajectory.thetas[i] is None for i in used):
        raise CoverageError("temperature fields before the restart are not available", start, end, covered)

    grid = trajectory.grid
    deviation_half = np.array([grid.integrate(np.abs(trajectory.thetas[i] - theta_inf) ** 0.5) for i in used])
    deviation_1 = np.array([grid.integrate(np.abs(trajectory.thetas[i] - theta_inf)) for i in used])
    v_l1 = np.array([trajectory.records[i].v_l1 for i in used])

    return WindowMetrics(
        t=t,
        W_theta_half=_window_integral(times[used], deviation_half, start, end),
        W_theta_1=_window_integral(times[used], deviation_1, start, end),
        W_ut=_window_integral(times[used], v_l1, start, end),
        u_norm=float(np.interp(t, times, trajectory.column("u_norm"))),
        theta_inf=theta_inf,
        L=L,
    )


def _window_integral(times: npt.NDArray, values: npt.NDArray, start: float, end: float) -> float:
    """Trapezoid over the records, linearly interpolated to the window ends."""
    if len(times) == 1:
        return float(values[0] * (end - start))

    inner = (times > start) & (times < end)
    nodes = np.concatenate([[start], times[inner], [end]])
    samples = np.interp(nodes, times, values)
    return float(trapezoid(samples, nodes))
