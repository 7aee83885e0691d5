from typing import NamedTuple

import numpy as np

from thermovisco.diagnostics.records import DiagnosticsEvaluator
from thermovisco.integrator import FieldState

__all__ = ["ChainReport", "lloglog_chain", "chain_sample_times"]

E = float(np.e)


class ChainReport(NamedTuple):
    """Terms of the L log L estimate for |sym_grad v|, in the order they are chained."""

    t: float
    llogl: float
    # int (s + e) ln(s + e)
    shifted: float
    # int (s + e)^2 ln^2(theta + e^2) / (theta + e^2) + int (theta + e^2)
    interpolated: float
    # 8 int ln^2(theta + e) s^2 / (theta + 1) + 8 e^2 int (theta + e) + int (theta + e^2)
    young: float
    # 8 L2 + (8 e^2 + 1) int theta + (8 e^3 + e^2) |Omega|
    bound: float
    tolerance: float

    @property
    def links(self) -> list[tuple[str, float, float]]:
        return [
            ("shift", self.llogl, self.shifted),
            ("interpolation", self.shifted, self.interpolated),
            ("young", self.interpolated, self.young),
            ("bound", self.llogl, self.bound),
        ]

    @property
    def failures(self) -> list[str]:
        return [name for name, lhs, rhs in self.links if lhs > rhs + self.tolerance * (1.0 + abs(rhs))]

    @property
    def passed(self) -> bool:
        return not self.failures


def lloglog_chain(evaluator: DiagnosticsEvaluator, state: FieldState, tolerance: float = 1e-10) -> ChainReport:
    integrate = evaluator.grid.integrate
    theta = state.theta
    _, s = evaluator.strain(state)

    shifted_s = s + E
    eta = theta + E**2

    llogl = integrate(s * np.log(shifted_s))
    shifted = integrate(shifted_s * np.log(shifted_s))
    interpolation = integrate(shifted_s**2 * np.log(eta) ** 2 / eta)
    heat = integrate(eta)

    L2 = integrate(np.log(theta + E) ** 2 * s**2 / (theta + 1.0))
    young = 8.0 * L2 + 8.0 * E**2 * integrate(theta + E) + heat
    bound = 8.0 * L2 + (8.0 * E**2 + 1.0) * integrate(theta) + (8.0 * E**3 + E**2) * evaluator.grid.area

    return ChainReport(
        t=float(state.t),
        llogl=llogl,
        shifted=shifted,
        interpolated=interpolation + heat,
        young=young,
        bound=bound,
        tolerance=tolerance,
    )


def chain_sample_times(final_time: float, samples: int, start: float = 0.0) -> list[float]:
    """Evenly spaced times at which the chain is evaluated along a run."""
    if samples <= 0:
        return []
    return [float(t) for t in np.linspace(start, final_time, samples)]
