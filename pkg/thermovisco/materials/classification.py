from typing import NamedTuple

import numpy as np
import numpy.typing as npt
import structlog

from thermovisco.materials.functionals import functionals_for
from thermovisco.materials.heat_capacity import HeatCapacityModel

__all__ = [
    "HypothesisReport",
    "AdmissibilityReport",
    "classify",
    "admissibility_check",
]

log = structlog.stdlib.get_logger("materials")


class HypothesisReport(NamedTuple):
    variant: str
    dimension: int
    # liminf kappa > 0
    liminf_positive: bool
    # kappa * ln(xi) -> oo
    log_growth: bool
    # kappa * ln^((3 - n)+)(xi) -> oo for the given dimension
    dimensional_growth: bool
    ell_finite_at_zero: bool
    heuristic: bool

    def as_dict(self) -> dict:
        return self._asdict()


class AdmissibilityReport(NamedTuple):
    nonzero: bool
    thermal_integrable: bool
    entropy_integrable: bool
    negative_cells: int
    zero_cells: int
    cells_below_floor: int
    theta_floor: float

    @property
    def passed(self) -> bool:
        return (
            self.nonzero
            and self.thermal_integrable
            and self.entropy_integrable
            and self.negative_cells == 0
        )

    def failures(self) -> list[str]:
        reasons = []
        if self.negative_cells:
            reasons.append(f"{self.negative_cells} cells with negative temperature")
        if not self.nonzero:
            reasons.append("initial temperature vanishes identically")
        if not self.thermal_integrable:
            reasons.append("K(theta0) is not integrable")
        if not self.entropy_integrable:
            reasons.append(
                f"ell(theta0) is not integrable ({self.zero_cells} zero cells, ell(0) = -inf)"
            )
        return reasons

    def as_dict(self) -> dict:
        return self._asdict() | {"passed": self.passed, "failures": self.failures()}


def classify(model: HeatCapacityModel, dimension: int = 2) -> HypothesisReport:
    if dimension < 2:
        raise ValueError(f"dimension must be at least 2, got {dimension}")

    tail = model.tail()
    # ln^((3 - n)+) is ln for n = 2 and 1 for n >= 3
    dimensional_growth = tail.log_unbounded if dimension == 2 else tail.unbounded

    return HypothesisReport(
        variant=model.describe()["variant"],
        dimension=dimension,
        liminf_positive=tail.liminf_positive,
        log_growth=tail.log_unbounded,
        dimensional_growth=dimensional_growth,
        ell_finite_at_zero=model.ell_finite_at_zero,
        heuristic=tail.heuristic,
    )


def admissibility_check(
    theta0: npt.NDArray[np.float64],
    model: HeatCapacityModel,
    weights: npt.NDArray[np.float64],
    theta_floor: float = 0.0,
) -> AdmissibilityReport:
    theta0 = np.asarray(theta0, dtype=np.float64)
    functionals = functionals_for(model)

    negative = int(np.count_nonzero(theta0 < 0))
    zeros = int(np.count_nonzero(theta0 == 0))
    below_floor = int(np.count_nonzero(theta0 < theta_floor))
    nonnegative = np.clip(theta0, 0.0, None)

    thermal = float(np.sum(np.abs(functionals.k(nonnegative)) * weights))
    thermal_integrable = bool(np.isfinite(thermal))

    if zeros and not functionals.ell_finite_at_zero:
        entropy_integrable = False
    else:
        entropy = float(np.sum(np.abs(functionals.ell(nonnegative)) * weights))
        entropy_integrable = bool(np.isfinite(entropy))

    report = AdmissibilityReport(
        nonzero=bool(np.any(theta0 > 0)),
        thermal_integrable=thermal_integrable,
        entropy_integrable=entropy_integrable,
        negative_cells=negative,
        zero_cells=zeros,
        cells_below_floor=below_floor,
        theta_floor=theta_floor,
    )

    if not report.passed:
        log.warning("initial temperature is not admissible", failures=report.failures())

    return report
