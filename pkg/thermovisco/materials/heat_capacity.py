from abc import ABC, abstractmethod
from enum import StrEnum
from typing import Callable, ClassVar, NamedTuple, Optional, Sequence

import numpy as np
import numpy.typing as npt
from scipy.optimize import brentq

__all__ = [
    "KindHeatCapacity",
    "DomainError",
    "TailBehaviour",
    "HeatCapacityModel",
    "ConstantHeatCapacity",
    "PowerGrowthHeatCapacity",
    "DebyeLikeHeatCapacity",
    "SlowDecayHeatCapacity",
    "TabulatedHeatCapacity",
    "RegularizedHeatCapacity",
    "regularize_kappa",
]

ArrayOrScalar = float | npt.NDArray[np.float64]
Evaluator = Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]

# Samples used to classify tails numerically: xi = 10^k, k = 1..12.
_TAIL_SAMPLES = np.logspace(1, 12, 12)


class DomainError(ValueError):
    def __init__(self, message: str, value: Optional[float] = None):
        super().__init__(message)
        self.message = message
        self.value = value

    @property
    def details(self) -> dict:
        return {"value": self.value}

    def __str__(self):
        if self.value is None:
            return self.message
        return f"{self.message}: {self.value!r}"


class KindHeatCapacity(StrEnum):
    CONSTANT = "constant"
    POWER_GROWTH = "power_growth"
    DEBYE_LIKE = "debye_like"
    SLOW_DECAY = "slow_decay"
    TABULATED = "tabulated"
    REGULARIZED = "regularized"


class TailBehaviour(NamedTuple):
    liminf_positive: bool
    # kappa(xi) -> oo
    unbounded: bool
    # kappa(xi) * ln(xi) -> oo
    log_unbounded: bool
    heuristic: bool = False


def sample_tail(kappa: Evaluator) -> TailBehaviour:
    values = np.asarray(kappa(_TAIL_SAMPLES), dtype=np.float64)
    weighted = values * np.log(_TAIL_SAMPLES)
    scale = max(float(np.max(values)), 1.0)

    liminf_positive = bool(np.min(values[-4:]) > 1e-8 * scale)
    unbounded = bool(np.all(np.diff(values[-6:]) > 0) and values[-1] > 10 * values[-6])
    log_unbounded = bool(
        np.all(np.diff(weighted[-6:]) > 0) and weighted[-1] > 1.5 * weighted[-6]
    )

    return TailBehaviour(liminf_positive, unbounded, log_unbounded, heuristic=True)


def _as_temperature(xi: npt.ArrayLike) -> npt.NDArray[np.float64]:
    arr = np.asarray(xi, dtype=np.float64)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        bad = arr[(arr < 0) | np.isnan(arr)]
        raise DomainError("temperature must be nonnegative", float(bad.flat[0]))
    return arr


class HeatCapacityModel(ABC):
    kind: ClassVar[KindHeatCapacity]

    def kappa(self, xi: npt.ArrayLike) -> ArrayOrScalar:
        arr = _as_temperature(xi)
        values = self._kappa(arr)
        if np.ndim(xi) == 0:
            return float(values)
        return values

    @abstractmethod
    def _kappa(self, xi: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        pass

    @abstractmethod
    def tail(self) -> TailBehaviour:
        pass

    def breakpoints(self) -> tuple[float, ...]:
        """Points where kappa is not smooth or changes scale; quadrature panels start there."""
        return ()

    @property
    def ell_finite_at_zero(self) -> bool:
        # For every supported law, int_0^1 kappa/s converges exactly when kappa(0) = 0.
        return float(self._kappa(np.zeros(1))[0]) == 0.0

    def closed_k(self) -> Optional[Evaluator]:
        return None

    def closed_ell(self) -> Optional[Evaluator]:
        return None

    def closed_ell_hat(self, log_shift: float) -> Optional[Evaluator]:
        return None

    def describe(self) -> dict:
        return {"variant": str(self.kind)}


class ConstantHeatCapacity(HeatCapacityModel):
    kind = KindHeatCapacity.CONSTANT

    def __init__(self, k0: float = 1.0):
        if k0 <= 0:
            raise DomainError("constant heat capacity must be positive", k0)
        self.k0 = k0

    def _kappa(self, xi):
        return np.full_like(xi, self.k0)

    def tail(self):
        return TailBehaviour(liminf_positive=True, unbounded=False, log_unbounded=True)

    def closed_k(self):
        return lambda xi: self.k0 * xi

    def closed_ell(self):
        return lambda xi: self.k0 * np.log(xi)

    def closed_ell_hat(self, log_shift):
        log_m3 = np.log(log_shift) ** 3
        return lambda xi: self.k0 * (np.log(xi + log_shift) ** 3 - log_m3) / 3.0

    def describe(self):
        return {"variant": str(self.kind), "k0": self.k0}


class PowerGrowthHeatCapacity(HeatCapacityModel):
    kind = KindHeatCapacity.POWER_GROWTH

    def __init__(self, k0: float, omega: float):
        if k0 <= 0:
            raise DomainError("k0 must be positive", k0)
        if omega < 0:
            raise DomainError("omega must be nonnegative", omega)
        self.k0 = k0
        self.omega = omega

    def _kappa(self, xi):
        return self.k0 * (1.0 + xi) ** self.omega

    def tail(self):
        return TailBehaviour(
            liminf_positive=True, unbounded=self.omega > 0, log_unbounded=True
        )

    def closed_k(self):
        power = self.omega + 1.0
        return lambda xi: self.k0 * ((1.0 + xi) ** power - 1.0) / power

    def describe(self):
        return {"variant": str(self.kind), "k0": self.k0, "omega": self.omega}


class DebyeLikeHeatCapacity(HeatCapacityModel):
    kind = KindHeatCapacity.DEBYE_LIKE

    def __init__(self, k0: float, xi_d: float):
        if k0 <= 0 or xi_d <= 0:
            raise DomainError("k0 and xi_d must be positive", min(k0, xi_d))
        self.k0 = k0
        self.xi_d = xi_d

    def _kappa(self, xi):
        cube = xi**3
        return self.k0 * cube / (cube + self.xi_d**3)

    def tail(self):
        return TailBehaviour(liminf_positive=True, unbounded=False, log_unbounded=True)

    def breakpoints(self):
        return (self.xi_d,)

    def describe(self):
        return {"variant": str(self.kind), "k0": self.k0, "xi_d": self.xi_d}


class SlowDecayHeatCapacity(HeatCapacityModel):
    kind = KindHeatCapacity.SLOW_DECAY

    def __init__(self, k0: float, alpha: float):
        if k0 <= 0:
            raise DomainError("k0 must be positive", k0)
        if not 0 < alpha < 1:
            raise DomainError("alpha must lie in (0, 1)", alpha)
        self.k0 = k0
        self.alpha = alpha

    def _kappa(self, xi):
        return self.k0 / np.log(np.e + xi) ** self.alpha

    def tail(self):
        # kappa -> 0 but kappa * ln(xi) ~ ln(xi)^(1 - alpha) -> oo
        return TailBehaviour(liminf_positive=False, unbounded=False, log_unbounded=True)

    def describe(self):
        return {"variant": str(self.kind), "k0": self.k0, "alpha": self.alpha}


class TabulatedHeatCapacity(HeatCapacityModel):
    """Linear interpolation between samples, constant beyond the last one."""

    kind = KindHeatCapacity.TABULATED

    def __init__(self, xi: Sequence[float], kappa: Sequence[float]):
        points = np.asarray(xi, dtype=np.float64)
        values = np.asarray(kappa, dtype=np.float64)

        if points.ndim != 1 or points.shape != values.shape or points.size < 2:
            raise DomainError("tabulated heat capacity needs two or more (xi, kappa) pairs")
        if points[0] != 0.0:
            raise DomainError("tabulated samples must start at xi = 0", float(points[0]))
        if np.any(np.diff(points) <= 0):
            raise DomainError("tabulated sample points must be strictly increasing")
        if values[0] < 0 or np.any(values[1:] <= 0):
            raise DomainError("tabulated kappa must be positive for xi > 0")

        self.points = points
        self.values = values

    def _kappa(self, xi):
        return np.interp(xi, self.points, self.values)

    def tail(self):
        return sample_tail(self._kappa)

    def breakpoints(self):
        return tuple(float(p) for p in self.points[1:])

    def describe(self):
        return {
            "variant": str(self.kind),
            "xi": self.points.tolist(),
            "kappa": self.values.tolist(),
        }


class RegularizedHeatCapacity(HeatCapacityModel):
    """kappa_eps = max(kappa, eps)."""

    kind = KindHeatCapacity.REGULARIZED

    def __init__(self, base: HeatCapacityModel, eps: float):
        self.base = base
        self.eps = eps
        self._crossings = self._find_crossings()

    def _kappa(self, xi):
        return np.maximum(self.base._kappa(xi), self.eps)

    def _find_crossings(self) -> tuple[float, ...]:
        grid = np.concatenate([[0.0], np.logspace(-12, 12, 24 * 16 + 1)])
        excess = self.base._kappa(grid) - self.eps
        crossings = []
        for i in np.flatnonzero(np.sign(excess[:-1]) * np.sign(excess[1:]) < 0):
            crossings.append(
                brentq(
                    lambda s: float(self.base._kappa(np.array([s]))[0]) - self.eps,
                    grid[i],
                    grid[i + 1],
                    xtol=1e-300,
                    rtol=4 * np.finfo(float).eps,
                )
            )
        return tuple(crossings)

    def tail(self):
        base = self.base.tail()
        return TailBehaviour(
            liminf_positive=True,
            unbounded=base.unbounded,
            log_unbounded=True,
            heuristic=base.heuristic,
        )

    def breakpoints(self):
        return tuple(sorted(set(self.base.breakpoints()) | set(self._crossings)))

    @property
    def ell_finite_at_zero(self) -> bool:
        return False

    def describe(self):
        return {"variant": str(self.kind), "eps": self.eps, "base": self.base.describe()}


def regularize_kappa(model: HeatCapacityModel, eps: float) -> HeatCapacityModel:
    if not 0 < eps < 1:
        raise DomainError("regularization eps must lie in (0, 1)", eps)

    # Laws that are already bounded below by eps are returned as they are.
    if isinstance(model, ConstantHeatCapacity) and model.k0 >= eps:
        return model
    if isinstance(model, PowerGrowthHeatCapacity) and model.k0 >= eps:
        return model

    return RegularizedHeatCapacity(model, eps)
