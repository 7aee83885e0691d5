from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np
import numpy.typing as npt
from scipy.integrate import quad
from scipy.optimize import brentq

from thermovisco.materials.heat_capacity import (
    ArrayOrScalar,
    ConstantHeatCapacity,
    DomainError,
    Evaluator,
    HeatCapacityModel,
    _as_temperature,
)
from thermovisco.materials.quadrature import QUAD_EPSREL, CumulativeIntegral, panel_knots

__all__ = [
    "E4",
    "Divergence",
    "DIVERGENT",
    "ExtendedScalar",
    "ScalarFunctionals",
    "functionals_for",
    "cutoff",
    "kappa",
    "k_of",
    "ell_of",
    "ell_hat_of",
    "lambda_of",
    "k_phi_of",
    "ell_m_of",
    "ell_inverse",
    "k_inverse",
]

E4 = float(np.exp(4.0))

INVERSE_XTOL = 1e-12
_BRACKET_LIMIT = 1e300


class Divergence(Enum):
    NEGATIVE_INFINITY = "-inf"


DIVERGENT = Divergence.NEGATIVE_INFINITY

ExtendedScalar = float | Divergence


def cutoff(xi: npt.ArrayLike, log_shift: float) -> npt.NDArray[np.float64]:
    """Piecewise-linear cutoff: 1 on [0, M], 1 - (xi - M) on [M, M + 1], 0 beyond."""
    return np.clip(1.0 - (np.asarray(xi, dtype=np.float64) - log_shift), 0.0, 1.0)


def _validate_log_shift(log_shift: float):
    # M = e^4 itself is admitted; allow for its floating point representation.
    if log_shift < E4 * (1.0 - 1e-15):
        raise DomainError("M must be at least e^4", log_shift)


class ScalarFunctionals:
    """K, ell, ell_hat(.; M) and Lambda bound to one heat-capacity law and one M.

    Quadrature tables are built eagerly so evaluation never mutates the object.
    """

    def __init__(self, model: HeatCapacityModel, log_shift: float = E4):
        _validate_log_shift(log_shift)

        self.model = model
        self.log_shift = log_shift
        self.ell_finite_at_zero = model.ell_finite_at_zero

        knots = model.breakpoints()

        self._k: Evaluator = model.closed_k() or CumulativeIntegral(
            model._kappa, panel_knots(*knots), anchor=0.0
        )
        self._ell: Evaluator = model.closed_ell() or CumulativeIntegral(
            lambda s: model._kappa(s) / s,
            panel_knots(*knots, include_zero=self.ell_finite_at_zero),
            anchor=1.0,
        )
        self._ell_hat: Evaluator = model.closed_ell_hat(log_shift) or CumulativeIntegral(
            lambda s: np.log(s + log_shift) ** 2 * model._kappa(s) / (s + log_shift),
            panel_knots(*knots),
            anchor=0.0,
        )
        self.ell_at_zero: ExtendedScalar = (
            float(self._ell(np.zeros(1))[0]) if self.ell_finite_at_zero else DIVERGENT
        )

    def kappa(self, xi: npt.ArrayLike) -> ArrayOrScalar:
        return self.model.kappa(xi)

    def k(self, xi: npt.ArrayLike) -> ArrayOrScalar:
        return _shaped(xi, self._k(_as_temperature(xi)))

    def ell(self, xi: npt.ArrayLike) -> ArrayOrScalar:
        arr = _as_temperature(xi)
        if not self.ell_finite_at_zero and np.any(arr == 0):
            raise DomainError("ell diverges at zero temperature for this heat capacity", 0.0)
        return _shaped(xi, self._ell(arr))

    def ell_hat(self, xi: npt.ArrayLike) -> ArrayOrScalar:
        return _shaped(xi, self._ell_hat(_as_temperature(xi)))

    def lambda_(self, xi: npt.ArrayLike) -> ArrayOrScalar:
        """int_1^xi kappa * max(1, 1/s) ds: ell below 1, K(xi) - K(1) above."""
        arr = _as_temperature(xi)
        above = arr >= 1.0
        result = np.empty_like(arr)
        if np.any(above):
            result[above] = self._k(arr[above]) - self._k(np.ones(1))[0]
        if np.any(~above):
            result[~above] = self.ell(arr[~above])
        return _shaped(xi, result)

    def k_phi(self, xi: npt.ArrayLike, dphi: Callable[[float], float]) -> ArrayOrScalar:
        arr = _as_temperature(xi)
        result = np.array(
            [
                quad(
                    lambda s: float(self.model._kappa(np.array([s]))[0]) * dphi(s),
                    0.0,
                    float(x),
                    epsabs=0.0,
                    epsrel=QUAD_EPSREL,
                    limit=200,
                )[0]
                for x in arr.ravel()
            ]
        ).reshape(arr.shape)
        return _shaped(xi, result)

    def ell_m(self, xi: npt.ArrayLike, log_shift: float) -> ArrayOrScalar:
        """int_1^xi rho(s) kappa(s)/s ds with the piecewise-linear cutoff rho at M = log_shift."""
        if log_shift <= 1:
            raise DomainError("cutoff level M must exceed 1", log_shift)

        arr = _as_temperature(xi)
        result = np.asarray(self.ell(np.minimum(arr, log_shift)), dtype=np.float64).copy()

        tail = arr > log_shift
        for i in np.flatnonzero(tail.ravel()):
            upper = min(float(arr.flat[i]), log_shift + 1.0)
            result.flat[i] += quad(
                lambda s: float(
                    cutoff(s, log_shift) * self.model._kappa(np.array([s]))[0] / s
                ),
                log_shift,
                upper,
                epsabs=0.0,
                epsrel=QUAD_EPSREL,
            )[0]
        return _shaped(xi, result)

    def ell_inverse(self, z: float) -> float:
        closed = isinstance(self.model, ConstantHeatCapacity)
        if closed:
            return float(np.exp(z / self.model.k0))

        if self.ell_finite_at_zero:
            floor = float(self.ell_at_zero)  # type: ignore[arg-type]
            if z < floor:
                raise DomainError("value below the infimum of ell", z)
            if z == floor:
                return 0.0

        def residual(x: float) -> float:
            return float(self._ell(np.array([x]))[0]) - z

        if z >= 0:
            lo, hi = 1.0, 2.0
            while residual(hi) < 0:
                lo, hi = hi, 2.0 * hi
                if hi > _BRACKET_LIMIT:
                    raise DomainError("value beyond the range of ell", z)
        else:
            lo, hi = 0.5, 1.0
            while residual(lo) > 0:
                lo, hi = 0.5 * lo, lo
                if lo < 1e-300:
                    if not self.ell_finite_at_zero:
                        raise DomainError("value beyond the range of ell", z)
                    lo = 0.0
                    break

        return float(brentq(residual, lo, hi, xtol=INVERSE_XTOL, rtol=4 * np.finfo(float).eps))

    def k_inverse(self, energy: float) -> float:
        if energy < 0:
            raise DomainError("thermal energy density must be nonnegative", energy)
        if energy == 0:
            return 0.0

        def residual(x: float) -> float:
            return float(self._k(np.array([x]))[0]) - energy

        lo, hi = 0.0, 1.0
        while residual(hi) < 0:
            lo, hi = hi, 2.0 * hi
            if hi > _BRACKET_LIMIT:
                raise DomainError("value beyond the range of K", energy)

        return float(brentq(residual, lo, hi, xtol=INVERSE_XTOL, rtol=4 * np.finfo(float).eps))


def _shaped(xi: npt.ArrayLike, values: npt.NDArray[np.float64]) -> ArrayOrScalar:
    if np.ndim(xi) == 0:
        return float(np.asarray(values).reshape(-1)[0])
    return np.asarray(values, dtype=np.float64)


@lru_cache(maxsize=64)
def functionals_for(model: HeatCapacityModel, log_shift: float = E4) -> ScalarFunctionals:
    return ScalarFunctionals(model, log_shift)


def kappa(model: HeatCapacityModel, xi: npt.ArrayLike) -> ArrayOrScalar:
    return model.kappa(xi)


def k_of(model: HeatCapacityModel, xi: npt.ArrayLike) -> ArrayOrScalar:
    return functionals_for(model).k(xi)


def ell_of(model: HeatCapacityModel, xi: npt.ArrayLike) -> ArrayOrScalar | Divergence:
    functionals = functionals_for(model)
    if np.ndim(xi) == 0 and float(xi) == 0.0:  # type: ignore[arg-type]
        return functionals.ell_at_zero
    return functionals.ell(xi)


def ell_hat_of(model: HeatCapacityModel, xi: npt.ArrayLike, log_shift: float = E4) -> ArrayOrScalar:
    return functionals_for(model, log_shift).ell_hat(xi)


def lambda_of(model: HeatCapacityModel, xi: npt.ArrayLike) -> ArrayOrScalar | Divergence:
    functionals = functionals_for(model)
    if np.ndim(xi) == 0 and float(xi) == 0.0:  # type: ignore[arg-type]
        return functionals.ell_at_zero
    return functionals.lambda_(xi)


def k_phi_of(
    model: HeatCapacityModel, xi: npt.ArrayLike, dphi: Callable[[float], float]
) -> ArrayOrScalar:
    return functionals_for(model).k_phi(xi, dphi)


def ell_m_of(model: HeatCapacityModel, xi: npt.ArrayLike, log_shift: float) -> ArrayOrScalar:
    return functionals_for(model).ell_m(xi, log_shift)


def ell_inverse(model: HeatCapacityModel, z: float) -> float:
    return functionals_for(model).ell_inverse(z)


def k_inverse(model: HeatCapacityModel, energy: float) -> float:
    return functionals_for(model).k_inverse(energy)
