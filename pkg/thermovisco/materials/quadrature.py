from typing import Sequence

import numpy as np
import numpy.typing as npt
from scipy.integrate import quad

from thermovisco.materials.heat_capacity import Evaluator

__all__ = ["CumulativeIntegral", "panel_knots"]

QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200
GAUSS_ORDER = 16

# Panels: 16 per decade over [1e-12, 1e12].
_LOG_KNOTS = np.logspace(-12, 12, 24 * 16 + 1)


def panel_knots(*extra: float, include_zero: bool = True) -> npt.NDArray[np.float64]:
    knots = np.concatenate([_LOG_KNOTS, [1.0], np.asarray(extra, dtype=np.float64)])
    if include_zero:
        knots = np.concatenate([[0.0], knots])
    return np.unique(knots)


def _scalar_quad(integrand: Evaluator, a: float, b: float) -> float:
    if a == b:
        return 0.0
    value, _ = quad(
        lambda s: float(integrand(np.array([s]))[0]),
        a,
        b,
        epsabs=0.0,
        epsrel=QUAD_EPSREL,
        limit=QUAD_LIMIT,
    )
    return value


class CumulativeIntegral:
    """Primitive F(x) = int_anchor^x f(s) ds on a fixed set of panel knots.

    The knot values are integrated adaptively once, at construction. Evaluation
    adds a Gauss-Legendre rule on the partial panel, so the object is read-only
    afterwards. Queries outside the knot range fall back to adaptive quadrature.
    """

    def __init__(self, integrand: Evaluator, knots: Sequence[float], anchor: float):
        knots_arr = np.unique(np.concatenate([np.asarray(knots, dtype=np.float64), [anchor]]))

        panels = np.array(
            [
                _scalar_quad(integrand, float(a), float(b))
                for a, b in zip(knots_arr[:-1], knots_arr[1:])
            ]
        )
        cumulative = np.concatenate([[0.0], np.cumsum(panels)])
        anchor_index = int(np.searchsorted(knots_arr, anchor))

        self.integrand = integrand
        self.anchor = anchor
        self.knots = knots_arr
        self.values = cumulative - cumulative[anchor_index]
        self._nodes, self._weights = np.polynomial.legendre.leggauss(GAUSS_ORDER)

    def __call__(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        points = np.asarray(x, dtype=np.float64)
        flat = points.ravel()
        result = np.empty_like(flat)

        low, high = self.knots[0], self.knots[-1]
        inside = (flat >= low) & (flat <= high)

        if np.any(inside):
            result[inside] = self._evaluate_inside(flat[inside])

        for i in np.flatnonzero(~inside):
            edge = low if flat[i] < low else high
            edge_value = self.values[0] if flat[i] < low else self.values[-1]
            result[i] = edge_value + _scalar_quad(self.integrand, float(edge), float(flat[i]))

        return result.reshape(points.shape)

    def _evaluate_inside(self, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        index = np.clip(np.searchsorted(self.knots, x, side="right") - 1, 0, self.knots.size - 1)
        start = self.knots[index]
        result = self.values[index].copy()

        partial = x > start
        if np.any(partial):
            a = start[partial]
            b = x[partial]
            half = 0.5 * (b - a)
            mid = 0.5 * (b + a)
            nodes = mid[:, None] + half[:, None] * self._nodes[None, :]
            samples = self.integrand(nodes.ravel()).reshape(nodes.shape)
            result[partial] += half * (samples @ self._weights)

        return result
