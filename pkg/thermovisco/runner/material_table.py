from typing import NamedTuple

import numpy as np

from thermovisco.materials import DIVERGENT, E4, HeatCapacityModel, functionals_for

__all__ = ["MaterialRow", "material_table"]


class MaterialRow(NamedTuple):
    xi: float
    kappa: float
    K: float
    ell: float
    ell_hat: float
    Lambda: float


def material_table(model: HeatCapacityModel, log_shift: float = E4, count: int = 25) -> list[MaterialRow]:
    """kappa, K, ell, ell_hat and Lambda at xi log-spaced on [1e-3, 1e3], plus xi = 0 where ell is finite."""
    functionals = functionals_for(model, log_shift)
    xi = np.logspace(-3.0, 3.0, count)

    rows = []
    if functionals.ell_at_zero is not DIVERGENT:
        ell0 = float(functionals.ell_at_zero)  # type: ignore[arg-type]
        rows.append(MaterialRow(0.0, float(model.kappa(0.0)), 0.0, ell0, 0.0, ell0))

    kappa = model.kappa(xi)
    k = functionals.k(xi)
    ell = functionals.ell(xi)
    ell_hat = functionals.ell_hat(xi)
    lam = functionals.lambda_(xi)
    for values in zip(xi, kappa, k, ell, ell_hat, lam):
        rows.append(MaterialRow(*(float(v) for v in values)))

    return rows
