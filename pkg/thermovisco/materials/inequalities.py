import numpy as np
import numpy.typing as npt

from thermovisco.materials.functionals import E4, ScalarFunctionals
from thermovisco.materials.heat_capacity import DomainError

__all__ = [
    "log_sqrt_slack",
    "interpolation_slack",
    "log_square_slack",
    "ell_m_sandwich_slack",
    "ell_hat_k_slack",
]


def log_sqrt_slack(sigma: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """(2/e) sqrt(sigma) - ln(sigma), nonnegative for sigma >= 1."""
    s = np.asarray(sigma, dtype=np.float64)
    if np.any(s < 1):
        raise DomainError("bound is stated for sigma >= 1", float(np.min(s)))
    return 2.0 / np.e * np.sqrt(s) - np.log(s)


def interpolation_slack(xi: npt.ArrayLike, eta: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """xi^2 ln^2(eta)/eta + eta - xi ln(xi), nonnegative for xi >= e, eta >= e^2."""
    x = np.asarray(xi, dtype=np.float64)
    y = np.asarray(eta, dtype=np.float64)
    if np.any(x < np.e):
        raise DomainError("bound is stated for xi >= e", float(np.min(x)))
    if np.any(y < np.e**2):
        raise DomainError("bound is stated for eta >= e^2", float(np.min(y)))
    return x**2 * np.log(y) ** 2 / y + y - x * np.log(x)


def log_square_slack(xi: npt.ArrayLike, log_shift: float = E4) -> npt.NDArray[np.float64]:
    """ln^2(xi+M) - 2 ln(xi+M) - ln^2(xi+M)/2; nonnegative exactly when xi + M >= e^4."""
    y = np.log(np.asarray(xi, dtype=np.float64) + log_shift)
    return 0.5 * y**2 - 2.0 * y


def ell_m_sandwich_slack(
    functionals: ScalarFunctionals, xi: npt.ArrayLike, log_shift: float
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Slacks of ell - K/M <= ell_M <= ell; both nonnegative when the sandwich holds."""
    ell = np.asarray(functionals.ell(xi))
    ell_m = np.asarray(functionals.ell_m(xi, log_shift))
    k = np.asarray(functionals.k(xi))
    return ell_m - (ell - k / log_shift), ell - ell_m


def ell_hat_k_slack(functionals: ScalarFunctionals, xi: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """(4/e^2) K - ell_hat, nonnegative since ln^2(y)/y <= 4/e^2."""
    return 4.0 / np.e**2 * np.asarray(functionals.k(xi)) - np.asarray(functionals.ell_hat(xi))
