from typing import NamedTuple, Optional

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp
import structlog
from scipy.sparse.linalg import LinearOperator, cg

__all__ = ["SolveResult", "SolverError", "solve_spd"]

log = structlog.stdlib.get_logger("solvers")

DEFAULT_RTOL = 1e-10
# CG targets a tighter residual than the acceptance threshold so that the
# recomputed (true) residual passes as well.
_CG_SAFETY = 0.1


class SolverError(RuntimeError):
    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.message = message
        self.residual = residual
        self.iterations = iterations

    @property
    def details(self) -> dict:
        return {"residual": self.residual, "iterations": self.iterations}

    def __str__(self):
        return (
            f"{self.message} (relative residual {self.residual:.3e} "
            f"after {self.iterations} iterations)"
        )


class SolveResult(NamedTuple):
    x: npt.NDArray[np.float64]
    iterations: int
    residual: float


def solve_spd(
    operator: sp.spmatrix | sp.sparray,
    rhs: npt.NDArray[np.float64],
    rtol: float = DEFAULT_RTOL,
    x0: Optional[npt.NDArray[np.float64]] = None,
    maxiter: Optional[int] = None,
) -> SolveResult:
    """Jacobi-preconditioned conjugate gradients for a symmetric positive definite system."""
    rhs = np.asarray(rhs, dtype=np.float64)
    dof = rhs.size
    rhs_norm = float(np.linalg.norm(rhs))

    if rhs_norm == 0.0:
        return SolveResult(np.zeros_like(rhs), 0, 0.0)

    diagonal = operator.diagonal()
    if np.any(diagonal <= 0):
        raise SolverError("operator has a nonpositive diagonal entry", np.inf, 0)

    inverse_diagonal = 1.0 / diagonal
    preconditioner = LinearOperator(
        (dof, dof), matvec=lambda r: inverse_diagonal * r, dtype=np.float64
    )

    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    x, info = cg(
        operator,
        rhs,
        x0=x0,
        rtol=_CG_SAFETY * rtol,
        atol=0.0,
        maxiter=maxiter or 10 * dof,
        M=preconditioner,
        callback=count,
    )

    residual = float(np.linalg.norm(rhs - operator @ x)) / rhs_norm
    if info != 0 or residual > rtol:
        log.warning(
            "conjugate gradients did not converge",
            info=info,
            residual=residual,
            iterations=iterations,
            dof=dof,
        )
        raise SolverError("conjugate gradients did not converge", residual, iterations)

    return SolveResult(x, iterations, residual)
