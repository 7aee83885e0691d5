from typing import Callable, Optional

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from thermovisco.grid.grid import Grid, MatrixField, ScalarField, VectorField
from thermovisco.tensors.algebra import MANDEL_SCALE, contract_induced, sym_inner

__all__ = [
    "sbp_first_derivative",
    "neumann_second_derivative",
    "dirichlet_second_derivative",
    "GridOperators",
]

SparseMatrix = sp.csr_matrix
EdgeWeight = Callable[[npt.NDArray, npt.NDArray], npt.NDArray]


def sbp_first_derivative(n: int, h: float) -> SparseMatrix:
    """Second-order summation-by-parts first derivative D = P^-1 Q.

    P is the trapezoid norm and Q + Q^T = diag(-1, 0, ..., 0, 1), so
    sum_i P_ii (D u)_i v_i + sum_i P_ii u_i (D v)_i = u_N v_N - u_0 v_0.
    """
    q = sp.diags([-0.5 * np.ones(n - 1), 0.5 * np.ones(n - 1)], [-1, 1], format="lil")
    q[0, 0] = -0.5
    q[n - 1, n - 1] = 0.5

    p_inv = np.full(n, 1.0 / h)
    p_inv[[0, -1]] = 2.0 / h

    return sp.diags(p_inv) @ q.tocsr()


def neumann_second_derivative(n: int, h: float) -> SparseMatrix:
    """Three-point second difference with mirror ghosts u_{-1} = u_1, u_{N+1} = u_{N-1}."""
    main = np.full(n, -2.0)
    upper = np.ones(n - 1)
    lower = np.ones(n - 1)
    upper[0] = 2.0
    lower[-1] = 2.0
    return sp.diags([lower, main, upper], [-1, 0, 1], format="csr") / h**2


def dirichlet_second_derivative(n: int, h: float) -> SparseMatrix:
    """Three-point second difference on interior nodes with clamped (zero) boundary values."""
    inner = np.ones(n)
    inner[[0, -1]] = 0.0
    mask = sp.diags(inner)
    stencil = sp.diags(
        [np.ones(n - 1), np.full(n, -2.0), np.ones(n - 1)], [-1, 0, 1], format="csr"
    )
    return (mask @ stencil @ mask).tocsr() / h**2


class GridOperators:
    """Assembled sparse operators of one grid.

    Vector fields are flattened component-major (u1 nodes, then u2 nodes), matrix
    fields as (a11, a22, a12) blocks, scalar fields in C order over (i, j).
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        n = grid.size
        ix = sp.identity(grid.nx, format="csr")
        iy = sp.identity(grid.ny, format="csr")

        self.dx = sp.kron(sbp_first_derivative(grid.nx, grid.hx), iy, format="csr")
        self.dy = sp.kron(ix, sbp_first_derivative(grid.ny, grid.hy), format="csr")

        zero = sp.csr_matrix((n, n))
        self.sym_grad_matrix = sp.block_array(
            [
                [self.dx, zero],
                [zero, self.dy],
                [0.5 * self.dy, 0.5 * self.dx],
            ],
            format="csr",
        )

        w = grid.weights.ravel()
        self.weights = w
        self.scalar_mass = sp.diags(w, format="csr")
        self.vector_mass = sp.diags(np.tile(w, 2), format="csr")
        self.matrix_mass = sp.diags(np.concatenate([w, w, 2.0 * w]), format="csr")

        interior = grid.interior.ravel().astype(np.float64)
        self.vector_interior = sp.diags(np.tile(interior, 2), format="csr")
        self.vector_boundary = sp.diags(np.tile(1.0 - interior, 2), format="csr")

        # div(A) = -W^-1 G^T W_m A on interior nodes, zero rows on the boundary.
        self.div_matrix = (
            -self.vector_interior
            @ sp.diags(1.0 / np.tile(w, 2))
            @ self.sym_grad_matrix.T
            @ self.matrix_mass
        ).tocsr()

        self.laplacian_neumann_matrix = (
            sp.kron(neumann_second_derivative(grid.nx, grid.hx), iy)
            + sp.kron(ix, neumann_second_derivative(grid.ny, grid.hy))
        ).tocsr()
        self.weighted_laplacian_neumann = (
            self.scalar_mass @ self.laplacian_neumann_matrix
        ).tocsr()

        dirichlet = (
            sp.kron(dirichlet_second_derivative(grid.nx, grid.hx), iy)
            + sp.kron(ix, dirichlet_second_derivative(grid.ny, grid.hy))
        ).tocsr()
        interior_mask = sp.diags(interior)
        self.laplacian_dirichlet_matrix = (interior_mask @ dirichlet @ interior_mask).tocsr()
        self.vector_laplacian_dirichlet = sp.block_diag(
            [self.laplacian_dirichlet_matrix, self.laplacian_dirichlet_matrix], format="csr"
        )

        # Edge data for the discrete Dirichlet form matching the Neumann Laplacian.
        self.edge_weight_x = (grid.hx * grid.wy)[None, :] * np.ones((grid.nx - 1, 1))
        self.edge_weight_y = (grid.hy * grid.wx)[:, None] * np.ones((1, grid.ny - 1))

    # Flattening helpers

    def flatten_vector(self, field: VectorField) -> npt.NDArray[np.float64]:
        return np.ascontiguousarray(field.transpose(2, 0, 1)).reshape(-1)

    def unflatten_vector(self, flat: npt.NDArray[np.float64]) -> VectorField:
        return flat.reshape(2, self.grid.nx, self.grid.ny).transpose(1, 2, 0).copy()

    def flatten_matrix(self, field: MatrixField) -> npt.NDArray[np.float64]:
        return np.ascontiguousarray(field.transpose(2, 0, 1)).reshape(-1)

    def unflatten_matrix(self, flat: npt.NDArray[np.float64]) -> MatrixField:
        return flat.reshape(3, self.grid.nx, self.grid.ny).transpose(1, 2, 0).copy()

    # Field operators

    def sym_grad(self, v: VectorField) -> MatrixField:
        return self.unflatten_matrix(self.sym_grad_matrix @ self.flatten_vector(v))

    def div(self, a: MatrixField) -> VectorField:
        return self.unflatten_vector(self.div_matrix @ self.flatten_matrix(a))

    def laplacian_neumann(self, theta: ScalarField) -> ScalarField:
        return (self.laplacian_neumann_matrix @ theta.ravel()).reshape(self.grid.shape)

    def laplacian_dirichlet(self, v: VectorField) -> VectorField:
        return self.unflatten_vector(self.vector_laplacian_dirichlet @ self.flatten_vector(v))

    def integrate(self, f: ScalarField) -> float:
        return self.grid.integrate(f)

    def tensor_stiffness(self, induced: npt.NDArray[np.float64]) -> SparseMatrix:
        """Matrix of w -> -W div(T:sym_grad w): G^T S (M_T (x) W) S G."""
        scale = sp.diags(np.repeat(MANDEL_SCALE, self.grid.size))
        weighted = sp.kron(sp.csr_matrix(induced), self.scalar_mass)
        return (self.sym_grad_matrix.T @ scale @ weighted @ scale @ self.sym_grad_matrix).tocsr()

    # Edge-based forms

    def edge_gradients(self, theta: ScalarField) -> tuple[npt.NDArray, npt.NDArray]:
        return np.diff(theta, axis=0) / self.grid.hx, np.diff(theta, axis=1) / self.grid.hy

    def dirichlet_form(self, theta: ScalarField, weight: Optional[EdgeWeight] = None) -> float:
        """sum_e c_e |grad_e theta|^2 weight(theta_i, theta_j); equals -sum w theta lap_N theta for weight 1."""
        gx, gy = self.edge_gradients(theta)
        terms_x = self.edge_weight_x * gx**2
        terms_y = self.edge_weight_y * gy**2
        if weight is not None:
            terms_x = terms_x * weight(theta[:-1, :], theta[1:, :])
            terms_y = terms_y * weight(theta[:, :-1], theta[:, 1:])
        return float(np.sum(terms_x) + np.sum(terms_y))

    # Korn-type checks

    def korn_ratio(self, induced: npt.NDArray[np.float64], w: VectorField) -> float:
        """sum <T:sym_grad w, sym_grad w> / sum |sym_grad w|^2 under quadrature weights."""
        e = self.sym_grad(w)
        energy = self.integrate(sym_inner(contract_induced(induced, e), e))
        norm = self.integrate(sym_inner(e, e))
        return energy / norm

    def poincare_korn_constant(self) -> float:
        """Smallest c with sum |w|^2 <= c sum |sym_grad w|^2 over boundary-vanishing w."""
        dofs = np.flatnonzero(np.tile(self.grid.interior.ravel(), 2))
        stiffness = (self.sym_grad_matrix.T @ self.matrix_mass @ self.sym_grad_matrix).tocsc()
        stiffness = stiffness[dofs][:, dofs]
        mass = self.vector_mass.tocsc()[dofs][:, dofs]

        eigenvalue = eigsh(stiffness, k=1, M=mass, sigma=0.0, which="LM", return_eigenvectors=False)
        return float(1.0 / eigenvalue[0])
