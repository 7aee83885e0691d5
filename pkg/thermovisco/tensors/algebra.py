from typing import NamedTuple

import numpy as np
import numpy.typing as npt

__all__ = [
    "SymMatrix2",
    "ElasticityTensors",
    "NonCoerciveTensorError",
    "isotropic_tensor",
    "contract4",
    "contract4_field",
    "contract_induced",
    "MANDEL_SCALE",
    "sym_inner",
    "induced_matrix",
    "tensor_from_induced",
    "check_symmetries",
    "coercivity_constant",
    "max_eigenvalue",
    "sqrt_tensor",
]

Tensor4 = npt.NDArray[np.float64]

# Orthonormal basis of the symmetric 2x2 matrices under <A, B> = sum_ij A_ij B_ij:
# {E11, E22, (E12 + E21)/sqrt(2)}.
_SQRT2 = np.sqrt(2.0)
_BASIS = np.array(
    [
        [[1.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [0.0, 1.0]],
        [[0.0, 1.0 / _SQRT2], [1.0 / _SQRT2, 0.0]],
    ]
)
# (a11, a22, a12) storage -> coordinates in the orthonormal basis
MANDEL_SCALE = np.array([1.0, 1.0, _SQRT2])


class NonCoerciveTensorError(ValueError):
    def __init__(self, message: str, coercivity: float | None = None):
        super().__init__(message)
        self.message = message
        self.coercivity = coercivity

    @property
    def details(self) -> dict:
        return {"coercivity": self.coercivity}

    def __str__(self):
        if self.coercivity is None:
            return self.message
        return f"{self.message} (coercivity constant {self.coercivity:.6g})"


class SymMatrix2(NamedTuple):
    a11: float
    a22: float
    a12: float

    @classmethod
    def from_array(cls, a: npt.ArrayLike) -> "SymMatrix2":
        arr = np.asarray(a, dtype=np.float64)
        if arr.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {arr.shape}")
        if arr[0, 1] != arr[1, 0]:
            raise ValueError("matrix is not symmetric")

        return cls(float(arr[0, 0]), float(arr[1, 1]), float(arr[0, 1]))

    @classmethod
    def identity(cls, scale: float = 1.0) -> "SymMatrix2":
        return cls(scale, scale, 0.0)

    def to_array(self) -> npt.NDArray[np.float64]:
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    def to_storage(self) -> npt.NDArray[np.float64]:
        return np.array([self.a11, self.a22, self.a12])

    def inner(self, other: "SymMatrix2") -> float:
        return self.a11 * other.a11 + self.a22 * other.a22 + 2.0 * self.a12 * other.a12

    def norm(self) -> float:
        return float(np.sqrt(self.inner(self)))

    def trace(self) -> float:
        return self.a11 + self.a22


def sym_inner(a: npt.NDArray, b: npt.NDArray) -> npt.NDArray:
    """Pointwise Frobenius product of matrix fields stored as (..., 3) = (a11, a22, a12)."""
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + 2.0 * a[..., 2] * b[..., 2]


def isotropic_tensor(lam: float, mu: float) -> Tensor4:
    delta = np.eye(2)
    tensor = lam * np.einsum("ij,kl->ijkl", delta, delta) + mu * (
        np.einsum("ik,jl->ijkl", delta, delta) + np.einsum("il,jk->ijkl", delta, delta)
    )

    if mu <= 0:
        raise NonCoerciveTensorError(f"isotropic tensor requires mu > 0, got mu={mu}", coercivity_constant(tensor))

    if coercivity_constant(tensor) <= 0:
        raise NonCoerciveTensorError(
            f"isotropic tensor with lambda={lam}, mu={mu} is not coercive",
            coercivity_constant(tensor),
        )

    return tensor


def contract4(tensor: Tensor4, a: SymMatrix2) -> SymMatrix2:
    result = np.einsum("ijkl,kl->ij", tensor, a.to_array())
    # Symmetric by the minor symmetry of the tensor; average away round-off.
    return SymMatrix2(
        float(result[0, 0]), float(result[1, 1]), 0.5 * float(result[0, 1] + result[1, 0])
    )


def induced_matrix(tensor: Tensor4) -> npt.NDArray[np.float64]:
    """3x3 matrix of A -> T:A in the orthonormal basis of symmetric matrices."""
    matrix = np.einsum("aij,ijkl,bkl->ab", _BASIS, tensor, _BASIS)
    return 0.5 * (matrix + matrix.T)


def tensor_from_induced(matrix: npt.NDArray[np.float64]) -> Tensor4:
    return np.einsum("ab,aij,bkl->ijkl", matrix, _BASIS, _BASIS)


def contract4_field(tensor: Tensor4, a: npt.NDArray) -> npt.NDArray:
    """T:A for a matrix field stored as (..., 3)."""
    return contract_induced(induced_matrix(tensor), a)


def contract_induced(matrix: npt.NDArray, a: npt.NDArray) -> npt.NDArray:
    coords = a * MANDEL_SCALE
    return (coords @ matrix.T) / MANDEL_SCALE


def check_symmetries(tensor: Tensor4) -> float:
    """Largest violation of T_ijkl = T_klij = T_jikl = T_ijlk."""
    return float(
        max(
            np.max(np.abs(tensor - tensor.transpose(2, 3, 0, 1))),
            np.max(np.abs(tensor - tensor.transpose(1, 0, 2, 3))),
            np.max(np.abs(tensor - tensor.transpose(0, 1, 3, 2))),
        )
    )


def coercivity_constant(tensor: Tensor4) -> float:
    return float(np.linalg.eigvalsh(induced_matrix(tensor))[0])


def max_eigenvalue(tensor: Tensor4) -> float:
    return float(np.linalg.eigvalsh(induced_matrix(tensor))[-1])


def sqrt_tensor(tensor: Tensor4) -> Tensor4:
    eigenvalues, eigenvectors = np.linalg.eigh(induced_matrix(tensor))
    if eigenvalues[0] <= 0:
        raise NonCoerciveTensorError(
            "square root requires a coercive tensor", float(eigenvalues[0])
        )

    root = eigenvectors @ np.diag(np.sqrt(eigenvalues)) @ eigenvectors.T
    return tensor_from_induced(0.5 * (root + root.T))


class ElasticityTensors(NamedTuple):
    viscosity: Tensor4
    elasticity: Tensor4
    coupling: SymMatrix2
    k_viscosity: float
    k_elasticity: float

    @classmethod
    def build(
        cls,
        viscosity: Tensor4,
        elasticity: Tensor4,
        coupling: SymMatrix2,
        symmetry_tol: float = 1e-12,
    ) -> "ElasticityTensors":
        for name, tensor in (("viscosity", viscosity), ("elasticity", elasticity)):
            tensor = np.asarray(tensor, dtype=np.float64)
            if tensor.shape != (2, 2, 2, 2):
                raise NonCoerciveTensorError(
                    f"{name} tensor must have shape (2, 2, 2, 2), got {tensor.shape}"
                )

            scale = max(float(np.max(np.abs(tensor))), 1.0)
            violation = check_symmetries(tensor)
            if violation > symmetry_tol * scale:
                raise NonCoerciveTensorError(
                    f"{name} tensor violates the minor/major symmetries by {violation:.3e}"
                )

            if coercivity_constant(tensor) <= 0:
                raise NonCoerciveTensorError(
                    f"{name} tensor is not coercive on symmetric matrices",
                    coercivity_constant(tensor),
                )

        return cls(
            viscosity=np.asarray(viscosity, dtype=np.float64),
            elasticity=np.asarray(elasticity, dtype=np.float64),
            coupling=coupling,
            k_viscosity=coercivity_constant(viscosity),
            k_elasticity=coercivity_constant(elasticity),
        )

    @property
    def viscosity_matrix(self) -> npt.NDArray[np.float64]:
        return induced_matrix(self.viscosity)

    @property
    def elasticity_matrix(self) -> npt.NDArray[np.float64]:
        return induced_matrix(self.elasticity)

    @property
    def coupling_norm(self) -> float:
        return self.coupling.norm()

    @property
    def has_coupling(self) -> bool:
        return self.coupling.norm() > 0
