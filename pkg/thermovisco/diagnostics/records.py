from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from thermovisco.grid import GridOperators, MatrixField, ScalarField
from thermovisco.integrator import FieldState, Forcing
from thermovisco.materials import E4, HeatCapacityModel, functionals_for
from thermovisco.tensors import ElasticityTensors, contract_induced, sym_inner

__all__ = ["DiagnosticsRecord", "DiagnosticsEvaluator", "record"]


class DiagnosticsRecord(NamedTuple):
    t: float
    kinetic: float
    elastic: float
    thermal: float
    F: float
    S: float
    S_hat: float
    P_diff: float
    P_visc: float
    P_visc_lower: float
    P_src: float
    L1: float
    L2: float
    llogl: float
    lnsq: float
    u_norm: float
    # ln^2(theta + M)-weighted gradient terms of the corner inequality
    T1: float
    T2: float
    v_l2sq: float
    v_l1: float
    theta_min: float
    int_theta: float

    @property
    def productions(self) -> tuple[float, ...]:
        return (self.P_diff, self.P_visc, self.P_src, self.L1, self.L2)


class DiagnosticsEvaluator:
    """Evaluates every integral functional on the solver's own operators and quadrature.

    Gradient functionals of the temperature go through the edge-based Dirichlet form, so
    P_diff is exactly the entropy produced by the discrete Neumann Laplacian.
    """

    def __init__(
        self,
        operators: GridOperators,
        tensors: ElasticityTensors,
        model: HeatCapacityModel,
        diffusivity: float,
        forcing: Forcing,
        log_shift: float = E4,
    ):
        self.operators = operators
        self.grid = operators.grid
        self.tensors = tensors
        self.model = model
        self.functionals = functionals_for(model, log_shift)
        self.diffusivity = diffusivity
        self.forcing = forcing
        self.log_shift = log_shift

    def strain(self, state: FieldState) -> tuple[MatrixField, ScalarField]:
        """Symmetric velocity gradient and its pointwise Frobenius norm."""
        e = self.operators.sym_grad(state.v)
        return e, np.sqrt(np.maximum(sym_inner(e, e), 0.0))

    def record(self, state: FieldState) -> DiagnosticsRecord:
        ops = self.operators
        integrate = self.grid.integrate
        theta = state.theta
        log_shift = self.log_shift
        diffusivity = self.diffusivity

        e_u = ops.sym_grad(state.u)
        e_v, s = self.strain(state)
        s2 = s**2

        kinetic = 0.5 * integrate(np.sum(state.v**2, axis=-1))
        elastic = 0.5 * integrate(sym_inner(contract_induced(self.tensors.elasticity_matrix, e_u), e_u))
        thermal = integrate(self.functionals.k(theta))

        dissipation = sym_inner(contract_induced(self.tensors.viscosity_matrix, e_v), e_v)
        g = self.forcing.g(state.t, self.grid)

        ln_e = np.log(theta + np.e) ** 2
        ln_m = np.log(theta + log_shift) ** 2

        return DiagnosticsRecord(
            t=float(state.t),
            kinetic=kinetic,
            elastic=elastic,
            thermal=thermal,
            F=kinetic + elastic + thermal,
            S=integrate(self.functionals.ell(theta)),
            S_hat=integrate(self.functionals.ell_hat(theta)),
            P_diff=diffusivity * ops.dirichlet_form(theta, _entropy_weight),
            P_visc=integrate(dissipation / theta),
            P_visc_lower=self.tensors.k_viscosity * integrate(s2 / theta),
            P_src=integrate(g / theta),
            L1=diffusivity * ops.dirichlet_form(theta, _midpoint(lambda x: np.log(x + np.e) ** 2 / (x + 1.0) ** 2)),
            L2=integrate(ln_e * s2 / (theta + 1.0)),
            llogl=integrate(s * np.log(s + np.e)),
            lnsq=integrate(np.log(theta) ** 2),
            u_norm=float(np.sqrt(integrate(np.sum(state.u**2, axis=-1)))),
            T1=ops.dirichlet_form(
                theta, _midpoint(lambda x: np.log(x + log_shift) ** 2 / (x + log_shift) ** 2)
            ),
            T2=integrate(ln_m * s2 / (theta + log_shift)),
            v_l2sq=2.0 * kinetic,
            v_l1=integrate(np.sqrt(np.sum(state.v**2, axis=-1))),
            theta_min=float(np.min(theta)),
            int_theta=integrate(theta),
        )


def _entropy_weight(a: npt.NDArray, b: npt.NDArray) -> npt.NDArray:
    # (1/a - 1/b)(b - a) = (b - a)^2 / (a b)
    return 1.0 / (a * b)


def _midpoint(phi):
    return lambda a, b: phi(0.5 * (a + b))


def record(
    state: FieldState,
    operators: GridOperators,
    tensors: ElasticityTensors,
    model: HeatCapacityModel,
    diffusivity: float,
    forcing: Forcing,
    log_shift: float = E4,
) -> DiagnosticsRecord:
    return DiagnosticsEvaluator(operators, tensors, model, diffusivity, forcing, log_shift).record(state)
