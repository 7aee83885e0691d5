from typing import NamedTuple, Optional

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp
import structlog

from thermovisco.grid import (
    GridOperators,
    MatrixField,
    ScalarField,
    VectorField,
    solve_spd,
)
from thermovisco.instrumentators import SolverInstrumentator
from thermovisco.integrator.config import KindHeatCapacityCoupling, SolverConfig
from thermovisco.integrator.errors import (
    CouplingError,
    PositivityBoundError,
    PositivityGuardError,
    StepFailedError,
    StepRejectedError,
)
from thermovisco.integrator.forcing import Forcing
from thermovisco.integrator.state import FieldState
from thermovisco.materials import (
    ConstantHeatCapacity,
    HeatCapacityModel,
    functionals_for,
)
from thermovisco.tensors import ElasticityTensors, contract_induced, sym_inner

__all__ = [
    "SolveOutcome",
    "StepReport",
    "TimeIntegrator",
    "displacement_step",
]

log = structlog.stdlib.get_logger("integrator")

# Below this relative temperature change the secant heat capacity is taken at the midpoint.
_SECANT_MIDPOINT_THRESHOLD = 1e-6
_MATRIX_CACHE_SIZE = 8


class SolveOutcome(NamedTuple):
    field: npt.NDArray[np.float64]
    iterations: int


class StepReport(NamedTuple):
    t: float
    dt: float
    velocity_iterations: int
    temperature_iterations: int
    coupling_iterations: int
    rejected: int
    # dt * int f . v_new, dt * int g, dt * eps ||(-lap_d)^m v_new||^2
    work_f: float
    work_g: float
    eps_dissipation: float
    theta_min: float


def displacement_step(state: FieldState, v_new: VectorField, dt: float) -> VectorField:
    return state.u + dt * v_new


class TimeIntegrator:
    """Semi-implicit stepper for the regularized Kelvin-Voigt thermoviscoelastic system.

    One instance owns the assembled operators of one scenario; steps are sequential
    and a failed attempt never mutates the caller's state.
    """

    def __init__(
        self,
        operators: GridOperators,
        tensors: ElasticityTensors,
        model_eps: HeatCapacityModel,
        diffusivity: float,
        forcing: Forcing,
        config: SolverConfig,
        instrumentator: Optional[SolverInstrumentator] = None,
    ):
        self.operators = operators
        self.grid = operators.grid
        self.tensors = tensors
        self.model_eps = model_eps
        self.functionals = functionals_for(model_eps)
        self.diffusivity = diffusivity
        self.forcing = forcing
        self.config = config
        self.instrumentator = instrumentator or SolverInstrumentator("default")

        self.dt_next = config.dt0

        self._viscous = operators.tensor_stiffness(tensors.viscosity_matrix)
        self._elastic = operators.tensor_stiffness(tensors.elasticity_matrix)
        self._coupling_field = np.broadcast_to(
            tensors.coupling.to_storage(), self.grid.shape + (3,)
        )

        self._regularization: Optional[sp.csr_matrix] = None
        if config.eps_reg > 0:
            negative_laplacian = -operators.vector_laplacian_dirichlet
            half = sp.identity(negative_laplacian.shape[0], format="csr")
            for _ in range(config.m):
                half = (half @ negative_laplacian).tocsr()
            self._regularization = (
                self.grid.hx * self.grid.hy * (half.T @ half)
            ).tocsr()

        self._velocity_matrices: dict[float, sp.csr_matrix] = {}
        self._iterate_coupling = tensors.has_coupling or (
            config.heat_capacity == KindHeatCapacityCoupling.SECANT
            and not isinstance(model_eps, ConstantHeatCapacity)
        )

    # Pointwise quantities

    def strain_rate_terms(self, v_new: VectorField) -> tuple[MatrixField, ScalarField, ScalarField]:
        """Symmetric gradient e, exchange density b = <B, e> and dissipation q = <D:e, e>."""
        e = self.operators.sym_grad(v_new)
        b = sym_inner(self._coupling_field, e)
        q = sym_inner(contract_induced(self.tensors.viscosity_matrix, e), e)
        return e, b, q

    def heat_capacity(self, theta: ScalarField, theta_new: Optional[ScalarField] = None) -> ScalarField:
        kappa = np.asarray(self.model_eps.kappa(theta))
        if (
            theta_new is None
            or self.config.heat_capacity == KindHeatCapacityCoupling.LAGGED
            or isinstance(self.model_eps, ConstantHeatCapacity)
        ):
            return kappa

        delta = theta_new - theta
        small = np.abs(delta) <= _SECANT_MIDPOINT_THRESHOLD * np.maximum(theta, 1.0)
        secant = np.empty_like(theta)
        secant[small] = self.model_eps.kappa(0.5 * (theta[small] + theta_new[small]))
        large = ~small
        if np.any(large):
            secant[large] = (
                self.functionals.k(theta_new[large]) - self.functionals.k(theta[large])
            ) / delta[large]
        return secant

    # Sub-steps

    def velocity_matrix(self, dt: float) -> sp.csr_matrix:
        matrix = self._velocity_matrices.get(dt)
        if matrix is not None:
            return matrix

        ops = self.operators
        system = ops.vector_mass + dt * self._viscous + dt**2 * self._elastic
        if self._regularization is not None:
            system = system + dt * self.config.eps_reg * self._regularization

        # Dirichlet elimination: identity rows and columns on boundary nodes.
        matrix = (ops.vector_interior @ system @ ops.vector_interior + ops.vector_boundary).tocsr()

        if len(self._velocity_matrices) >= _MATRIX_CACHE_SIZE:
            self._velocity_matrices.clear()
        self._velocity_matrices[dt] = matrix
        return matrix

    def velocity_step(
        self,
        state: FieldState,
        dt: float,
        theta: Optional[ScalarField] = None,
        f: Optional[VectorField] = None,
        x0: Optional[VectorField] = None,
    ) -> SolveOutcome:
        """Implicit viscous update with the elastic force taken at u + dt v_new.

        (W + dt K_D + dt^2 K_C + dt eps W (-lap_d)^2m) v_new
            = W v - dt K_C u + dt G^T W_m (theta B) + dt W f
        """
        ops = self.operators
        theta = state.theta if theta is None else theta
        if f is None:
            f = self.forcing.f(state.t + dt, self.grid)

        thermal_stress = theta[..., None] * self._coupling_field
        rhs = (
            ops.vector_mass @ ops.flatten_vector(state.v + dt * f)
            - dt * (self._elastic @ ops.flatten_vector(state.u))
            + dt * (ops.sym_grad_matrix.T @ (ops.matrix_mass @ ops.flatten_matrix(thermal_stress)))
        )
        rhs = ops.vector_interior @ rhs

        result = solve_spd(
            self.velocity_matrix(dt),
            rhs,
            rtol=self.config.cg_rtol,
            x0=None if x0 is None else ops.flatten_vector(x0),
        )
        return SolveOutcome(ops.unflatten_vector(result.x), result.iterations)

    def temperature_step(
        self,
        state: FieldState,
        v_new: VectorField,
        dt: float,
        kappa: Optional[ScalarField] = None,
        g: Optional[ScalarField] = None,
        x0: Optional[ScalarField] = None,
    ) -> SolveOutcome:
        """[kappa/dt + b - D lap_N] theta_new = kappa theta/dt + q + g, weighted by the quadrature."""
        ops = self.operators
        kappa = self.heat_capacity(state.theta) if kappa is None else kappa
        if g is None:
            g = self.forcing.g(state.t + dt, self.grid)

        _, b, q = self.strain_rate_terms(v_new)
        weights = ops.weights
        diagonal = weights * (kappa / dt + b).ravel()
        if np.any(diagonal <= 0):
            node = np.unravel_index(int(np.argmin(diagonal)), self.grid.shape)
            raise PositivityGuardError(dt, self.adaptive_dt(state, v_new, kappa), tuple(int(i) for i in node))

        matrix = (sp.diags(diagonal) - self.diffusivity * ops.weighted_laplacian_neumann).tocsr()
        rhs = weights * (kappa * state.theta / dt + q + g).ravel()

        result = solve_spd(
            matrix,
            rhs,
            rtol=self.config.cg_rtol,
            x0=None if x0 is None else x0.ravel(),
        )
        return SolveOutcome(result.x.reshape(self.grid.shape), result.iterations)

    def adaptive_dt(
        self, state: FieldState, v_new: VectorField, kappa: Optional[ScalarField] = None
    ) -> float:
        """Largest dt <= dt_max with dt <= safety * kappa / max(0, -b) at every node.

        Raises PositivityBoundError naming the limiting node when that bound is below dt_min.
        """
        kappa = self.heat_capacity(state.theta) if kappa is None else kappa
        _, b, _ = self.strain_rate_terms(v_new)
        bound = positivity_bound(kappa, b, self.config)
        if bound < self.config.dt_min:
            node = self._limiting_node(kappa, b)
            log.error("positivity bound below dt_min", t=state.t, bound=bound, node=node)
            raise PositivityBoundError(state.t, bound, node, self.config.dt_min)
        return bound

    def _limiting_node(self, kappa: ScalarField, b: ScalarField) -> tuple[int, int]:
        node = np.unravel_index(int(np.argmin(kappa / np.maximum(-b, 1e-300))), self.grid.shape)
        return tuple(int(i) for i in node)

    # Full step

    def step(self, state: FieldState, max_dt: Optional[float] = None) -> tuple[FieldState, StepReport]:
        clipped = max_dt is not None and max_dt < self.dt_next
        dt = min(self.dt_next, max_dt) if max_dt is not None else self.dt_next
        rejected = 0

        with self.instrumentator.watch() as watch:
            while True:
                try:
                    new_state, report = self._attempt(state, dt, rejected, watch)
                    break
                except StepRejectedError as ex:
                    rejected += 1
                    watch.register_rejection(type(ex).__name__)
                    log.info("step rejected", t=state.t, dt=dt, reason=ex.message, **ex.details)
                    dt = 0.5 * dt
                    if dt < self.config.dt_min:
                        raise StepFailedError("time step fell below dt_min", state.t, dt, ex)

        if rejected:
            # Do not grow straight back into the rejected range.
            self.dt_next = dt
        elif not clipped:
            self.dt_next = min(self.config.dt_max, dt * self.config.dt_growth)
        return new_state, report

    def _attempt(
        self, state: FieldState, dt: float, rejected: int, watch: SolverInstrumentator.WatchContainer
    ) -> tuple[FieldState, StepReport]:
        t_new = state.t + dt
        f = self.forcing.f(t_new, self.grid)
        g = self.forcing.g(t_new, self.grid)

        theta_iterate = state.theta
        v_new = state.v
        velocity_iterations = temperature_iterations = 0
        change = np.inf

        for coupling_iteration in range(1, self.config.coupling_max_iterations + 1):
            velocity = self.velocity_step(state, dt, theta=theta_iterate, f=f, x0=v_new)
            v_new = velocity.field
            velocity_iterations += velocity.iterations
            watch.register_solve("velocity", velocity.iterations)

            kappa = self.heat_capacity(
                state.theta, None if coupling_iteration == 1 else theta_iterate
            )
            allowed = self.adaptive_dt(state, v_new, kappa)
            if dt > allowed:
                _, b, _ = self.strain_rate_terms(v_new)
                raise PositivityGuardError(dt, allowed, self._limiting_node(kappa, b))

            temperature = self.temperature_step(state, v_new, dt, kappa=kappa, g=g, x0=theta_iterate)
            temperature_iterations += temperature.iterations
            watch.register_solve("temperature", temperature.iterations)

            change = float(np.max(np.abs(temperature.field - theta_iterate)))
            theta_iterate = temperature.field
            if not self._iterate_coupling:
                break
            if change <= self.config.coupling_tol * float(np.max(theta_iterate)):
                break
        else:
            raise CouplingError(dt, change, self.config.coupling_max_iterations)

        theta_new = theta_iterate
        if np.min(theta_new) <= 0:
            node = np.unravel_index(int(np.argmin(theta_new)), self.grid.shape)
            raise PositivityGuardError(dt, 0.5 * dt, tuple(int(i) for i in node))

        u_new = displacement_step(state, v_new, dt)

        report = StepReport(
            t=t_new,
            dt=dt,
            velocity_iterations=velocity_iterations,
            temperature_iterations=temperature_iterations,
            coupling_iterations=coupling_iteration,
            rejected=rejected,
            work_f=dt * self.grid.integrate(np.sum(f * v_new, axis=-1)),
            work_g=dt * self.grid.integrate(g),
            eps_dissipation=dt * self.regularization_energy(v_new),
            theta_min=float(np.min(theta_new)),
        )
        return FieldState(u_new, v_new, theta_new, t_new), report

    def regularization_energy(self, v: VectorField) -> float:
        """eps ||(-lap_d)^m v||^2 under the interior quadrature weight."""
        if self._regularization is None:
            return 0.0
        flat = self.operators.flatten_vector(v)
        return self.config.eps_reg * float(flat @ (self._regularization @ flat))


def positivity_bound(kappa: ScalarField, b: ScalarField, config: SolverConfig) -> float:
    cooling = np.maximum(-np.asarray(b), 0.0)
    if not np.any(cooling > 0):
        return config.dt_max

    positive = cooling > 0
    bound = float(np.min(config.theta_safety * np.asarray(kappa)[positive] / cooling[positive]))
    return min(config.dt_max, bound)
