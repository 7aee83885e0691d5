from unittest import mock

import numpy as np
import pytest
from structlog.testing import capture_logs

from thermovisco.grid import Grid, GridOperators
from thermovisco.integrator import (
    FieldState,
    KindHeatCapacityCoupling,
    PositivityBoundError,
    PositivityGuardError,
    SolverConfig,
    StepFailedError,
    TimeIntegrator,
    displacement_step,
)
from thermovisco.integrator.stepper import positivity_bound
from thermovisco.materials import (
    ConstantHeatCapacity,
    DebyeLikeHeatCapacity,
    functionals_for,
    regularize_kappa,
)
from thermovisco.tensors import ElasticityTensors, SymMatrix2, contract4_field, isotropic_tensor


def _energy(integrator: TimeIntegrator, state: FieldState) -> float:
    grid, ops = integrator.grid, integrator.operators
    u = ops.flatten_vector(state.u)
    kinetic = 0.5 * grid.integrate(np.sum(state.v**2, axis=-1))
    elastic = 0.5 * float(u @ (integrator._elastic @ u))
    thermal = grid.integrate(integrator.functionals.k(state.theta))
    return kinetic + elastic + thermal


def _distance(a: FieldState, b: FieldState) -> float:
    return max(
        float(np.max(np.abs(a.u - b.u))),
        float(np.max(np.abs(a.v - b.v))),
        float(np.max(np.abs(a.theta - b.theta))),
    )


def test_displacement_step(grid, moving_state):
    u_new = displacement_step(moving_state, moving_state.v, 0.1)

    assert u_new == pytest.approx(0.1 * moving_state.v)


def test_rest_state_is_stationary(grid, integrator):
    state = FieldState.at_rest(grid, theta=2.0)

    new_state, report = integrator.step(state)

    assert np.max(np.abs(new_state.v)) == pytest.approx(0.0, abs=1e-13)
    assert new_state.theta == pytest.approx(state.theta, rel=1e-12)
    assert report.t == pytest.approx(0.01)
    assert report.work_f == 0.0
    assert report.work_g == 0.0


def test_energy_identity(integrator, moving_state):
    state = moving_state
    ops = integrator.operators

    for _ in range(5):
        new_state, report = integrator.step(state)

        jump = new_state.v - state.v
        v_new = ops.flatten_vector(new_state.v)
        # numerical dissipation of the backward Euler step
        dissipation = 0.5 * integrator.grid.integrate(np.sum(jump**2, axis=-1)) + 0.5 * report.dt**2 * float(
            v_new @ (integrator._elastic @ v_new)
        )

        change = _energy(integrator, new_state) - _energy(integrator, state)
        assert change == pytest.approx(-dissipation, abs=1e-9 * _energy(integrator, moving_state))
        assert report.coupling_iterations > 1
        state = new_state


def test_temperature_stays_positive(integrator, moving_state):
    state = moving_state

    for _ in range(20):
        state, report = integrator.step(state)
        assert report.theta_min > 0

    assert state.t > 0.5


class TestVelocityStep:
    def test_matches_dense_solve(self, forcing):
        grid = Grid(8, 8)
        operators = GridOperators(grid)
        viscosity, elasticity = isotropic_tensor(0.5, 1.5), isotropic_tensor(1.0, 2.0)
        tensors = ElasticityTensors.build(viscosity, elasticity, SymMatrix2(0.4, 0.2, 0.1))
        integrator = TimeIntegrator(operators, tensors, ConstantHeatCapacity(1.0), 1.0, forcing, SolverConfig())
        dt = 0.05

        rng = np.random.default_rng(31)
        u, v = rng.normal(size=(2, *grid.shape, 2))
        u[grid.boundary] = 0.0
        v[grid.boundary] = 0.0
        theta = 1.0 + 0.5 * rng.random(grid.shape)
        state = FieldState(u, v, theta, 0.0)

        def apply(w):
            return (
                w
                - dt * operators.div(contract4_field(viscosity, operators.sym_grad(w)))
                - dt**2 * operators.div(contract4_field(elasticity, operators.sym_grad(w)))
            )

        dofs = np.flatnonzero(np.tile(grid.interior.ravel(), 2))
        dense = np.zeros((dofs.size, dofs.size))
        for column, dof in enumerate(dofs):
            unit = np.zeros(2 * grid.size)
            unit[dof] = 1.0
            dense[:, column] = operators.flatten_vector(apply(operators.unflatten_vector(unit)))[dofs]

        thermal_stress = theta[..., None] * tensors.coupling.to_storage()
        rhs = v + dt * (
            operators.div(contract4_field(elasticity, operators.sym_grad(u))) - operators.div(thermal_stress)
        )
        expected = np.linalg.solve(dense, operators.flatten_vector(rhs)[dofs])

        v_new = integrator.velocity_step(state, dt).field

        assert np.max(np.abs(operators.flatten_vector(v_new)[dofs] - expected)) <= 1e-9
        assert v_new[grid.boundary] == pytest.approx(0.0, abs=1e-14)


class TestTemperatureStep:
    def test_conserves_heat_without_sources(self, grid, integrator, moving_state):
        kappa = np.random.default_rng(37).uniform(0.5, 2.0, size=grid.shape)
        at_rest = np.zeros_like(moving_state.v)

        theta_new = integrator.temperature_step(
            moving_state, at_rest, 0.05, kappa=kappa, g=grid.scalar()
        ).field

        assert grid.integrate(kappa * theta_new) == pytest.approx(
            grid.integrate(kappa * moving_state.theta), rel=1e-9
        )
        assert np.max(theta_new) < np.max(moving_state.theta)

    def test_heat_budget_with_sources(self, grid, integrator, moving_state):
        dt = 0.02
        g = grid.scalar(0.3)
        _, b, q = integrator.strain_rate_terms(moving_state.v)

        theta_new = integrator.temperature_step(moving_state, moving_state.v, dt, g=g).field

        change = grid.integrate(integrator.heat_capacity(moving_state.theta) * (theta_new - moving_state.theta))
        assert change == pytest.approx(dt * grid.integrate(q + g - b * theta_new), abs=1e-10)

    def test_pointwise_backward_euler_without_diffusion(
        self, grid, operators, tensors, heat_capacity, forcing, solver_config, moving_state
    ):
        integrator = TimeIntegrator(operators, tensors, heat_capacity, 0.0, forcing, solver_config)
        dt = 0.01
        g = grid.scalar(0.2)
        _, b, q = integrator.strain_rate_terms(moving_state.v)

        theta_new = integrator.temperature_step(moving_state, moving_state.v, dt, g=g).field

        assert np.any(b != 0)
        assert theta_new == pytest.approx((moving_state.theta + dt * (q + g)) / (1.0 + dt * b), rel=1e-11)

    def test_dissipation_without_exchange_only_heats(
        self, grid, operators, heat_capacity, forcing, solver_config, moving_state
    ):
        tensors = ElasticityTensors.build(
            isotropic_tensor(1.0, 1.0), isotropic_tensor(1.0, 1.0), SymMatrix2(0.0, 0.0, 0.0)
        )
        integrator = TimeIntegrator(operators, tensors, heat_capacity, 0.0, forcing, solver_config)

        theta_new = integrator.temperature_step(moving_state, moving_state.v, 0.05).field

        assert np.all(theta_new >= moving_state.theta - 1e-14)
        assert np.any(theta_new > moving_state.theta + 1e-6)


class TestStepControl:
    def test_growth(self, integrator, moving_state):
        _, report = integrator.step(moving_state)

        assert report.dt == pytest.approx(0.01)
        assert integrator.dt_next == pytest.approx(0.015)

    def test_clipped_step_keeps_dt(self, integrator, moving_state):
        _, report = integrator.step(moving_state, max_dt=0.004)

        assert report.dt == pytest.approx(0.004)
        assert integrator.dt_next == pytest.approx(0.01)

    def test_rejection_halves_dt(self, integrator, moving_state):
        attempt = integrator._attempt
        calls = []

        def flaky(*args):
            calls.append(args)
            if len(calls) == 1:
                raise PositivityGuardError(0.01, 0.006, (3, 4))
            return attempt(*args)

        with mock.patch.object(integrator, "_attempt", side_effect=flaky):
            with capture_logs() as cap_logs:
                _, report = integrator.step(moving_state)

        assert report.dt == pytest.approx(0.005)
        assert report.rejected == 1
        assert integrator.dt_next == pytest.approx(0.005)
        assert cap_logs[0]["event"] == "step rejected"
        assert cap_logs[0]["node"] == (3, 4)

    def test_fails_below_dt_min(self, operators, tensors, heat_capacity, forcing, moving_state):
        config = SolverConfig(dt0=0.01, dt_min=0.002, dt_max=0.05)
        integrator = TimeIntegrator(operators, tensors, heat_capacity, 1.0, forcing, config)

        with mock.patch.object(
            integrator, "_attempt", side_effect=PositivityGuardError(0.01, 0.0, (1, 1))
        ):
            with pytest.raises(StepFailedError) as exc_info:
                integrator.step(moving_state)

        assert exc_info.value.dt == pytest.approx(0.00125)
        assert exc_info.value.details["node"] == (1, 1)


class TestPositivityBound:
    def test_cooling(self):
        config = SolverConfig(theta_safety=0.5)

        bound = positivity_bound(np.array([1.0, 1.0, 4.0]), np.array([-2.0, 1.0, -4.0]), config)

        assert bound == pytest.approx(0.25)

    def test_no_cooling(self):
        config = SolverConfig(dt_max=0.05)

        assert positivity_bound(np.ones(3), np.array([0.0, 1.0, 2.0]), config) == 0.05

    def test_single_node(self):
        config = SolverConfig(theta_safety=0.5, dt_max=1.0)

        assert positivity_bound(np.array([1.0]), np.array([-10.0]), config) == pytest.approx(0.05)

    def test_bound_below_dt_min_names_the_node(self, operators, tensors, heat_capacity, forcing, moving_state):
        config = SolverConfig(dt0=0.01, dt_min=1e-3, dt_max=0.05)
        integrator = TimeIntegrator(operators, tensors, heat_capacity, 1.0, forcing, config)
        v_new = 1e4 * moving_state.v
        _, b, _ = integrator.strain_rate_terms(v_new)

        with capture_logs() as cap_logs:
            with pytest.raises(PositivityBoundError) as exc_info:
                integrator.adaptive_dt(moving_state, v_new)

        error = exc_info.value
        assert isinstance(error, StepFailedError)
        assert b[error.node] == np.min(b)
        assert error.bound == pytest.approx(0.5 / -np.min(b))
        assert error.bound < 1e-3
        assert error.details["node"] == error.node
        assert error.details["dt_min"] == 1e-3
        assert cap_logs[0]["event"] == "positivity bound below dt_min"

    def test_step_fails_without_halving(self, operators, tensors, heat_capacity, forcing, moving_state):
        config = SolverConfig(dt0=0.01, dt_min=1e-3, dt_max=0.05)
        integrator = TimeIntegrator(operators, tensors, heat_capacity, 1.0, forcing, config)

        with capture_logs() as cap_logs:
            with pytest.raises(PositivityBoundError):
                integrator.step(moving_state._replace(v=1e4 * moving_state.v))

        assert "step rejected" not in [entry["event"] for entry in cap_logs]

    def test_guard_rejects_large_step(self, integrator, moving_state):
        v_new = 100.0 * moving_state.v

        with pytest.raises(PositivityGuardError) as exc_info:
            integrator.temperature_step(moving_state, -v_new, 10.0)

        assert exc_info.value.allowed_dt < 10.0


class TestHeatCapacity:
    @pytest.fixture
    def heat_capacity(self):
        return regularize_kappa(DebyeLikeHeatCapacity(1.0, 1.0), 1e-3)

    @pytest.fixture
    def solver_config(self):
        return SolverConfig(heat_capacity=KindHeatCapacityCoupling.SECANT)

    def test_lagged_without_new_temperature(self, integrator, heat_capacity):
        theta = np.array([0.5, 2.0])

        assert integrator.heat_capacity(theta) == pytest.approx(heat_capacity.kappa(theta))

    def test_secant(self, integrator, heat_capacity):
        theta, theta_new = np.array([0.5, 2.0]), np.array([0.7, 1.0])
        k = functionals_for(heat_capacity).k

        secant = integrator.heat_capacity(theta, theta_new)

        assert secant == pytest.approx((k(theta_new) - k(theta)) / (theta_new - theta))

    def test_secant_midpoint(self, integrator, heat_capacity):
        theta = np.array([0.5, 2.0])

        secant = integrator.heat_capacity(theta, theta + 1e-9)

        assert secant == pytest.approx(heat_capacity.kappa(theta + 5e-10))

    def test_secant_energy_identity(self, integrator, moving_state):
        # f = g = 0: the secant capacity makes the thermal energy change exact
        new_state, report = integrator.step(moving_state)

        jump = new_state.v - moving_state.v
        v_new = integrator.operators.flatten_vector(new_state.v)
        dissipation = 0.5 * integrator.grid.integrate(np.sum(jump**2, axis=-1)) + 0.5 * report.dt**2 * float(
            v_new @ (integrator._elastic @ v_new)
        )

        change = _energy(integrator, new_state) - _energy(integrator, moving_state)
        assert change == pytest.approx(-dissipation, abs=1e-9 * _energy(integrator, moving_state))


class TestRegularization:
    @pytest.fixture
    def solver_config(self):
        return SolverConfig(eps_reg=1e-4, m=1)

    def test_energy_is_positive(self, integrator, moving_state):
        assert integrator.regularization_energy(moving_state.v) > 0
        assert integrator.regularization_energy(np.zeros_like(moving_state.v)) == 0.0

    def test_step_reports_dissipation(self, integrator, moving_state):
        _, report = integrator.step(moving_state)

        assert report.eps_dissipation > 0

    def test_velocity_matrix_is_cached(self, integrator):
        assert integrator.velocity_matrix(0.01) is integrator.velocity_matrix(0.01)


class TestTimeRefinement:
    @pytest.fixture
    def grid(self):
        return Grid(16, 16)

    @staticmethod
    def _run(operators, tensors, heat_capacity, forcing, state, dt, final_time=0.5):
        config = SolverConfig(dt0=dt, dt_max=dt, dt_growth=1.0)
        integrator = TimeIntegrator(operators, tensors, heat_capacity, 0.1, forcing, config)
        while state.t < final_time - 1e-9:
            state, report = integrator.step(state)
            assert report.rejected == 0
        return state

    def test_first_order_in_time(self, operators, soft_tensors, heat_capacity, forcing, smooth_state):
        coarse, medium, fine = (
            self._run(operators, soft_tensors, heat_capacity, forcing, smooth_state, dt) for dt in (0.02, 0.01, 0.005)
        )

        assert [coarse.t, medium.t, fine.t] == pytest.approx([0.5, 0.5, 0.5])
        assert _distance(coarse, medium) / _distance(medium, fine) == pytest.approx(2.0, rel=0.15)
