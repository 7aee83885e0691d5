import numpy as np
import pytest

from thermovisco.materials import (
    ConstantHeatCapacity,
    DebyeLikeHeatCapacity,
    DomainError,
    PowerGrowthHeatCapacity,
    RegularizedHeatCapacity,
    SlowDecayHeatCapacity,
    TabulatedHeatCapacity,
    regularize_kappa,
)


class TestKappa:
    @pytest.mark.parametrize(
        ("model", "xi", "expected"),
        [
            (ConstantHeatCapacity(2.0), 5.0, 2.0),
            (PowerGrowthHeatCapacity(1.0, 0.5), 3.0, 2.0),
            (DebyeLikeHeatCapacity(1.0, 1.0), 1.0, 0.5),
            (DebyeLikeHeatCapacity(2.0, 1.0), 0.0, 0.0),
            (SlowDecayHeatCapacity(1.0, 0.5), 0.0, 1.0),
            (TabulatedHeatCapacity([0.0, 1.0, 2.0], [0.0, 1.0, 3.0]), 1.5, 2.0),
            (TabulatedHeatCapacity([0.0, 1.0, 2.0], [0.0, 1.0, 3.0]), 10.0, 3.0),
        ],
    )
    def test_values(self, model, xi, expected):
        assert model.kappa(xi) == pytest.approx(expected)

    def test_array_shape(self):
        xi = np.linspace(0.0, 2.0, 12).reshape(3, 4)

        assert DebyeLikeHeatCapacity(1.0, 1.0).kappa(xi).shape == (3, 4)

    def test_scalar_is_float(self):
        assert isinstance(ConstantHeatCapacity().kappa(1.0), float)

    @pytest.mark.parametrize("xi", [-1.0, np.array([1.0, -1e-3]), float("nan")])
    def test_rejects_negative(self, xi):
        with pytest.raises(DomainError):
            ConstantHeatCapacity().kappa(xi)


@pytest.mark.parametrize(
    "factory",
    [
        lambda: ConstantHeatCapacity(0.0),
        lambda: PowerGrowthHeatCapacity(1.0, -0.5),
        lambda: DebyeLikeHeatCapacity(1.0, 0.0),
        lambda: SlowDecayHeatCapacity(1.0, 1.0),
        lambda: TabulatedHeatCapacity([0.0], [1.0]),
        lambda: TabulatedHeatCapacity([0.5, 1.0], [1.0, 1.0]),
        lambda: TabulatedHeatCapacity([0.0, 1.0, 1.0], [1.0, 1.0, 1.0]),
        lambda: TabulatedHeatCapacity([0.0, 1.0], [1.0, 0.0]),
    ],
)
def test_rejects_parameters(factory):
    with pytest.raises(DomainError):
        factory()


@pytest.mark.parametrize(
    ("model", "expected"),
    [
        (ConstantHeatCapacity(), False),
        (PowerGrowthHeatCapacity(1.0, 1.0), False),
        (DebyeLikeHeatCapacity(1.0, 1.0), True),
        (SlowDecayHeatCapacity(1.0, 0.5), False),
        (TabulatedHeatCapacity([0.0, 1.0], [0.0, 1.0]), True),
    ],
)
def test_ell_finite_at_zero(model, expected):
    assert model.ell_finite_at_zero == expected


class TestTail:
    def test_slow_decay(self):
        tail = SlowDecayHeatCapacity(1.0, 0.5).tail()

        assert not tail.liminf_positive
        assert tail.log_unbounded
        assert not tail.heuristic

    def test_tabulated_is_heuristic(self):
        tail = TabulatedHeatCapacity([0.0, 1.0], [0.5, 1.0]).tail()

        assert tail.heuristic
        assert tail.liminf_positive
        assert not tail.unbounded
        assert tail.log_unbounded


class TestRegularization:
    def test_bounded_laws_are_returned_unchanged(self):
        model = ConstantHeatCapacity(1.0)

        assert regularize_kappa(model, 1e-3) is model

    def test_debye(self):
        model = regularize_kappa(DebyeLikeHeatCapacity(1.0, 1.0), 1e-3)

        assert isinstance(model, RegularizedHeatCapacity)
        assert model.kappa(0.0) == pytest.approx(1e-3)
        assert model.kappa(1.0) == pytest.approx(0.5)
        assert not model.ell_finite_at_zero
        assert model.tail().liminf_positive

    def test_crossing_is_a_breakpoint(self):
        model = regularize_kappa(DebyeLikeHeatCapacity(1.0, 1.0), 1e-3)
        crossing = (1e-3 / (1.0 - 1e-3)) ** (1.0 / 3.0)

        assert any(abs(b - crossing) < 1e-12 for b in model.breakpoints())
        assert 1.0 in model.breakpoints()

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.1])
    def test_rejects_eps(self, eps):
        with pytest.raises(DomainError):
            regularize_kappa(DebyeLikeHeatCapacity(1.0, 1.0), eps)
