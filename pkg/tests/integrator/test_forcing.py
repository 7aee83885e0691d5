import numpy as np
import pytest
from pydantic import ValidationError

from thermovisco.integrator import (
    ManufacturedForcing,
    PulseForcing,
    PulseForcingConfig,
    ZeroForcing,
    ZeroForcingConfig,
)


@pytest.fixture
def pulse():
    return PulseForcing((1.0, 0.0), 2.0, (0.5, 0.5), 0.15, 0.0, 1.0)


class TestPulse:
    @pytest.mark.parametrize(("t", "expected"), [(0.0, 0.0), (0.5, 1.0), (0.25, 0.5), (1.0, 0.0), (3.0, 0.0)])
    def test_envelope(self, pulse, t, expected):
        assert pulse.envelope(t) == pytest.approx(expected, abs=1e-15)

    def test_fields(self, grid, pulse):
        f = pulse.f(0.5, grid)
        g = pulse.g(0.5, grid)

        assert f.shape == grid.shape + (2,)
        assert np.all(f[grid.boundary] == 0)
        assert np.all(f[..., 1] == 0)
        assert np.max(g) <= 2.0
        assert np.min(g) > 0

    def test_switched_off(self, grid, pulse):
        assert np.all(pulse.g(2.0, grid) == 0)

    def test_norms(self, grid, pulse):
        norms = pulse.norms(grid, 2.0)

        assert norms.f_l2_time > 0
        assert norms.g_l1_time == pytest.approx(
            0.5 * 2.0 * grid.integrate(pulse._profile(grid)), rel=1e-4
        )

    def test_validate(self, grid, pulse):
        pulse.validate(grid, 2.0)


def test_zero(grid):
    forcing = ZeroForcing()

    assert forcing.is_zero
    assert np.all(forcing.f(1.0, grid) == 0)
    assert forcing.norms(grid, 10.0) == (0.0, 0.0)


class TestManufactured:
    def test_masks_boundary(self, grid):
        forcing = ManufacturedForcing(
            f_source=lambda t, xx, yy: np.stack([xx + t, yy], axis=-1),
            g_source=lambda t, xx, yy: 1.0 + xx * yy,
        )

        f = forcing.f(0.5, grid)

        assert np.all(f[grid.boundary] == 0)
        assert f[3, 4, 0] == pytest.approx(grid.xx[3, 4] + 0.5)
        assert forcing.g(0.0, grid) == pytest.approx(1.0 + grid.xx * grid.yy)

    def test_rejects_negative_heat_source(self, grid):
        forcing = ManufacturedForcing(
            f_source=lambda t, xx, yy: np.zeros(xx.shape + (2,)),
            g_source=lambda t, xx, yy: np.cos(t) * np.ones_like(xx),
        )

        with pytest.raises(ValueError, match="negative"):
            forcing.validate(grid, 3.0)


class TestConfig:
    def test_zero(self):
        assert isinstance(ZeroForcingConfig().build(), ZeroForcing)

    def test_pulse(self):
        config = PulseForcingConfig(kind="pulse", f_amplitude=(1.0, 0.0), g_amplitude=1.0, t_off=2.0)

        forcing = config.build()

        assert isinstance(forcing, PulseForcing)
        assert forcing.t_off == 2.0

    @pytest.mark.parametrize(
        "values",
        [
            {"kind": "pulse", "t_on": 1.0, "t_off": 1.0},
            {"kind": "pulse", "g_amplitude": -1.0},
            {"kind": "pulse", "amplitude": 1.0},
        ],
    )
    def test_rejects(self, values):
        with pytest.raises(ValidationError):
            PulseForcingConfig(**values)
