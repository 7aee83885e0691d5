import numpy as np
import pytest

from thermovisco.materials import (
    E4,
    ConstantHeatCapacity,
    DebyeLikeHeatCapacity,
    DomainError,
    ell_hat_k_slack,
    ell_m_sandwich_slack,
    functionals_for,
    interpolation_slack,
    log_sqrt_slack,
    log_square_slack,
)

XI = np.logspace(-3, 4, 57)


def test_log_sqrt_slack():
    sigma = np.logspace(0, 8, 81)

    assert np.all(log_sqrt_slack(sigma) >= -1e-15)
    # equality at sigma = e^2
    assert log_sqrt_slack(np.e**2) == pytest.approx(0.0, abs=1e-14)


def test_log_sqrt_slack_domain():
    with pytest.raises(DomainError):
        log_sqrt_slack([0.5, 2.0])


def test_interpolation_slack():
    xi, eta = np.meshgrid(np.logspace(0.5, 6, 40), np.logspace(np.log10(np.e**2), 6, 40))

    assert np.all(interpolation_slack(np.maximum(xi, np.e), eta) >= 0)


@pytest.mark.parametrize(("xi", "eta"), [(1.0, 10.0), (3.0, 5.0)])
def test_interpolation_slack_domain(xi, eta):
    with pytest.raises(DomainError):
        interpolation_slack(xi, eta)


def test_log_square_slack():
    assert np.all(log_square_slack(XI) >= 0)
    assert log_square_slack(0.0) == pytest.approx(0.0, abs=1e-12)
    assert log_square_slack(0.0, log_shift=E4 / 2) < 0


@pytest.mark.parametrize("model", [ConstantHeatCapacity(), DebyeLikeHeatCapacity(1.0, 1.0)])
def test_ell_m_sandwich(model):
    functionals = functionals_for(model)

    lower, upper = ell_m_sandwich_slack(functionals, XI[XI > 1e-2], 20.0)

    assert np.all(lower >= -1e-10)
    assert np.all(upper >= -1e-10)


@pytest.mark.parametrize("model", [ConstantHeatCapacity(), DebyeLikeHeatCapacity(1.0, 1.0)])
def test_ell_hat_k(model):
    assert np.all(ell_hat_k_slack(functionals_for(model), XI) >= -1e-12)
