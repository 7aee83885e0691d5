import csv

import numpy as np
import pytest

from thermovisco.runner import ScenarioRegistry, run

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def relaxation(tmp_path_factory):
    output_dir = tmp_path_factory.mktemp("default-relaxation")
    manifest = run(ScenarioRegistry.from_local_yaml().get("default-relaxation"), output_dir)
    with open(output_dir / "diagnostics.csv", newline="") as fp:
        rows = list(csv.DictReader(fp))
    return manifest, {name: np.array([float(row[name]) for row in rows]) for name in rows[0]}


def test_invariants_hold_at_every_step(relaxation):
    manifest, columns = relaxation

    assert manifest.passed
    assert all(not entry["violations"] for entry in manifest.acceptance_log)
    assert np.all(np.diff(columns["F"]) <= 1e-9 * columns["F"][0])
    assert columns["F"][0] - columns["F"][-1] > 0
    assert np.all(np.diff(columns["S"]) >= -1e-8 * (1.0 + np.abs(columns["S"][1:])))
    assert columns["theta_min"].min() > 0


def test_stabilization(relaxation):
    manifest, _ = relaxation
    summary = manifest.summary
    first, last = summary["windows"]

    assert (first["t"], last["t"]) == (1.0, 49.0)
    assert last["W_ut"] <= 0.01 * first["W_ut"]
    assert summary["u_norm_final"] <= 0.05 * summary["u_norm_max"]
    assert summary["theta_deviation_final"] <= 0.02 * summary["theta_deviation_initial"]


def test_limit_matches_the_energy_budget(relaxation):
    limits = relaxation[0].summary["limits"]

    assert limits["converged"]
    assert limits["theta_inf"] == pytest.approx(limits["theta_hat"], rel=0.01)


@pytest.mark.parametrize("name", ["pure-heat", "debye", "pulse"])
def test_built_in_scenarios_pass(name, tmp_path):
    manifest = run(ScenarioRegistry.from_local_yaml().get(name), tmp_path)

    assert manifest.passed
    assert manifest.summary["theta_min"] > 0
