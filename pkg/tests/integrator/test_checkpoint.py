import numpy as np
import pytest
import yaml

from thermovisco.grid import Grid, SnapshotFormatError
from thermovisco.integrator import CHECKPOINT_FORMAT, read_checkpoint, write_checkpoint


def test_round_trip_is_bit_exact(tmp_path, grid, moving_state):
    state = moving_state._replace(u=0.1 * moving_state.v, t=1.0 / 3.0)

    path = write_checkpoint(
        tmp_path / "checkpoint-000012.yml", grid, state, dt=0.0123456789, step=12, metadata={"violations": 0}
    )

    sidecar = yaml.safe_load(path.read_text())
    assert sidecar["format"] == CHECKPOINT_FORMAT
    assert sidecar["snapshot"] == "checkpoint-000012.bin"

    checkpoint = read_checkpoint(path, grid)
    assert checkpoint.step == 12
    assert checkpoint.dt == 0.0123456789
    assert checkpoint.state.t == 1.0 / 3.0
    assert np.array_equal(checkpoint.state.u, state.u)
    assert np.array_equal(checkpoint.state.v, state.v)
    assert np.array_equal(checkpoint.state.theta, state.theta)
    assert checkpoint.metadata == {"violations": 0}
    assert checkpoint.history is None


def test_temperature_history(tmp_path, grid, moving_state):
    history = [moving_state.theta, 2.0 * moving_state.theta, moving_state.theta + 1.0 / 3.0]

    path = write_checkpoint(tmp_path / "checkpoint-000003.yml", grid, moving_state, dt=0.01, step=3, history=history)

    assert yaml.safe_load(path.read_text())["history"] == "checkpoint-000003.theta.bin"
    checkpoint = read_checkpoint(path, grid)
    assert checkpoint.history.shape == (3, *grid.shape)
    for stored, theta in zip(checkpoint.history, history):
        assert np.array_equal(stored, theta)


def test_rejects_other_grid(tmp_path, grid, moving_state):
    path = write_checkpoint(tmp_path / "checkpoint.yml", grid, moving_state, dt=0.01, step=1)

    with pytest.raises(SnapshotFormatError, match="expected 5"):
        read_checkpoint(path, Grid(10, 12))


def test_rejects_foreign_sidecar(tmp_path, grid):
    path = tmp_path / "checkpoint.yml"
    path.write_text("format: something-else\n")

    with pytest.raises(SnapshotFormatError):
        read_checkpoint(path, grid)
