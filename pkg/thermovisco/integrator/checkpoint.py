from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import numpy as np
import numpy.typing as npt
import structlog
import yaml

from thermovisco.grid import Grid, ScalarField, SnapshotFormatError, read_snapshot, write_snapshot
from thermovisco.integrator.state import FieldState

__all__ = ["CHECKPOINT_FORMAT", "Checkpoint", "write_checkpoint", "read_checkpoint"]

log = structlog.stdlib.get_logger("checkpoint")

CHECKPOINT_FORMAT = "thermovisco-checkpoint/1"
_SNAPSHOT_SUFFIX = ".bin"
_HISTORY_SUFFIX = ".theta.bin"


class Checkpoint(NamedTuple):
    state: FieldState
    dt: float
    step: int
    metadata: dict
    # temperature at every recorded row up to the checkpoint, oldest first
    history: Optional[npt.NDArray[np.float64]] = None


def write_checkpoint(
    path: Path,
    grid: Grid,
    state: FieldState,
    dt: float,
    step: int,
    metadata: Optional[dict] = None,
    history: Optional[Sequence[ScalarField]] = None,
) -> Path:
    """Write the snapshot (u1, u2, v1, v2, theta) next to a YAML sidecar at `path`.

    `history` is stored as a second snapshot with one temperature field per recorded row.
    """
    path = Path(path)
    snapshot_path = path.with_suffix(_SNAPSHOT_SUFFIX)
    write_snapshot(
        snapshot_path,
        grid,
        [state.u[..., 0], state.u[..., 1], state.v[..., 0], state.v[..., 1], state.theta],
        state.t,
    )

    # repr keeps the floats bit-exact on reload
    sidecar = {
        "format": CHECKPOINT_FORMAT,
        "t": repr(float(state.t)),
        "dt": repr(float(dt)),
        "step": int(step),
        "snapshot": snapshot_path.name,
        "metadata": metadata or {},
    }
    if history is not None and len(history):
        history_path = path.with_suffix(_HISTORY_SUFFIX)
        write_snapshot(history_path, grid, history, state.t)
        sidecar["history"] = history_path.name
    path.write_text(yaml.safe_dump(sidecar, sort_keys=True), encoding="utf-8")

    log.info("checkpoint written", path=str(path), t=state.t, step=step)
    return path


def read_checkpoint(path: Path, grid: Grid) -> Checkpoint:
    path = Path(path)
    sidecar = yaml.safe_load(path.read_text(encoding="utf-8"))
    if not isinstance(sidecar, dict) or sidecar.get("format") != CHECKPOINT_FORMAT:
        raise SnapshotFormatError(f"{path} is not a {CHECKPOINT_FORMAT} sidecar")

    snapshot = read_snapshot(path.parent / sidecar["snapshot"])
    if (snapshot.nx, snapshot.ny) != grid.shape or snapshot.fields.shape[0] != 5:
        raise SnapshotFormatError(
            f"checkpoint holds {snapshot.fields.shape[0]} fields on {snapshot.nx}x{snapshot.ny}, "
            f"expected 5 on {grid.nx}x{grid.ny}"
        )

    t = float(sidecar["t"])
    fields = snapshot.fields
    state = FieldState(
        u=np.stack([fields[0], fields[1]], axis=-1),
        v=np.stack([fields[2], fields[3]], axis=-1),
        theta=fields[4].copy(),
        t=t,
    )
    history = None
    if sidecar.get("history"):
        stored = read_snapshot(path.parent / sidecar["history"])
        if (stored.nx, stored.ny) != grid.shape:
            raise SnapshotFormatError(f"temperature history is {stored.nx}x{stored.ny}, expected {grid.nx}x{grid.ny}")
        history = stored.fields

    return Checkpoint(
        state.validate(grid),
        float(sidecar["dt"]),
        int(sidecar["step"]),
        sidecar.get("metadata") or {},
        history,
    )
