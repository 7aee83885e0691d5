from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
import numpy.typing as npt

from thermovisco.grid.grid import Grid

__all__ = ["SNAPSHOT_MAGIC", "Snapshot", "SnapshotFormatError", "write_snapshot", "read_snapshot"]

SNAPSHOT_MAGIC = b"TVS1"

# 32 bytes: magic, nx, ny, field count, time, padding.
HEADER_DTYPE = np.dtype(
    [
        ("magic", "S4"),
        ("nx", "<u4"),
        ("ny", "<u4"),
        ("field_count", "<u4"),
        ("time", "<f8"),
        ("reserved", "V8"),
    ]
)
DATA_DTYPE = np.dtype("<f8")


class SnapshotFormatError(ValueError):
    pass


class Snapshot(NamedTuple):
    nx: int
    ny: int
    t: float
    fields: npt.NDArray[np.float64]


def write_snapshot(path: Path, grid: Grid, fields: Sequence[npt.NDArray[np.float64]], t: float) -> Path:
    data = np.stack([np.asarray(field, dtype=np.float64) for field in fields])
    if data.shape[1:] != grid.shape:
        raise ValueError(f"snapshot fields have shape {data.shape[1:]}, grid is {grid.shape}")

    header = np.zeros(1, dtype=HEADER_DTYPE)
    header["magic"] = SNAPSHOT_MAGIC
    header["nx"] = grid.nx
    header["ny"] = grid.ny
    header["field_count"] = data.shape[0]
    header["time"] = t

    path = Path(path)
    with open(path, "wb") as fp:
        fp.write(header.tobytes())
        fp.write(data.astype(DATA_DTYPE).tobytes(order="C"))

    return path


def read_snapshot(path: Path) -> Snapshot:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER_DTYPE.itemsize:
        raise SnapshotFormatError(f"{path} is too short for a snapshot header")

    header = np.frombuffer(raw[: HEADER_DTYPE.itemsize], dtype=HEADER_DTYPE)[0]
    if header["magic"] != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path} does not start with {SNAPSHOT_MAGIC!r}")

    nx, ny, count = int(header["nx"]), int(header["ny"]), int(header["field_count"])
    expected = HEADER_DTYPE.itemsize + count * nx * ny * DATA_DTYPE.itemsize
    if len(raw) != expected:
        raise SnapshotFormatError(f"{path} has {len(raw)} bytes, expected {expected}")

    fields = np.frombuffer(raw[HEADER_DTYPE.itemsize :], dtype=DATA_DTYPE).reshape(count, nx, ny)
    return Snapshot(nx, ny, float(header["time"]), fields.astype(np.float64))
