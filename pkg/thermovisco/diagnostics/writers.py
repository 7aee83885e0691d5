import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from thermovisco.diagnostics.limits import WindowMetrics
from thermovisco.diagnostics.records import DiagnosticsRecord

__all__ = [
    "DIAGNOSTICS_HEADER",
    "WINDOWS_HEADER",
    "DiagnosticsWriter",
    "format_value",
    "read_diagnostics_rows",
    "record_from_row",
    "write_windows",
]

# work is the cumulative dt int f.v_new + dt int g up to the row
DIAGNOSTICS_HEADER = ["step", "dt", "work", *DiagnosticsRecord._fields]
WINDOWS_HEADER = ["t", "W_theta_half", "W_theta_1", "W_ut", "u_norm"]


def format_value(value) -> str:
    # repr round-trips floats, which keeps rows byte-identical across runs
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


class DiagnosticsWriter:
    """Appends one row per record to diagnostics.csv."""

    def __init__(self, path: Path, rows: Sequence[Sequence[str]] = ()):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fp = open(self.path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._fp, lineterminator="\n")
        self._writer.writerow(DIAGNOSTICS_HEADER)
        for row in rows:
            self._writer.writerow(row)

    def write(self, step: int, dt: float, work: float, record: DiagnosticsRecord):
        self._writer.writerow(
            [format_value(step), format_value(float(dt)), format_value(float(work)), *(format_value(v) for v in record)]
        )

    def close(self):
        if not self._fp.closed:
            self._fp.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_diagnostics_rows(path: Path, up_to_step: int) -> list[list[str]]:
    """Rows of an existing diagnostics.csv with step <= up_to_step, as written."""
    with open(path, newline="", encoding="utf-8") as fp:
        reader = csv.reader(fp)
        header = next(reader, None)
        if header != DIAGNOSTICS_HEADER:
            raise ValueError(f"{path} does not have the diagnostics header")
        return [row for row in reader if int(row[0]) <= up_to_step]


def write_windows(path: Path, metrics: Iterable[WindowMetrics]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(WINDOWS_HEADER)
        for m in metrics:
            writer.writerow([format_value(getattr(m, name)) for name in WINDOWS_HEADER])
    return path


def record_from_row(row: Sequence[str]) -> tuple[int, float, float, DiagnosticsRecord]:
    """Inverse of DiagnosticsWriter.write: (step, dt, work, record)."""
    values = [float(v) for v in row[3:]]
    return int(row[0]), float(row[1]), float(row[2]), DiagnosticsRecord(*values)
