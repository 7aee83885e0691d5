import csv
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, NamedTuple, Optional, Sequence

import structlog

from thermovisco.runner.config import ScenarioConfig
from thermovisco.runner.simulation import RunManifest, run
from thermovisco.tracking import log_exception

__all__ = ["SweepMember", "sweep", "COMPARISON_HEADER"]

log = structlog.stdlib.get_logger("sweep")

COMPARISON_FILE = "comparison.csv"
COMPARISON_HEADER = [
    "member",
    "path",
    "value",
    "status",
    "violation_count",
    "steps",
    "F0",
    "F_final",
    "energy_drop",
    "theta_inf",
    "theta_min",
    "error",
]


class SweepMember(NamedTuple):
    index: int
    value: Any
    directory: str
    status: str
    manifest: Optional[RunManifest] = None
    error: Optional[str] = None


def _run_member(index: int, value: Any, config_json: str, directory: str) -> SweepMember:
    config = ScenarioConfig.model_validate_json(config_json)
    try:
        manifest = run(config, Path(directory))
    except Exception as ex:  # pylint: disable=broad-exception-caught
        log_exception(ex, extra={"member": index, "value": value})
        return SweepMember(index, value, directory, "failed", error=str(ex))

    return SweepMember(index, value, directory, manifest.status, manifest=manifest)


def sweep(
    base: ScenarioConfig,
    output_dir: Path,
    path: Optional[str] = None,
    values: Sequence[Any] = (),
    max_workers: Optional[int] = None,
) -> list[SweepMember]:
    """One independent run per value of the dotted scenario `path`, plus comparison.csv.

    Without a path or values the sweep is a single run of `base`.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    members = [(None, base)] if not path or not values else [(v, base.with_value(path, v)) for v in values]
    log.info("starting sweep", path=path, members=len(members))

    jobs = []
    with ProcessPoolExecutor(max_workers=max_workers) as executor:
        for index, (value, config) in enumerate(members):
            directory = output_dir / f"member-{index:03d}"
            jobs.append(
                executor.submit(_run_member, index, value, config.model_dump_json(by_alias=True), str(directory))
            )
        results = [job.result() for job in jobs]

    _write_comparison(output_dir / COMPARISON_FILE, path, results)
    return results


def _write_comparison(target: Path, path: Optional[str], members: Sequence[SweepMember]):
    with open(target, "w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(COMPARISON_HEADER)
        for member in members:
            summary = member.manifest.summary if member.manifest else {}
            writer.writerow(
                [
                    member.index,
                    path or "",
                    "" if member.value is None else member.value,
                    member.status,
                    member.manifest.violation_count if member.manifest else "",
                    summary.get("steps", ""),
                    summary.get("F0", ""),
                    summary.get("F_final", ""),
                    summary.get("energy_drop", ""),
                    summary.get("limits", {}).get("theta_inf", ""),
                    summary.get("theta_min", ""),
                    member.error or "",
                ]
            )
