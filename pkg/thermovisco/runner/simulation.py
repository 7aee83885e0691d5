from enum import Enum
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Optional

import numpy as np
import structlog
import yaml
from pydantic import BaseModel

from thermovisco.diagnostics import (
    CoverageError,
    DiagnosticsRecord,
    DiagnosticsWriter,
    StepChecks,
    Trajectory,
    WindowMetrics,
    chain_sample_times,
    check_step,
    lloglog_chain,
    read_diagnostics_rows,
    record_from_row,
    theta_infinity,
    window_metrics,
    write_windows,
)
from thermovisco.grid import write_snapshot
from thermovisco.integrator import FieldState, StepReport, read_checkpoint, write_checkpoint
from thermovisco.runner.config import ScenarioConfig
from thermovisco.runner.container import ContainerSimulation
from thermovisco.runner.errors import InvariantViolationError
from thermovisco.runner.validation import initial_state, validate_scenario

__all__ = ["RunManifest", "RunStatus", "Simulation", "run", "package_version", "plain_data"]

log = structlog.stdlib.get_logger("runner")

DIAGNOSTICS_FILE = "diagnostics.csv"
WINDOWS_FILE = "windows.csv"
MANIFEST_FILE = "manifest.yml"


def package_version() -> str:
    try:
        return version("thermovisco")
    except PackageNotFoundError:
        return "0.0.0+unknown"


class RunStatus:
    COMPLETED = "completed"
    ABORTED = "aborted"


class RunManifest(BaseModel):
    scenario: str
    config_hash: str
    version: str
    status: str
    output_directory: str
    classification: dict[str, Any]
    acceptance_log: list[dict[str, Any]]
    summary: dict[str, Any]
    violation_count: int
    restarted_from: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status == RunStatus.COMPLETED and self.violation_count == 0

    def write(self, path: Path) -> Path:
        path = Path(path)
        path.write_text(yaml.safe_dump(plain_data(self.model_dump()), sort_keys=False), encoding="utf-8")
        return path

    @classmethod
    def read(cls, path: Path) -> "RunManifest":
        with open(path, "r") as fp:
            return cls(**yaml.safe_load(fp))


class Simulation:
    """Runs one scenario end to end into `output_dir`.

    Every accepted step is checked against the energy, entropy and corner inequalities;
    rows of diagnostics.csv are written at the configured cadence.
    """

    def __init__(self, config: ScenarioConfig, output_dir: Path, container: Optional[ContainerSimulation] = None):
        self.config = config
        self.output_dir = Path(output_dir)
        self.container = container or ContainerSimulation(scenario=config)

        self.grid = self.container.grid()
        self.tensors = self.container.tensors()
        self.model_eps = self.container.material_eps()
        self.integrator = self.container.integrator()
        self.diagnostics = self.container.diagnostics()

        self.trajectory = Trajectory(self.grid)
        self.acceptance_log: list[dict[str, Any]] = []
        self.violation_count = 0
        self.rejected_steps = 0
        self.first_violation: Optional[dict[str, Any]] = None
        self.chain_failures: list[dict[str, Any]] = []
        self.chain_samples = 0
        # last accepted state and its step number
        self.progress: Optional[tuple[FieldState, int]] = None

    def run(self, restart: Optional[Path] = None) -> RunManifest:
        config = self.config
        config_hash = config.config_hash()

        with structlog.contextvars.bound_contextvars(run_id=config_hash[:12], scenario=config.name):
            report = validate_scenario(config, self.container)
            self.output_dir.mkdir(parents=True, exist_ok=True)

            state, step, rows = self._start(restart)
            self.progress = (state, step)
            status = RunStatus.COMPLETED

            with DiagnosticsWriter(self.output_dir / DIAGNOSTICS_FILE, rows) as writer:
                if restart is None:
                    record = self.diagnostics.record(state)
                    writer.write(0, 0.0, 0.0, record)
                    self.trajectory.append(record, state.theta, 0.0)
                    self._write_outputs(state, step, on_start=True)

                try:
                    state, step = self._integrate(state, step, writer)
                except InvariantViolationError as ex:
                    status = RunStatus.ABORTED
                    if self.progress:
                        state, step = self.progress
                    log.error("run aborted on invariant violation", **ex.details)

            summary = self._summarize(state, step)
            windows = [w for w in summary["windows"] if "error" not in w]
            write_windows(self.output_dir / WINDOWS_FILE, [WindowMetrics(**w) for w in windows])

            manifest = RunManifest(
                scenario=config.name,
                config_hash=config_hash,
                version=package_version(),
                status=status,
                output_directory=str(self.output_dir),
                classification=report.classification,
                acceptance_log=self.acceptance_log,
                summary=summary,
                violation_count=self.violation_count,
                restarted_from=None if restart is None else str(restart),
            )
            manifest.write(self.output_dir / MANIFEST_FILE)

            log.info(
                "run finished",
                status=status,
                steps=step,
                violations=self.violation_count,
                theta_inf=summary["limits"].get("theta_inf"),
            )
            return manifest

    def _start(self, restart: Optional[Path]) -> tuple[FieldState, int, list[list[str]]]:
        if restart is None:
            return initial_state(self.config, self.grid), 0, []

        checkpoint = read_checkpoint(restart, self.grid)
        rows = read_diagnostics_rows(self.output_dir / DIAGNOSTICS_FILE, checkpoint.step)
        history = checkpoint.history
        if history is not None and len(history) != len(rows):
            log.warning(
                "temperature history does not match diagnostics rows, windows before the restart are unavailable",
                history=len(history),
                rows=len(rows),
            )
            history = None
        for i, row in enumerate(rows):
            _, _, work, record = record_from_row(row)
            self.trajectory.restore(record, work, None if history is None else history[i])
        self.trajectory.thetas[-1] = checkpoint.state.theta.copy()

        metadata = checkpoint.metadata
        self.integrator.dt_next = checkpoint.dt
        self.violation_count = int(metadata.get("violations", 0))
        self.rejected_steps = int(metadata.get("rejected", 0))
        self.first_violation = metadata.get("first_violation")
        self.chain_samples = int(metadata.get("chain_samples", 0))
        self.chain_failures = list(metadata.get("chain_failures", []))

        log.info("restarting from checkpoint", path=str(restart), t=checkpoint.state.t, step=checkpoint.step)
        return checkpoint.state, checkpoint.step, rows

    def _integrate(self, state: FieldState, step: int, writer: DiagnosticsWriter) -> tuple[FieldState, int]:
        config = self.config
        final_time = config.final_time
        tol = 1e-12 * max(1.0, final_time)
        events = sorted({*config.output.snapshot_times, *config.output.checkpoint_times, final_time})
        chain_times = [
            t for t in chain_sample_times(final_time, config.tolerances.chain_samples) if t > state.t + tol
        ]

        previous = self.diagnostics.record(state)
        cumulative_work = self.trajectory.work[-1]
        f0 = self.trajectory.first.F

        while state.t < final_time - tol:
            target = next(t for t in events if t > state.t + tol)
            new_state, report = self.integrator.step(state, max_dt=target - state.t)
            at_event = abs(new_state.t - target) <= tol
            if at_event:
                new_state = new_state._replace(t=target)

            step += 1
            self.rejected_steps += report.rejected
            cumulative_work += report.work_f + report.work_g

            record = self.diagnostics.record(new_state)
            self._check(step, previous, record, report, f0)

            if at_event or step % config.output.cadence == 0:
                writer.write(step, report.dt, cumulative_work, record)
                self.trajectory.append(record, new_state.theta, cumulative_work)

            if chain_times and new_state.t >= chain_times[0] - tol:
                chain_times = [t for t in chain_times if t > new_state.t + tol]
                self._sample_chain(new_state)

            state, previous = new_state, record
            self.progress = (state, step)
            if at_event:
                self._write_outputs(state, step)

        return state, step

    def _check(self, step: int, previous: DiagnosticsRecord, record: DiagnosticsRecord, report: StepReport, f0: float):
        config = self.config
        checks: StepChecks = check_step(
            previous,
            record,
            report,
            f0,
            self.tensors,
            config.material.diffusivity,
            self.grid.area,
            config.material.log_shift,
            config.tolerances,
        )
        entry = {
            "step": step,
            "t": float(record.t),
            "dt": float(report.dt),
            "rejected": int(report.rejected),
            "coupling_iterations": int(report.coupling_iterations),
            "violations": checks.violations,
        }
        self.acceptance_log.append(entry)

        if not checks.violations:
            return

        self.violation_count += 1
        details = {k: plain_data(v) for k, v in checks.as_dict().items()}
        if self.first_violation is None:
            self.first_violation = {"step": step, **details}
        log.warning("invariant violated", step=step, **details)

        if config.abort_on_violation:
            raise InvariantViolationError("invariant violated", step, float(record.t), details)

    def _sample_chain(self, state: FieldState):
        chain = lloglog_chain(self.diagnostics, state, self.config.tolerances.chain)
        self.chain_samples += 1
        if not chain.passed:
            self.chain_failures.append({"t": float(state.t), "links": chain.failures})
            log.warning("L log L chain link failed", t=state.t, links=chain.failures)

    def _write_outputs(self, state: FieldState, step: int, on_start: bool = False):
        output = self.config.output
        tol = 1e-12 * max(1.0, self.config.final_time)

        if any(abs(state.t - t) <= tol for t in output.snapshot_times):
            path = self.output_dir / f"snapshot-{step:06d}.bin"
            write_snapshot(
                path,
                self.grid,
                [state.u[..., 0], state.u[..., 1], state.v[..., 0], state.v[..., 1], state.theta],
                state.t,
            )

        if not on_start and any(abs(state.t - t) <= tol for t in output.checkpoint_times):
            write_checkpoint(
                self.output_dir / f"checkpoint-{step:06d}.yml",
                self.grid,
                state,
                self.integrator.dt_next,
                step,
                metadata=plain_data(
                    {
                        "violations": self.violation_count,
                        "rejected": self.rejected_steps,
                        "first_violation": self.first_violation,
                        "chain_samples": self.chain_samples,
                        "chain_failures": self.chain_failures,
                    }
                ),
                history=None if any(theta is None for theta in self.trajectory.thetas) else self.trajectory.thetas,
            )

    def _summarize(self, state: FieldState, step: int) -> dict[str, Any]:
        trajectory = self.trajectory
        tolerances = self.config.tolerances
        first, last = trajectory.first, trajectory.last

        limits: dict[str, Any] = {}
        theta_inf: Optional[float] = None
        try:
            estimate = theta_infinity(trajectory, self.model_eps, window=tolerances.limit_window)
            theta_inf = estimate.theta_inf
            limits = {k: plain_data(v) for k, v in estimate._asdict().items()}
        except CoverageError as ex:
            log.warning("entropy limit not available", reason=str(ex))

        windows: list[dict[str, Any]] = []
        for start in self.config.output.window_starts:
            if theta_inf is None or start + 1.0 > state.t + 1e-12:
                continue
            try:
                metrics = window_metrics(
                    trajectory, start, theta_inf, max_gap=tolerances.window_max_gap, L=limits.get("L")
                )
                windows.append({k: plain_data(v) for k, v in metrics._asdict().items()})
            except CoverageError as ex:
                log.warning("window metrics not available", t=start, reason=str(ex))
                windows.append({"t": start, "error": str(ex)})

        summary: dict[str, Any] = {
            "steps": step,
            "final_time": float(state.t),
            "rejected_steps": self.rejected_steps,
            "F0": float(first.F),
            "F_final": float(last.F),
            "energy_drop": float(first.F - last.F),
            "theta_min": float(np.min(trajectory.column("theta_min"))),
            "u_norm_max": float(np.max(trajectory.column("u_norm"))),
            "u_norm_final": float(last.u_norm),
            "limits": limits,
            "windows": windows,
            "chain": {"samples": self.chain_samples, "failures": self.chain_failures},
            "violation_count": self.violation_count,
            "first_violation": self.first_violation,
        }

        initial_theta = trajectory.thetas[0]
        if initial_theta is not None:
            mean = self.grid.integrate(initial_theta) / self.grid.area
            summary["theta_deviation_initial"] = self.grid.integrate(np.abs(initial_theta - mean))
        if theta_inf is not None:
            summary["theta_deviation_final"] = self.grid.integrate(np.abs(state.theta - theta_inf))

        return summary


def plain_data(value: Any) -> Any:
    """numpy scalars and tuples replaced by builtins, recursively, for yaml.safe_dump."""
    if isinstance(value, dict):
        return {k: plain_data(v) for k, v in value.items()}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [plain_data(v) for v in value]
    return value


def run(config: ScenarioConfig, output_dir: Path, restart: Optional[Path] = None) -> RunManifest:
    return Simulation(config, output_dir).run(restart)
