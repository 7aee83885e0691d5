import argparse
import csv
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import yaml
from prometheus_client import REGISTRY, CollectorRegistry, multiprocess, start_http_server
from pydantic import ValidationError

from thermovisco.config import Config
from thermovisco.container import ContainerApplication
from thermovisco.grid import SolverError
from thermovisco.integrator import StepFailedError
from thermovisco.runner import (
    ContainerSimulation,
    ConvergenceConfig,
    KindConvergence,
    ScenarioConfig,
    ScenarioValidationError,
    Simulation,
    convergence_study,
    load_scenario,
    material_table,
    plain_data,
    sweep,
    validate_scenario,
)
from thermovisco.structured_logging import setup_logging
from thermovisco.tracking import log_exception

__all__ = ["ExitCode", "build_parser", "run_cli", "start_metrics_server"]


class ExitCode:
    OK = 0
    VIOLATIONS = 1
    INVALID = 2
    SOLVER_FAILURE = 3


def start_metrics_server(config: Config):
    log = logging.getLogger("main")
    log.info(
        "Metrics HTTP server running on http://%s:%d",
        config.metrics.host,
        config.metrics.port,
    )

    registry = REGISTRY

    # pylint: disable=direct-environment-variable-reference
    if "PROMETHEUS_MULTIPROC_DIR" in os.environ:
        registry = CollectorRegistry()
        multiprocess.MultiProcessCollector(registry)
    # pylint: enable=direct-environment-variable-reference

    start_http_server(
        addr=config.metrics.host,
        port=config.metrics.port,
        registry=registry,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermovisco",
        description="Thermoviscoelastic Kelvin-Voigt simulations with entropy and energy diagnostics",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a scenario to its final time")
    run.add_argument("scenario", help="Scenario file or built-in scenario name")
    run.add_argument("--output", help="Output directory")
    run.add_argument("--restart", help="Checkpoint sidecar to resume from")

    sweep_cmd = commands.add_parser("sweep", help="Independent runs over one scenario parameter")
    sweep_cmd.add_argument("scenario", help="Scenario file or built-in scenario name")
    sweep_cmd.add_argument(
        "--axis",
        nargs="+",
        metavar=("PATH", "VALUE"),
        help="Dotted scenario path followed by its values, e.g. solver.eps_reg 0 1e-6 1e-4",
    )
    sweep_cmd.add_argument("--output", help="Output directory")
    sweep_cmd.add_argument("--workers", type=int, default=None, help="Parallel runs")

    convergence = commands.add_parser("convergence", help="Manufactured-solution convergence study")
    convergence.add_argument("scenario", help="Scenario file or built-in scenario name")
    convergence.add_argument("--levels", type=int, default=3)
    convergence.add_argument(
        "--kind", choices=[str(kind) for kind in KindConvergence], default=str(KindConvergence.SPACE)
    )
    convergence.add_argument("--output", help="Output directory")

    table = commands.add_parser("material-table", help="Tabulate the heat capacity functionals")
    table.add_argument("scenario", help="Scenario file or built-in scenario name")
    table.add_argument("--count", type=int, default=25)

    check = commands.add_parser("check", help="Validate a scenario and its initial data")
    check.add_argument("scenario", help="Scenario file or built-in scenario name")

    return parser


def _output_dir(config: Config, scenario: ScenarioConfig, override: Optional[str]) -> Path:
    if override:
        return Path(override)
    if config.output.directory:
        return Path(config.output.directory) / scenario.name
    if scenario.output.directory:
        return Path(scenario.output.directory)
    return Path("runs") / scenario.name


def _parse_value(raw: str):
    return yaml.safe_load(raw)


def _run(args, config: Config, scenario: ScenarioConfig) -> int:
    manifest = Simulation(scenario, _output_dir(config, scenario, args.output)).run(
        Path(args.restart) if args.restart else None
    )
    summary = {
        "status": manifest.status,
        "violation_count": manifest.violation_count,
        "limits": manifest.summary["limits"],
        "output_directory": manifest.output_directory,
    }
    print(yaml.safe_dump(plain_data(summary), sort_keys=False), end="")
    return ExitCode.OK if manifest.passed else ExitCode.VIOLATIONS


def _sweep(args, config: Config, scenario: ScenarioConfig) -> int:
    axis = args.axis or []
    path, values = (axis[0], [_parse_value(v) for v in axis[1:]]) if axis else (None, [])
    members = sweep(scenario, _output_dir(config, scenario, args.output), path, values, args.workers)

    for member in members:
        print(f"{member.index}\t{member.value}\t{member.status}\t{member.directory}")
    passed = all(m.manifest is not None and m.manifest.passed for m in members)
    return ExitCode.OK if passed else ExitCode.VIOLATIONS


def _convergence(args, config: Config, scenario: ScenarioConfig) -> int:
    table = convergence_study(scenario, ConvergenceConfig(kind=args.kind, levels=args.levels))

    output_dir = _output_dir(config, scenario, args.output)
    output_dir.mkdir(parents=True, exist_ok=True)
    with open(output_dir / f"convergence-{table.kind}.csv", "w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(table.rows[0]._fields)
        writer.writerows(table.rows)

    print(yaml.safe_dump(plain_data(table.as_dict()), sort_keys=False), end="")
    return ExitCode.OK if table.monotone else ExitCode.VIOLATIONS


def _material_table(args, _config: Config, scenario: ScenarioConfig) -> int:
    rows = material_table(scenario.material.build(), scenario.material.log_shift, args.count)

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(rows[0]._fields)
    for row in rows:
        writer.writerow([repr(v) for v in row])
    return ExitCode.OK


def _check(_args, _config: Config, scenario: ScenarioConfig) -> int:
    report = validate_scenario(scenario, ContainerSimulation(scenario=scenario), raise_on_failure=False)
    print(yaml.safe_dump(plain_data(report.as_dict()), sort_keys=False), end="")
    return ExitCode.OK if report.passed else ExitCode.INVALID


COMMANDS = {
    "run": _run,
    "sweep": _sweep,
    "convergence": _convergence,
    "material-table": _material_table,
    "check": _check,
}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    config = Config()
    setup_logging(config.logging)

    container_application = ContainerApplication()
    container_application.config.from_dict(config.model_dump())

    if config.metrics.enabled:
        start_metrics_server(config)

    try:
        scenario = load_scenario(args.scenario, container_application.scenarios())
        return COMMANDS[args.command](args, config, scenario)
    except (ScenarioValidationError, ValidationError, KeyError, FileNotFoundError) as ex:
        log_exception(ex, command=args.command)
        return ExitCode.INVALID
    except (StepFailedError, SolverError) as ex:
        log_exception(ex, command=args.command)
        return ExitCode.SOLVER_FAILURE


if __name__ == "__main__":
    sys.exit(run_cli())
