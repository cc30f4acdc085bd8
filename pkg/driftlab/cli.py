"""
Command-line front end.

    driftlab --preset scenario-u --command dichotomy --out runs/u
    driftlab --config my.json --command check

Exit status: 0 all asserted invariants hold, 1 an invariant failed (named in
report.json and on stderr), 2 the configuration did not parse, 3 I/O failure.
"""

import argparse
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .config import (
    AnyConfig,
    DichotomyConfig,
    ScenarioConfig,
    config_hash,
    describe,
    list_presets,
    load_config,
    load_preset,
    to_model_dichotomy,
    to_scenario,
)
from .errors import ConfigurationError, LabError
from .experiments import (
    RESIDUAL_TOL,
    check_scenario,
    dichotomy_scan,
    gamma_family,
    reproduce_model_dichotomy,
    solve_scenario,
)
from .report import RunReport, write_run
from .settings import configure_logging, get_output_dir

logger = logging.getLogger(__name__)

COMMANDS = ("check", "solve", "dichotomy", "family", "reproduce")
ORACLE_TOL = 1e-5

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_PARSE = 2
EXIT_IO = 3


def _scenario_config(config: AnyConfig, command: str) -> ScenarioConfig:
    if not isinstance(config, ScenarioConfig):
        raise ConfigurationError(f"'{command}' needs a scenario document, got a model-dichotomy document")
    return config


def execute(config: AnyConfig, command: str, nodes: Optional[int] = None, strict: bool = False) -> RunReport:
    """Run one command on a parsed configuration and collect its report and tables."""
    digest = config_hash(config)
    sections = {"config": describe(config)}
    if nodes is not None:
        sections["nodes_override"] = nodes

    if command == "reproduce":
        if not isinstance(config, DichotomyConfig):
            raise ConfigurationError("'reproduce' needs a model-dichotomy document")
        result = reproduce_model_dichotomy(to_model_dichotomy(config, nodes))
        sections["model_dichotomy"] = result.as_dict()
        report = RunReport(command, digest, sections, list(result.failures))
        if result.scans:
            report.probes = [(p.radius, p.value) for p in result.scans[0].probes]
        if result.family is not None:
            report.family = result.family.table()
        return report

    scenario = to_scenario(_scenario_config(config, command), nodes)
    failures: List[str] = []

    if command == "check":
        check = check_scenario(scenario)
        sections["check"] = check.as_dict()
        failures += [
            f"check.{name}.grid_disagreement" for name, h in check.hypotheses.items() if h.passed != h.grid_passed
        ]
        return RunReport(command, digest, sections, failures)

    if command == "solve":
        solved = solve_scenario(scenario)
        sections["solve"] = solved.as_dict()
        solution = solved.solution
        if solution.residual > RESIDUAL_TOL:
            failures.append("solve.residual")
        if solved.oracle_difference is None or solved.oracle_difference > ORACLE_TOL:
            failures.append("solve.oracle_agreement")
        gamma = solution.problem.gamma
        if gamma > 0 and (np.min(solution.values) < -1e-12 or np.max(solution.values) > gamma * (1 + 1e-12)):
            failures.append("solve.maximum_principle")
        report = RunReport(command, digest, sections, failures)
        report.solution = (np.asarray(solution.grid.nodes), np.asarray(solution.values))
        return report

    if command == "dichotomy":
        scan = dichotomy_scan(scenario)
        sections["dichotomy"] = scan.as_dict()
        report = RunReport(command, digest, sections, scan.failures(strict))
        report.probes = [(p.radius, p.value) for p in scan.probes]
        return report

    if command == "family":
        family = gamma_family(scenario)
        sections["family"] = family.as_dict()
        report = RunReport(command, digest, sections, family.failures())
        report.family = family.table()
        return report

    raise ConfigurationError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="driftlab", description="Drift equation laboratory on model manifolds")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path, help="Path to a JSON scenario or model-dichotomy document")
    source.add_argument("--preset", choices=list_presets(), help="Name of a shipped preset")
    parser.add_argument("--command", choices=COMMANDS, required=True, help="What to run")
    parser.add_argument("--out", type=Path, default=None, help="Output directory (default: LAB_OUTPUT_DIR)")
    parser.add_argument("--nodes", type=int, default=None, help="Override the grid node count")
    parser.add_argument("--strict", action="store_true", help="Treat an inconclusive classification as a failure")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_PARSE

    started = datetime.now(timezone.utc)
    try:
        configure_logging()
        if args.nodes is not None and args.nodes < 64:
            raise ConfigurationError(f"--nodes must be >= 64, got {args.nodes}")
        config = load_preset(args.preset) if args.preset else load_config(args.config)
        out_dir = args.out if args.out is not None else Path(get_output_dir())
        report = execute(config, args.command, args.nodes, args.strict)
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except LabError as e:
        print(f"invariant failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVARIANT

    try:
        write_run(report, out_dir, started)
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO

    if not report.passed:
        print("invariant failure: " + ", ".join(report.failures), file=sys.stderr)
        return EXIT_INVARIANT
    logger.info("%s finished: all invariants hold", args.command)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
