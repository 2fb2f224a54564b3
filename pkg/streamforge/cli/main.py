# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from pydantic import ValidationError as PydanticValidationError

from streamforge.cli.models import RunConfig
from streamforge.cli.scenarios import list_scenarios, resolve_spec_path, scenario_path
from streamforge.cli.sweep import run_sweep
from streamforge.configurator.configurator import configurator
from streamforge.configurator.enums import ConfigurationVars
from streamforge.runtimes.emulator import run_experiment
from streamforge.spec.models import ExperimentSpec, format_errors
from streamforge.spec.overrides import apply_override
from streamforge.spec.parser import parse_experiment_file, resolve_graphml
from streamforge.utils.exceptions import ConfigError, FaultError, IoError, SimulationError, SpecError
from streamforge.utils.logger import LOGGER, set_log_level

DEFAULT_OUT = "out"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_SPEC = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamforge",
        description="Deterministic emulator of stream processing pipelines over a replicated broker cluster.",
    )
    parser.add_argument("--log-level", default=None, help="Logger level (DEBUG, INFO, WARNING, ...)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("run", "Run one experiment"), ("sweep", "Run one experiment per attribute value")):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--spec", required=True, help="GraphML file, directory or bundled scenario name")
        sub.add_argument("--out", default=None, help="Output directory (default $STREAMFORGE_OUT or ./out)")
        sub.add_argument("--seed", type=int, default=None, help="Override the graph seed")
        sub.add_argument("--duration", type=float, default=None, help="Override the simulated seconds")
        sub.add_argument("--trace", action="store_true", help="Write trace.log of dispatched events")
        if name == "sweep":
            sub.add_argument("--sweep", required=True, help="attr=v1,v2,... e.g. link.h2-s1.lat=10,50")
            sub.add_argument(
                "--workers", type=int, default=None, help="Parallel runs (default $STREAMFORGE_WORKERS or 1)"
            )

    scenarios = subparsers.add_parser("scenarios", help="Bundled example scenarios")
    scenario_sub = scenarios.add_subparsers(dest="action", required=True)
    scenario_sub.add_parser("list", help="List bundled scenarios")
    path = scenario_sub.add_parser("path", help="Print the directory of a scenario")
    path.add_argument("name")
    return parser


def run_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge parsed arguments with run defaults from the environment.

    Raises
    ------
    ConfigError
        If an option does not validate.
    """
    out = args.out or configurator.get(ConfigurationVars.OUT_DIR, DEFAULT_OUT)
    workers = getattr(args, "workers", None)
    if workers is None:
        workers = configurator.get_int(ConfigurationVars.WORKERS, 1)
    try:
        return RunConfig(
            spec_path=args.spec,
            out_dir=out,
            seed=args.seed,
            duration=args.duration,
            sweep=getattr(args, "sweep", None),
            workers=workers,
            trace=args.trace,
        )
    except PydanticValidationError as err:
        raise ConfigError(format_errors(err)) from err


def load_spec(config: RunConfig) -> tuple[ExperimentSpec, Path]:
    """
    Parse the experiment and apply the command line overrides.

    Parameters
    ----------
    config : RunConfig
        Run options.

    Returns
    -------
    tuple[ExperimentSpec, Path]
        Validated description and the directory of its GraphML file.
    """
    graphml = resolve_graphml(resolve_spec_path(config.spec_path))
    spec = parse_experiment_file(graphml)
    if config.seed is not None:
        spec = apply_override(spec, "graph.seed", str(config.seed))
    if config.duration is not None:
        spec = apply_override(spec, "graph.duration", str(config.duration))
    return spec, graphml.parent


def run(config: RunConfig) -> int:
    spec, base_dir = load_spec(config)
    result = run_experiment(spec, config.out_dir, base_dir, config.trace)
    records = result.summary["records"]
    LOGGER.info(
        f"Wrote {config.out_dir}: {records['produced']} records produced, "
        f"{records['delivered']} delivered, {records['lost']} lost."
    )
    return EXIT_OK


def sweep(config: RunConfig) -> int:
    spec, base_dir = load_spec(config)
    table = run_sweep(spec, config.sweep, config.out_dir, base_dir, config.workers, config.trace)
    LOGGER.info(f"Wrote {len(table)} sweep rows to {config.out_dir}.")
    return EXIT_OK


def scenarios(args: argparse.Namespace) -> int:
    if args.action == "list":
        for name in list_scenarios():
            print(name)
    else:
        print(scenario_path(args.name))
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    """
    Command line entry point.

    Parameters
    ----------
    argv : list[str]
        Arguments, sys.argv[1:] when None.

    Returns
    -------
    int
        0 on success, 2 on a spec error, 1 on any other failure.
    """
    args = build_parser().parse_args(argv)
    level = args.log_level or configurator.get(ConfigurationVars.LOG_LEVEL)
    try:
        if level is not None:
            set_log_level(level)
        if args.command == "scenarios":
            return scenarios(args)
        config = run_config(args)
        return run(config) if args.command == "run" else sweep(config)
    except SpecError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_SPEC
    except (SimulationError, FaultError, IoError, ConfigError, ValueError) as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
