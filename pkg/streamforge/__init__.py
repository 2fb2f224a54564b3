# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0
from streamforge.cli.scenarios import list_scenarios, scenario_path
from streamforge.cli.sweep import run_sweep
from streamforge.configurator.api import get_current_profile, reload_configuration
from streamforge.metrics.export import export, load_frames
from streamforge.metrics.summary import summarize
from streamforge.runtimes.emulator import Emulator, RunResult, run_experiment
from streamforge.spec.overrides import apply_override
from streamforge.spec.parser import parse_experiment, parse_experiment_file
from streamforge.spec.writer import to_graphml, write_experiment
