# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from pathlib import Path

from streamforge.spec.parser import DEFAULT_GRAPHML
from streamforge.utils.exceptions import MissingConfigError
from streamforge.utils.generic_utils import natural_key

SCENARIO_ROOT = Path(__file__).resolve().parent.parent / "scenarios"


def list_scenarios() -> list[str]:
    """
    Names of the bundled scenarios.
    """
    if not SCENARIO_ROOT.is_dir():
        return []
    names = [p.name for p in SCENARIO_ROOT.iterdir() if (p / DEFAULT_GRAPHML).is_file()]
    return sorted(names, key=natural_key)


def scenario_path(name: str) -> Path:
    """
    Directory of a bundled scenario.

    Parameters
    ----------
    name : str
        Scenario name.

    Returns
    -------
    Path
        Scenario directory.

    Raises
    ------
    MissingConfigError
        If no scenario has that name.
    """
    if name not in list_scenarios():
        raise MissingConfigError(f"Unknown scenario '{name}', bundled ones are {list_scenarios()}.")
    return SCENARIO_ROOT / name


def resolve_spec_path(spec_path: str | Path) -> Path:
    """
    Turn a --spec argument into a path: existing paths are kept, bare names
    are looked up among the bundled scenarios.
    """
    path = Path(spec_path)
    if path.exists():
        return path
    if str(spec_path) in list_scenarios():
        return scenario_path(str(spec_path))
    raise MissingConfigError(f"'{spec_path}' is neither a file, a directory nor a bundled scenario.")
