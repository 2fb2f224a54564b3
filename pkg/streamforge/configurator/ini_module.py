# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from configparser import ConfigParser
from pathlib import Path

from streamforge.utils.exceptions import ConfigError

# File where run defaults are kept
ENV_FILE = Path.home() / ".streamforge.ini"


def load_file(path: Path | None = None) -> ConfigParser:
    """
    Load the run defaults from the .streamforge.ini file.

    Parameters
    ----------
    path : Path
        Alternative file location.

    Returns
    -------
    ConfigParser
        Parsed configuration file object.

    Raises
    ------
    ConfigError
        If the file cannot be read.
    """
    try:
        file = ConfigParser()
        file.read(path or ENV_FILE)
        return file
    except Exception as e:
        raise ConfigError(f"Failed to read config file: {e}")


def load_profile(file: ConfigParser) -> str | None:
    """
    Load the current profile name from the parsed file.

    Parameters
    ----------
    file : ConfigParser
        Parsed configuration file object.

    Returns
    -------
    str or None
        Name of the profile, or None if not found.
    """
    try:
        return file["DEFAULT"]["current_environment"]
    except KeyError:
        return


def load_key(file: ConfigParser, profile: str, key: str) -> str | None:
    """
    Load a specific key value from a profile.

    Parameters
    ----------
    file : ConfigParser
        Parsed configuration file object.
    profile : str
        Name of the profile.
    key : str
        Name of the key to retrieve.

    Returns
    -------
    str or None
        Value of the key, or None if not found.
    """
    try:
        return file[profile][key]
    except KeyError:
        return
