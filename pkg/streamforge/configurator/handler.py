# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import os
from pathlib import Path

from streamforge.configurator.enums import ConfigurationVars, SetProfile
from streamforge.configurator.ini_module import load_file, load_key, load_profile
from streamforge.utils.generic_utils import list_enum


class ConfigurationHandler:
    """
    Handler for loading run configuration variables.
    """

    def __init__(self, path: Path | None = None) -> None:
        self._path = path
        self._current_profile = self._read_current_profile()
        self._configuration: dict[str, str | None] = self.load_configuration()

    @staticmethod
    def _read_env(variables: list) -> dict:
        """
        Read configuration variables from the environment.

        Parameters
        ----------
        variables : list
            List of environment variable names to read.

        Returns
        -------
        dict
            Dictionary of environment variables.
        """
        return {var: os.getenv(var) for var in variables}

    def _read_file(self, variables: list, profile: str) -> dict:
        """
        Read configuration variables from the .streamforge.ini file.

        Parameters
        ----------
        variables : list
            List of variable names to read.
        profile : str
            Profile name to read from.

        Returns
        -------
        dict
            Dictionary of configuration variables.
        """
        file = load_file(self._path)
        return {var: load_key(file, profile, var) for var in variables}

    def load_configuration(self) -> dict[str, str | None]:
        """
        Load configuration with env > file precedence.

        Returns
        -------
        dict
            Merged configuration dictionary.
        """
        variables = list_enum(ConfigurationVars)
        env_config = self._read_env(variables)
        file_config = self._read_file(variables, self._current_profile)
        return {**file_config, **{k: v for k, v in env_config.items() if v is not None}}

    def reload_configuration(self) -> None:
        """
        Reload configuration from environment and file.
        """
        self._configuration = self.load_configuration()

    def get_configuration(self) -> dict[str, str | None]:
        """
        Get the merged configuration dictionary.

        Returns
        -------
        dict
            The configuration dictionary.
        """
        return self._configuration

    def _read_current_profile(self) -> str:
        """
        Read the current profile name.

        Returns
        -------
        str
            Name of the profile.
        """
        profile = os.getenv(SetProfile.PROFILE_VAR.value)
        if profile is not None:
            return profile
        profile = load_profile(load_file(self._path))
        if profile is not None:
            return profile
        return SetProfile.DEFAULT.value

    def get_current_profile(self) -> str:
        """
        Get the current profile name.

        Returns
        -------
        str
            Name of the profile.
        """
        return self._current_profile
