# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from streamforge.configurator.enums import ConfigurationVars
from streamforge.configurator.handler import ConfigurationHandler
from streamforge.utils.exceptions import ConfigError


class Configurator:
    """
    Configurator class for run defaults management.
    """

    def __init__(self) -> None:
        self._handler = ConfigurationHandler()

    def get_configuration(self) -> dict:
        """
        Retrieve the current configuration.

        Returns
        -------
        dict
            Dictionary of configuration variables.
        """
        return self._handler.get_configuration()

    def get(self, var: ConfigurationVars, default: str | None = None) -> str | None:
        """
        Get a single configuration variable.

        Parameters
        ----------
        var : ConfigurationVars
            Variable to read.
        default : str
            Value returned when the variable is unset.

        Returns
        -------
        str or None
            Variable value.
        """
        value = self.get_configuration().get(var.value)
        return default if value is None else value

    def get_int(self, var: ConfigurationVars, default: int) -> int:
        """
        Get a configuration variable as an integer.

        Parameters
        ----------
        var : ConfigurationVars
            Variable to read.
        default : int
            Value returned when the variable is unset.

        Returns
        -------
        int
            Variable value.

        Raises
        ------
        ConfigError
            If the value is not an integer.
        """
        value = self.get(var)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{var.value} must be an integer, got '{value}'.")

    def reload(self) -> None:
        """
        Reload configuration from environment and file.
        """
        self._handler.reload_configuration()

    def get_current_profile(self) -> str:
        """
        Get the name of the current profile.

        Returns
        -------
        str
            Profile name.
        """
        return self._handler.get_current_profile()


configurator = Configurator()
