# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from abc import abstractmethod
from pathlib import Path
from typing import Any, Callable, Optional

from streamforge.utils.exceptions import FaultError, IoError, SimulationError, SpecError
from streamforge.utils.logger import LOGGER


class Runtime:
    """
    Base Runtime class for executing experiments.

    A runtime turns a validated experiment description into an executed
    run and its output artifacts.
    """

    def __init__(self, spec) -> None:
        self.spec = spec

    @abstractmethod
    def build(self) -> None:
        """
        Instantiate the components of the run.
        """

    @abstractmethod
    def run(self, out_dir: Optional[Path] = None) -> Any:
        """
        Execute the run and export its artifacts.
        """

    @staticmethod
    def _execute(func: Callable, *args, **kwargs) -> Any:
        """
        Execute a function with provided arguments safely.

        Parameters
        ----------
        func : Callable
            Function to execute.
        *args
            Function arguments.
        **kwargs
            Function keyword arguments.

        Returns
        -------
        Any
            Function return value.

        Raises
        ------
        SimulationError
            If an unexpected exception occurs during execution.
        """
        try:
            return func(*args, **kwargs)
        except (SpecError, SimulationError, FaultError, IoError):
            raise
        except Exception as err:
            msg = "Something got wrong during the run."
            LOGGER.exception(msg)
            raise SimulationError(msg) from err
