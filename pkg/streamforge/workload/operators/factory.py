# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import typing

from streamforge.utils.exceptions import BuilderError
from streamforge.workload.operators._base import OperatorBuilder
from streamforge.workload.operators.aggregate import CountByKey, JoinGroupWindow, WindowedAverage
from streamforge.workload.operators.text import PassthroughCost, SplitWords

if typing.TYPE_CHECKING:
    from streamforge.spec.configs import StreamProcConfig
    from streamforge.workload.operators._base import Operator


class OperatorFactory:
    """
    Operator factory class.
    """

    def __init__(self) -> None:
        self._builders: dict[str, OperatorBuilder] = {}

    def add_builder(self, kind: str, builder: OperatorBuilder) -> None:
        """
        Add a builder to the factory.

        Parameters
        ----------
        kind : str
            Operator kind.
        builder : OperatorBuilder
            Builder object.
        """
        if kind in self._builders:
            raise BuilderError(f"Builder for operator '{kind}' already exists.")
        self._builders[kind] = builder

    def build(self, config: StreamProcConfig) -> Operator:
        """
        Build the operator of a job.

        Parameters
        ----------
        config : StreamProcConfig
            Job configuration.

        Returns
        -------
        Operator
            Operator object.
        """
        try:
            return self._builders[config.kind].build(config)
        except KeyError:
            raise BuilderError(f"Operator '{config.kind}' not supported.")

    def list_supported_operators(self) -> list[str]:
        """
        List supported operators.

        Returns
        -------
        list[str]
            List of operator kinds.
        """
        return list(self._builders.keys())


factory = OperatorFactory()
for _cls in (SplitWords, CountByKey, WindowedAverage, JoinGroupWindow, PassthroughCost):
    factory.add_builder(_cls.KIND, OperatorBuilder(_cls))
