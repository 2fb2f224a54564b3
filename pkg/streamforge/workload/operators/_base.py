# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import typing
from abc import abstractmethod
from typing import Optional

if typing.TYPE_CHECKING:
    from streamforge.broker.models import Record
    from streamforge.spec.configs import StreamProcConfig


class Output:
    """
    Operator result before it becomes a record.
    """

    __slots__ = ("key", "value", "source", "size")

    def __init__(
        self,
        key: Optional[str],
        value: str,
        source: tuple[str, int, int],
        size: Optional[int] = None,
    ) -> None:
        self.key = key
        self.value = value
        self.source = source
        self.size = size if size is not None else max(1, len(value.encode("utf-8")))

    def __repr__(self) -> str:
        return f"Output({self.key!r}, {self.value!r})"


def record_text(record: Record) -> str:
    """
    Payload of a record as text, empty for size only payloads.
    """
    if record.payload is None:
        return ""
    if isinstance(record.payload, bytes):
        return record.payload.decode("utf-8", errors="replace")
    return str(record.payload)


def record_key(record: Record) -> str:
    return record.key if record.key is not None else record_text(record)


class Operator:
    """
    Per record transformation run by a stream processing job.
    """

    KIND: str = None

    def __init__(self, config: StreamProcConfig) -> None:
        self.config = config

    @abstractmethod
    def apply(self, record: Record) -> list[Output]:
        """
        Process one input record.

        Parameters
        ----------
        record : Record
            Input record.

        Returns
        -------
        list[Output]
            Outputs emitted right away.

        Raises
        ------
        MalformedRecordError
            If the record cannot be interpreted.
        """

    def close_window(self) -> list[Output]:
        """
        Emit the results of the current window and start a new one.
        """
        return []

    def reset(self) -> None:
        """
        Drop all state.
        """


class OperatorBuilder:
    """
    Builder of one operator kind.
    """

    def __init__(self, operator_class: type[Operator]) -> None:
        self.operator_class = operator_class

    def build(self, config: StreamProcConfig) -> Operator:
        return self.operator_class(config)
