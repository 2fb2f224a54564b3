# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import typing

from streamforge.spec.enums import OperatorKind
from streamforge.workload.operators._base import Operator, Output, record_text

if typing.TYPE_CHECKING:
    from streamforge.broker.models import Record


class SplitWords(Operator):
    """
    One output per whitespace separated word, keyed by the word.
    """

    KIND = OperatorKind.SPLIT_WORDS.value

    def apply(self, record: Record) -> list[Output]:
        return [Output(word, word, record.source) for word in record_text(record).split()]


class PassthroughCost(Operator):
    """
    Forwards records unchanged. Only the service time matters.
    """

    KIND = OperatorKind.PASSTHROUGH_COST.value

    def apply(self, record: Record) -> list[Output]:
        return [Output(record.key, record_text(record), record.source, record.size)]
