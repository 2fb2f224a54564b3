# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import typing
from typing import Optional

from streamforge.spec.enums import OperatorKind
from streamforge.utils.exceptions import MalformedRecordError
from streamforge.utils.generic_utils import natural_key
from streamforge.workload.operators._base import Operator, Output, record_key, record_text

if typing.TYPE_CHECKING:
    from streamforge.broker.models import Record
    from streamforge.spec.configs import StreamProcConfig

# Source tag (producer, seq, produce time) of a pipeline record.
Source = tuple[str, int, int]


class CountByKey(Operator):
    """
    Running count per key. With windowSeconds set, counts restart at each
    window and are emitted when it closes.
    """

    KIND = OperatorKind.COUNT_BY_KEY.value

    def __init__(self, config: StreamProcConfig) -> None:
        super().__init__(config)
        self.windowed = config.window_seconds is not None
        self.counts: dict[str, int] = {}
        self.sources: dict[str, Source] = {}

    def apply(self, record: Record) -> list[Output]:
        key = record_key(record)
        if not key:
            return []
        self.counts[key] = self.counts.get(key, 0) + 1
        if self.windowed:
            self.sources[key] = record.source
            return []
        return [Output(key, str(self.counts[key]), record.source)]

    def close_window(self) -> list[Output]:
        if not self.windowed:
            return []
        outputs = [Output(k, str(self.counts[k]), self.sources[k]) for k in sorted(self.counts, key=natural_key)]
        self.reset()
        return outputs

    def reset(self) -> None:
        self.counts = {}
        self.sources = {}


class WindowedAverage(Operator):
    """
    Mean of "key,value" records per key and window.
    """

    KIND = OperatorKind.WINDOWED_AVERAGE.value

    def __init__(self, config: StreamProcConfig) -> None:
        super().__init__(config)
        self.sums: dict[str, tuple[float, int]] = {}
        self.sources: dict[str, Source] = {}

    def apply(self, record: Record) -> list[Output]:
        text = record_text(record).strip()
        if not text:
            return []
        key, sep, value = text.partition(",")
        try:
            number = float(value)
        except ValueError:
            raise MalformedRecordError(f"Expected 'key,value', got '{text}'.")
        if not sep or not key.strip():
            raise MalformedRecordError(f"Expected 'key,value', got '{text}'.")
        key = key.strip()
        total, count = self.sums.get(key, (0.0, 0))
        self.sums[key] = (total + number, count + 1)
        self.sources[key] = record.source
        return []

    def close_window(self) -> list[Output]:
        outputs = []
        for key in sorted(self.sums, key=natural_key):
            total, count = self.sums[key]
            outputs.append(Output(key, repr(total / count), self.sources[key]))
        self.reset()
        return outputs

    def reset(self) -> None:
        self.sums = {}
        self.sources = {}


class JoinGroupWindow(Operator):
    """
    Joins "ride,<id>,<area>" and "fare,<id>,<tip>" records by ride id and,
    when the window closes, emits the area with the highest mean tip.
    """

    KIND = OperatorKind.JOIN_GROUP_WINDOW.value

    def __init__(self, config: StreamProcConfig) -> None:
        super().__init__(config)
        self.rides: dict[str, str] = {}
        self.fares: dict[str, float] = {}
        self.last_source: Optional[Source] = None

    def apply(self, record: Record) -> list[Output]:
        text = record_text(record).strip()
        if not text:
            return []
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3 or parts[0] not in ("ride", "fare") or not parts[1]:
            raise MalformedRecordError(f"Expected 'ride,<id>,<area>' or 'fare,<id>,<tip>', got '{text}'.")
        kind, ride, value = parts
        if kind == "ride":
            self.rides[ride] = value
        else:
            try:
                self.fares[ride] = float(value)
            except ValueError:
                raise MalformedRecordError(f"Tip must be a number, got '{value}'.")
        self.last_source = record.source
        return []

    def close_window(self) -> list[Output]:
        tips: dict[str, list[float]] = {}
        for ride, area in self.rides.items():
            if ride in self.fares:
                tips.setdefault(area, []).append(self.fares[ride])
        source = self.last_source
        self.reset()
        if not tips:
            return []
        means = {area: sum(values) / len(values) for area, values in tips.items()}
        best = max(sorted(means, key=natural_key), key=lambda area: means[area])
        return [Output(best, repr(means[best]), source)]

    def reset(self) -> None:
        self.rides = {}
        self.fares = {}
        self.last_source = None
