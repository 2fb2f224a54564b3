# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import typing
from typing import Callable, Optional

import pandas as pd

from streamforge.metrics.models import (
    DELIVERY,
    EVENTS,
    LATENCY,
    PIPELINE,
    PORTS,
    RECORDS,
    SINKS,
    TABLES,
    RecordStat,
    RecordStatus,
)
from streamforge.utils.generic_utils import natural_key
from streamforge.utils.time_utils import us_to_seconds

if typing.TYPE_CHECKING:
    from streamforge.broker.models import Record, TruncationReport
    from streamforge.net.counters import PortCounters

# (topic, producer, producer seq)
RecordKey = tuple[str, str, int]


def record_key(record: Record) -> RecordKey:
    return record.topic, record.producer, record.seq


class MetricsStore:
    """
    Append-only observations of a run.
    """

    def __init__(self) -> None:
        self.events: list[tuple[int, str, str, str]] = []
        self.records: dict[RecordKey, RecordStat] = {}
        self.subscribers: dict[str, list[str]] = {}
        self.latency: list[tuple[str, str, int, str, int, int]] = []
        self.pipeline: list[tuple[str, str, int, int, int]] = []
        self.sink_outputs: list[tuple[str, int, str, str]] = []
        self.truncations: list[TruncationReport] = []
        self.ports: Optional[PortCounters] = None
        self._delivered: dict[RecordKey, list[str]] = {}

    ##############################
    # Collection
    ##############################

    def annotate(self, time: int, component: str, kind: str, detail: str) -> None:
        self.events.append((time, component, kind, detail))

    def subscribe(self, topic: str, label: str) -> None:
        labels = self.subscribers.setdefault(topic, [])
        if label not in labels:
            labels.append(label)
            labels.sort(key=natural_key)

    def produced(self, record: Record) -> None:
        key = record_key(record)
        self.records[key] = RecordStat(record.topic, record.producer, record.seq, record.size, record.produce_time)

    def acked(self, record: Record) -> None:
        stat = self.records.get(record_key(record))
        if stat is not None:
            stat.acked = True

    def failed(self, record: Record) -> None:
        stat = self.records.get(record_key(record))
        if stat is not None:
            stat.failed = True

    def delivered(self, label: str, record: Record, now: int) -> bool:
        """
        Mark a record as received by a subscriber.

        Returns
        -------
        bool
            False for a duplicate receipt.
        """
        key = record_key(record)
        seen = self._delivered.setdefault(key, [])
        if label in seen:
            stat = self.records.get(key)
            if stat is not None:
                stat.duplicates += 1
            return False
        seen.append(label)
        self.latency.append((record.topic, record.producer, record.seq, label, record.produce_time, now))
        return True

    def pipeline_delivery(self, pipeline: str, source: tuple[str, int, int], now: int) -> None:
        producer, seq, produce_time = source
        self.pipeline.append((pipeline, producer, seq, produce_time, now))

    def sink_output(self, sink: str, now: int, key: str, value: str) -> None:
        self.sink_outputs.append((sink, now, key, value))

    def truncated(self, report: TruncationReport) -> None:
        self.truncations.append(report)

    ##############################
    # End of run
    ##############################

    def finalize(self, in_leader_log: Callable[[str, str, int], bool]) -> None:
        """
        Settle the status of every record.

        Parameters
        ----------
        in_leader_log : Callable[[str, str, int], bool]
            Tells whether (topic, producer, seq) sits in the final leader log.
        """
        for key, stat in self.records.items():
            if self._delivered.get(key):
                stat.status = RecordStatus.DELIVERED.value
            elif stat.pending or in_leader_log(*key):
                stat.status = RecordStatus.IN_FLIGHT.value
            else:
                stat.status = RecordStatus.LOST.value

    def lost(self, topic: Optional[str] = None) -> list[RecordStat]:
        return [
            s
            for s in self.records.values()
            if s.status == RecordStatus.LOST.value and (topic is None or s.topic == topic)
        ]

    def to_frames(self) -> dict[str, pd.DataFrame]:
        """
        Tables of the run, as exported.
        """
        matrix = []
        for key, stat in self.records.items():
            seen = self._delivered.get(key, [])
            for consumer in self.subscribers.get(stat.topic, []):
                matrix.append((stat.producer, stat.seq, stat.topic, consumer, "Y" if consumer in seen else "N"))
        records = [
            (s.topic, s.producer, s.seq, s.size, s.produce_time, s.status, s.duplicates) for s in self.records.values()
        ]
        samples = self.ports.samples if self.ports is not None else []
        ports = [(us_to_seconds(t), node, port, tx, rx) for t, node, port, tx, rx in samples]
        rows = {
            LATENCY: self.latency,
            DELIVERY: matrix,
            PORTS: ports,
            RECORDS: records,
            PIPELINE: self.pipeline,
            SINKS: self.sink_outputs,
            EVENTS: self.events,
        }
        return {name: pd.DataFrame(rows[name], columns=TABLES[name][1]) for name in TABLES}
