# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from enum import Enum

# Exported tables: name -> (file name, columns).
LATENCY = "latency"
DELIVERY = "delivery_matrix"
PORTS = "port_throughput"
RECORDS = "records"
PIPELINE = "pipeline_latency"
SINKS = "sink_outputs"
EVENTS = "events"

TABLES: dict[str, tuple[str, list[str]]] = {
    LATENCY: (
        "latency.csv",
        ["topic", "producer", "producer_seq", "consumer", "produce_time_us", "deliver_time_us"],
    ),
    DELIVERY: ("delivery_matrix.csv", ["producer", "producer_seq", "topic", "consumer", "delivered"]),
    PORTS: ("port_throughput.csv", ["time_s", "node", "port", "tx_bytes", "rx_bytes"]),
    RECORDS: (
        "records.csv",
        ["topic", "producer", "producer_seq", "size_bytes", "produce_time_us", "status", "duplicates"],
    ),
    PIPELINE: (
        "pipeline_latency.csv",
        ["pipeline", "source_producer", "source_seq", "produce_time_us", "deliver_time_us"],
    ),
    SINKS: ("sink_outputs.csv", ["sink", "time_us", "key", "value"]),
    EVENTS: ("events.log", ["time_us", "component", "kind", "detail"]),
}

# Columns read back as strings.
STRING_COLUMNS = {
    "topic",
    "producer",
    "consumer",
    "node",
    "status",
    "delivered",
    "pipeline",
    "source_producer",
    "sink",
    "key",
    "value",
    "component",
    "kind",
    "detail",
}

SUMMARY_FILE = "summary.yaml"


class RecordStatus(Enum):
    """
    Final state of a produced record.
    """

    DELIVERED = "delivered"
    IN_FLIGHT = "in_flight"
    LOST = "lost"


class RecordStat:
    """
    Bookkeeping of one produced record.
    """

    __slots__ = ("topic", "producer", "seq", "size", "produce_time", "acked", "failed", "status", "duplicates")

    def __init__(self, topic: str, producer: str, seq: int, size: int, produce_time: int) -> None:
        self.topic = topic
        self.producer = producer
        self.seq = seq
        self.size = size
        self.produce_time = produce_time
        self.acked = False
        self.failed = False
        self.status = RecordStatus.IN_FLIGHT.value
        self.duplicates = 0

    @property
    def pending(self) -> bool:
        """
        Still waiting for an acknowledgement at its producer.
        """
        return not self.acked and not self.failed
