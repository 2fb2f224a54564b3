# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from streamforge.broker.client import ClientComponent, ProducerClient
from streamforge.broker.enums import Annotation
from streamforge.broker.models import Record
from streamforge.components._base import RunContext
from streamforge.spec.configs import ProducerConfig
from streamforge.spec.enums import ProducerMode
from streamforge.utils.generic_utils import ceil_fraction, exact
from streamforge.utils.logger import LOGGER
from streamforge.utils.time_utils import ms_to_us
from streamforge.workload.sources import payload_size, read_payloads


class ProducerStub(ClientComponent):
    """
    Data source emitting synthetic blobs, lines of a file or files of a
    directory, paced by rate or by a fixed interval.

    Unacknowledged records occupy the buffer; a full buffer stalls
    emission until acknowledgements free space.
    """

    role = "producer"

    def __init__(self, node_id: str, ctx: RunContext, config: ProducerConfig, controller_node: str) -> None:
        super().__init__(node_id, ctx, controller_node)
        self.config = config
        weights = config.topic_weights()
        self.topic_choices = list(weights)
        self.topic_weights = list(weights.values())
        self.payloads: Optional[list[str]] = None
        if config.mode != ProducerMode.SYNTHETIC_RATE.value:
            self.payloads = read_payloads(config.mode, ctx.resolve(config.path))
        self.rate = exact(config.rate_kbps) if config.rate_kbps is not None else None
        self.interval_us = ms_to_us(config.interval_ms)

        # Sequence numbers and file positions survive crashes.
        self.seq = 0
        self.position = 0
        self.buffered_bytes = 0
        self.stalled = False
        self._anchor = 0
        self._paced_bits = 0
        self._paced_count = 0
        self.producer = ProducerClient(self, config, self._on_ack, self._on_fail)

    @property
    def label(self) -> str:
        return self.node_id

    def start(self) -> None:
        super().start()
        self._restart_pacing()
        self.timer(0, "emit", self._emit)

    def on_crash(self) -> None:
        super().on_crash()
        self.stalled = False

    def exhausted(self) -> bool:
        return self.payloads is not None and self.position >= len(self.payloads)

    ##############################
    # Emission
    ##############################

    def _restart_pacing(self) -> None:
        self._anchor = self.now
        self._paced_bits = 0
        self._paced_count = 0

    def _next_emission(self) -> int:
        if self.rate is not None:
            return self._anchor + ceil_fraction(Fraction(self._paced_bits * 1000) / self.rate)
        return self._anchor + self._paced_count * self.interval_us

    def _emit(self) -> None:
        if self.exhausted():
            return
        if self.payloads is None:
            payload, size = None, self.config.record_size_bytes
        else:
            payload = self.payloads[self.position]
            size = payload_size(payload)
        if self.buffered_bytes + size > self.config.buffer_bytes:
            if not self.stalled:
                self.stalled = True
                LOGGER.warning(f"Producer {self.node_id} buffer full after {self.seq} records.")
                self.annotate(
                    Annotation.BUFFER_FULL_STALL,
                    f"buffered_bytes={self.buffered_bytes},records={self.seq}",
                )
            return

        if len(self.topic_choices) == 1:
            topic = self.topic_choices[0]
        else:
            topic = self.rng.weighted_choice(self.topic_choices, self.topic_weights)
        record = Record(topic, self.label, self.seq, size, self.now, payload)
        self.seq += 1
        if self.payloads is not None:
            self.position += 1
        self.buffered_bytes += size
        self._paced_bits += size * 8
        self._paced_count += 1
        self.ctx.metrics.produced(record)
        self.producer.send([record])
        self.timer(max(0, self._next_emission() - self.now), "emit", self._emit)

    def _release(self, record: Record) -> None:
        self.buffered_bytes -= record.size
        if self.stalled and self.alive:
            self.stalled = False
            self._restart_pacing()
            self.timer(0, "emit", self._emit)

    def _on_ack(self, record: Record) -> None:
        self.ctx.metrics.acked(record)
        self._release(record)

    def _on_fail(self, record: Record) -> None:
        self.ctx.metrics.failed(record)
        self._release(record)
