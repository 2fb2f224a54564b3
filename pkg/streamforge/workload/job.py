# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import itertools
from collections import deque
from fractions import Fraction
from typing import Optional

from streamforge.broker.client import ClientComponent, FetchClient, ProducerClient
from streamforge.broker.enums import Annotation
from streamforge.broker.models import Record
from streamforge.components._base import RunContext
from streamforge.spec.configs import StreamProcConfig
from streamforge.spec.enums import StoreMode
from streamforge.utils.exceptions import MalformedRecordError
from streamforge.utils.generic_utils import ceil_fraction, exact
from streamforge.utils.logger import LOGGER
from streamforge.utils.time_utils import ms_to_us, seconds_to_us
from streamforge.workload.operators._base import Output
from streamforge.workload.operators.factory import factory
from streamforge.workload.store import StoreGet, StorePut, StoreReply, add_values, store_cid


def busy_time(service_time_us: int, cpu_percentage: float) -> int:
    """
    Busy time of one record on a host with the given CPU share.
    """
    return ceil_fraction(Fraction(service_time_us) / exact(cpu_percentage))


class StreamJob(ClientComponent):
    """
    Stream processing job: consumes a topic, runs one operator per record
    on a single FIFO server and produces the outputs to another topic, or
    records them as sink outputs.

    Windows are tumbling processing-time windows aligned to time zero.
    """

    role = "job"

    def __init__(
        self,
        node_id: str,
        ctx: RunContext,
        config: StreamProcConfig,
        controller_node: str,
        cpu_percentage: float,
        max_fetch_bytes: int,
    ) -> None:
        super().__init__(node_id, ctx, controller_node)
        self.config = config
        self.operator = factory.build(config)
        self.service_us = busy_time(config.service_time(), cpu_percentage)
        self.window_us = seconds_to_us(config.window_seconds) if config.window_seconds is not None else None
        self.queue: deque[Record] = deque()
        self.busy = False
        self.busy_us = 0
        self.processed = 0
        self.malformed = 0
        self.out_seq = 0
        self.store_acks = 0
        self.store_backlog: deque[Output] = deque()
        self._store_reading: dict[int, Output] = {}
        self._store_writing: Optional[int] = None
        self._store_timeout_us = ms_to_us(config.request_timeout_ms)
        self._armed: Optional[int] = None
        self._seen: set[tuple[str, int]] = set()
        self._store_ids = itertools.count()

        self.fetcher = FetchClient(
            self,
            [config.in_topic],
            config.request_timeout_ms,
            max_fetch_bytes,
            self._on_records,
        )
        if not config.is_sink():
            self.producer = ProducerClient(self, config, ctx.metrics.acked, ctx.metrics.failed)
        self.on(StoreReply, self._on_store_reply)
        ctx.metrics.subscribe(config.in_topic, self.label)

    def on_crash(self) -> None:
        super().on_crash()
        self.operator.reset()
        self.queue.clear()
        self.busy = False
        self._armed = None
        self._seen.clear()
        self.store_backlog.clear()
        self._store_reading.clear()
        self._store_writing = None

    ##############################
    # Service
    ##############################

    def _on_records(self, records: list[Record]) -> None:
        for record in records:
            # At least once delivery upstream, deduplicated here.
            if record.ident in self._seen:
                continue
            self._seen.add(record.ident)
            self.ctx.metrics.delivered(self.label, record, self.now)
            self.queue.append(record)
        self._serve_next()

    def _serve_next(self) -> None:
        if self.busy or not self.queue:
            return
        record = self.queue.popleft()
        self.busy = True
        self.timer(self.service_us, "service", lambda: self._complete(record))

    def _complete(self, record: Record) -> None:
        self.busy = False
        self.busy_us += self.service_us
        self.processed += 1
        if self.window_us is not None:
            self._roll_window()
        try:
            outputs = self.operator.apply(record)
        except MalformedRecordError as err:
            self.malformed += 1
            LOGGER.warning(f"Job {self.cid} skipped {record!r}: {err}")
            self.annotate(Annotation.MALFORMED_RECORD, f"producer={record.producer},seq={record.seq}")
            outputs = []
        if self.window_us is not None:
            self._arm_window()
        self._emit(outputs)
        self._serve_next()

    ##############################
    # Windows
    ##############################

    def _arm_window(self) -> None:
        index = self.now // self.window_us
        if self._armed == index:
            return
        self._armed = index
        end = (index + 1) * self.window_us
        self.timer(end - self.now, "window-close", lambda: self._close_window(index))

    def _roll_window(self) -> None:
        if self._armed is not None and self.now // self.window_us != self._armed:
            self._close_window(self._armed)

    def _close_window(self, index: int) -> None:
        if self._armed != index:
            return
        self._armed = None
        self._emit(self.operator.close_window())

    ##############################
    # Outputs
    ##############################

    def _emit(self, outputs: list[Output]) -> None:
        if not outputs:
            return
        metrics = self.ctx.metrics
        if self.config.store is not None:
            self._store(outputs)
        if self.config.is_sink():
            for output in outputs:
                metrics.sink_output(self.label, self.now, output.key or "", output.value)
                metrics.pipeline_delivery(self.label, output.source, self.now)
            return
        records = []
        for output in outputs:
            record = Record(
                self.config.out_topic,
                self.label,
                self.out_seq,
                output.size,
                self.now,
                output.value,
                output.key,
                output.source,
            )
            self.out_seq += 1
            metrics.produced(record)
            records.append(record)
        self.producer.send(records)

    ##############################
    # Key-value store
    ##############################

    def _store(self, outputs: list[Output]) -> None:
        if self.config.store_mode == StoreMode.PUT.value:
            target = store_cid(self.config.store)
            for output in outputs:
                self.send(target, StorePut(next(self._store_ids), output.key or "", output.value))
            return
        self.store_backlog.extend(outputs)
        self._store_next()

    def _store_next(self) -> None:
        """
        Start the read of the next accumulated output. Updates run one at a
        time, so each read sees the previous write.
        """
        if self._store_reading or self._store_writing is not None or not self.store_backlog:
            return
        output = self.store_backlog.popleft()
        request_id = next(self._store_ids)
        self._store_reading[request_id] = output
        self.send(store_cid(self.config.store), StoreGet(request_id, output.key or ""))
        self.timer(self._store_timeout_us, "store-timeout", lambda: self._store_timeout(request_id))

    def _store_timeout(self, request_id: int) -> None:
        if self._store_reading.pop(request_id, None) is None and self._store_writing != request_id:
            return
        LOGGER.warning(f"Job {self.cid} got no answer from store {self.config.store}, skipping an update.")
        self._store_writing = None
        self._store_next()

    def _on_store_reply(self, src: str, msg: StoreReply) -> None:
        output = self._store_reading.pop(msg.request_id, None)
        if output is not None:
            try:
                value = add_values(msg.value, output.value)
            except MalformedRecordError as err:
                LOGGER.warning(f"Job {self.cid} overwrites stored '{msg.key}': {err}")
                value = output.value
            request_id = next(self._store_ids)
            self._store_writing = request_id
            self.send(src, StorePut(request_id, msg.key, value))
            self.timer(self._store_timeout_us, "store-timeout", lambda: self._store_timeout(request_id))
            return
        self.store_acks += 1
        if msg.request_id == self._store_writing:
            self._store_writing = None
            self._store_next()
