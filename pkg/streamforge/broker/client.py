# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import itertools
from typing import Callable, Optional

from streamforge.broker.enums import Annotation, ErrorCode, broker_cid, controller_cid
from streamforge.broker.models import Record
from streamforge.broker.protocol import (
    FetchRequest,
    FetchResponse,
    Metadata,
    MetadataRequest,
    ProduceRequest,
    ProduceResponse,
)
from streamforge.components._base import Component, RunContext
from streamforge.spec.configs import MIB, ClientConfig
from streamforge.utils.time_utils import ms_to_us, seconds_to_us

# Upper bound of the records carried by one produce request.
MAX_REQUEST_BYTES = MIB


class MetadataCache:
    """
    Client view of topic leadership.
    """

    def __init__(self) -> None:
        self.leaders: dict[str, tuple[Optional[str], int]] = {}

    def leader(self, topic: str) -> Optional[str]:
        entry = self.leaders.get(topic)
        return entry[0] if entry else None

    def update(self, metadata: Metadata) -> list[str]:
        """
        Merge pushed or requested metadata.

        Returns
        -------
        list[str]
            Topics whose leader changed.
        """
        changed = []
        for topic, (leader, epoch) in metadata.leaders.items():
            current = self.leaders.get(topic)
            if current is None or epoch > current[1] or (epoch == current[1] and leader != current[0]):
                self.leaders[topic] = (leader, epoch)
                changed.append(topic)
        return changed

    def clear(self) -> None:
        self.leaders.clear()


class ClientComponent(Component):
    """
    Component talking to the cluster through a producer client, a fetch
    client or both.
    """

    def __init__(self, node_id: str, ctx: RunContext, controller_node: str) -> None:
        super().__init__(node_id, ctx)
        self.controller = controller_cid(controller_node)
        self.metadata = MetadataCache()
        self.producer: Optional[ProducerClient] = None
        self.fetcher: Optional[FetchClient] = None
        self.on(Metadata, self._on_metadata)
        self.on(ProduceResponse, lambda src, msg: self.producer.on_response(msg))
        self.on(FetchResponse, lambda src, msg: self.fetcher.on_response(msg))

    @property
    def label(self) -> str:
        """
        Name used for this component in record and delivery metrics.
        """
        return self.cid

    def topics(self) -> list[str]:
        return list(self.ctx.spec.topic_names())

    def refresh_metadata(self) -> None:
        self.send(self.controller, MetadataRequest(self.topics()))

    def _on_metadata(self, src: str, msg: Metadata) -> None:
        for topic in self.metadata.update(msg):
            if self.producer is not None:
                self.producer.on_leader_change(topic)
            if self.fetcher is not None and topic in self.fetcher.positions:
                self.fetcher.on_leader_change(topic)

    def start(self) -> None:
        self.refresh_metadata()
        if self.producer is not None:
            self.producer.start()
        if self.fetcher is not None:
            self.fetcher.start()

    def on_crash(self) -> None:
        self.metadata.clear()
        if self.producer is not None:
            self.producer.fail_all()
        if self.fetcher is not None:
            self.fetcher.reset()


class ProducerClient:
    """
    Produce side of a client: one request in flight per topic, retries
    with the same sequence numbers and per record delivery timeouts.
    """

    def __init__(
        self,
        owner: ClientComponent,
        config: ClientConfig,
        on_ack: Callable[[Record], None],
        on_fail: Callable[[Record], None],
    ) -> None:
        self.owner = owner
        self.retry_us = ms_to_us(config.retry_interval_ms)
        self.timeout_us = seconds_to_us(config.produce_timeout_s)
        self.on_ack = on_ack
        self.on_fail = on_fail
        self.pending: dict[str, list[Record]] = {}
        self.inflight: dict[str, int] = {}
        self._request_ids = itertools.count()

    def start(self) -> None:
        self.owner.every(self.retry_us, "produce-tick", self._tick, first=self.retry_us)

    def send(self, records: list[Record]) -> None:
        """
        Queue records and push them to the topic leaders.
        """
        touched = []
        for record in records:
            self.pending.setdefault(record.topic, []).append(record)
            if record.topic not in touched:
                touched.append(record.topic)
        for topic in touched:
            self._flush(topic)

    def _flush(self, topic: str) -> None:
        if topic in self.inflight or not self.pending.get(topic):
            return
        leader = self.owner.metadata.leader(topic)
        if leader is None:
            return
        batch: list[Record] = []
        total = 0
        for record in self.pending[topic]:
            if batch and total + record.size > MAX_REQUEST_BYTES:
                break
            batch.append(record)
            total += record.size
        request_id = next(self._request_ids)
        self.inflight[topic] = request_id
        self.owner.send(broker_cid(leader), ProduceRequest(topic, request_id, batch))
        self.owner.timer(self.retry_us, "produce-retry", lambda: self._retry(topic, request_id))

    def _retry(self, topic: str, request_id: int) -> None:
        if self.inflight.get(topic) != request_id:
            return
        del self.inflight[topic]
        self.owner.refresh_metadata()
        self._expire()
        self._flush(topic)

    def _tick(self) -> None:
        self._expire()
        for topic, records in self.pending.items():
            if records and topic not in self.inflight:
                if self.owner.metadata.leader(topic) is None:
                    self.owner.refresh_metadata()
                self._flush(topic)

    def _expire(self) -> None:
        now = self.owner.now
        for topic, records in self.pending.items():
            expired = [r for r in records if now - r.produce_time >= self.timeout_us]
            if not expired:
                continue
            self.pending[topic] = [r for r in records if now - r.produce_time < self.timeout_us]
            for record in expired:
                self.owner.annotate(Annotation.RECORD_TIMEOUT, f"topic={topic},seq={record.seq}")
                self.on_fail(record)

    def on_response(self, response: ProduceResponse) -> None:
        topic = response.topic
        if response.acked:
            acked = set(response.acked)
            done = [r for r in self.pending.get(topic, []) if r.ident in acked]
            self.pending[topic] = [r for r in self.pending.get(topic, []) if r.ident not in acked]
            for record in done:
                self.on_ack(record)
        if self.inflight.get(topic) != response.request_id:
            return
        if response.error is not None:
            # The retry timer of this request resends once metadata is fresh.
            self.owner.refresh_metadata()
            return
        del self.inflight[topic]
        self._flush(topic)

    def on_leader_change(self, topic: str) -> None:
        self.inflight.pop(topic, None)
        self._flush(topic)

    def fail_all(self) -> None:
        """
        Fail every unacknowledged record, as on a crash.
        """
        pending, self.pending = self.pending, {}
        self.inflight.clear()
        for records in pending.values():
            for record in records:
                self.on_fail(record)


class FetchClient:
    """
    Fetch side of a client: one long poll per subscribed topic.

    Positions are volatile. None means the latest committed offset.
    """

    def __init__(
        self,
        owner: ClientComponent,
        topics: list[str],
        request_timeout_ms: int,
        max_bytes: int,
        on_records: Callable[[list[Record]], None],
    ) -> None:
        self.owner = owner
        self.timeout_us = ms_to_us(request_timeout_ms)
        self.max_bytes = max_bytes
        self.on_records = on_records
        self.positions: dict[str, Optional[int]] = {topic: None for topic in topics}
        self._outstanding: dict[str, int] = {}
        self._tokens = itertools.count()

    def start(self) -> None:
        for topic in self.positions:
            self._fetch(topic)

    def reset(self) -> None:
        self.positions = {topic: None for topic in self.positions}
        self._outstanding.clear()

    def _fetch(self, topic: str) -> None:
        token = next(self._tokens)
        self._outstanding[topic] = token
        leader = self.owner.metadata.leader(topic)
        if leader is not None:
            request = FetchRequest(topic, self.positions[topic], self.max_bytes, self.owner.label)
            self.owner.send(broker_cid(leader), request)
        self.owner.timer(self.timeout_us, "fetch-timeout", lambda: self._timeout(topic, token))

    def _timeout(self, topic: str, token: int) -> None:
        if self._outstanding.get(topic) == token:
            self.owner.refresh_metadata()
            self._fetch(topic)

    def on_response(self, response: FetchResponse) -> None:
        topic = response.topic
        # Responses to replaced requests only count if they start at the current position.
        if topic not in self.positions or response.from_offset != self.positions[topic]:
            return
        if response.error == ErrorCode.OFFSET_OUT_OF_RANGE.value:
            self.owner.annotate(
                Annotation.OFFSET_RESET,
                f"topic={topic},from={response.from_offset},to={response.high_watermark}",
            )
            self.positions[topic] = response.high_watermark
            self._fetch(topic)
            return
        if response.error is not None:
            self.owner.refresh_metadata()
            return
        if not response.records:
            self._fetch(topic)
            return
        self.positions[topic] = response.records[-1].offset + 1
        self.on_records(response.records)
        self._fetch(topic)

    def on_leader_change(self, topic: str) -> None:
        self._fetch(topic)
