# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from streamforge.broker.client import ClientComponent, FetchClient
from streamforge.broker.models import Record
from streamforge.components._base import RunContext
from streamforge.spec.configs import ConsumerConfig


class ConsumerStub(ClientComponent):
    """
    Subscriber recording latency and delivery of every record it receives.
    """

    role = "consumer"

    def __init__(
        self,
        node_id: str,
        ctx: RunContext,
        config: ConsumerConfig,
        controller_node: str,
        max_fetch_bytes: int,
    ) -> None:
        super().__init__(node_id, ctx, controller_node)
        self.config = config
        self.received = 0
        self.fetcher = FetchClient(
            self,
            config.topic_list(),
            config.request_timeout_ms,
            max_fetch_bytes,
            self._on_records,
        )
        for topic in config.topic_list():
            ctx.metrics.subscribe(topic, self.label)

    @property
    def label(self) -> str:
        return self.node_id

    def _on_records(self, records: list[Record]) -> None:
        metrics = self.ctx.metrics
        for record in records:
            if not metrics.delivered(self.label, record, self.now):
                continue
            self.received += 1
            # Outputs of a pipeline end here.
            if record.source != (record.producer, record.seq, record.produce_time):
                metrics.pipeline_delivery(self.label, record.source, self.now)
