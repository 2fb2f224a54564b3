# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from typing import Optional

from streamforge.broker.enums import Annotation, broker_cid
from streamforge.broker.protocol import (
    Heartbeat,
    HeartbeatAck,
    IsrUpdate,
    LeaderAndIsr,
    Metadata,
    MetadataRequest,
    TransferReady,
    TransferRequest,
)
from streamforge.components._base import Component, RunContext
from streamforge.sim.events import SimEvent
from streamforge.spec.configs import BrokerConfig
from streamforge.utils.generic_utils import natural_key
from streamforge.utils.logger import LOGGER
from streamforge.utils.time_utils import ms_to_us


class Controller(Component):
    """
    Cluster controller, co-located with the lowest broker.

    Tracks broker liveness through heartbeats, elects a new leader when a
    leader goes silent, hands leadership back to preferred replicas and
    pushes metadata to every client.
    """

    role = "controller"

    def __init__(self, node_id: str, ctx: RunContext, config: BrokerConfig, clients: list[str]) -> None:
        super().__init__(node_id, ctx)
        self.config = config
        self.clients = list(clients)
        self.heartbeat_us = ms_to_us(config.heartbeat_interval_ms)
        self.session_us = ms_to_us(config.session_timeout_ms)
        self.election_us = ms_to_us(config.election_delay_ms)
        self.check_us = ms_to_us(config.preferred_check_interval_ms)

        spec = ctx.spec
        self.brokers = spec.brokers()
        self.last_seen = {b: 0 for b in self.brokers}
        self.live = {b: True for b in self.brokers}
        self.incarnations = {b: 0 for b in self.brokers}
        self.preferred = {t.name: t.preferred_leader for t in spec.topics}
        self.replicas = {t.name: spec.replicas(t.name) for t in spec.topics}
        self.leaders: dict[str, Optional[str]] = {}
        self.epochs: dict[str, int] = {}
        self.isr: dict[str, list[str]] = {}
        self.elections: dict[str, SimEvent] = {}
        self._initialized = False

        self.on(Heartbeat, self._on_heartbeat)
        self.on(IsrUpdate, self._on_isr_update)
        self.on(TransferReady, self._on_transfer_ready)
        self.on(MetadataRequest, self._on_metadata_request)

    def start(self) -> None:
        for broker in self.brokers:
            self.last_seen[broker] = self.now
        if not self._initialized:
            self._initialized = True
            for topic, replicas in self.replicas.items():
                self.leaders[topic] = self.preferred[topic]
                self.epochs[topic] = 1
                self.isr[topic] = list(replicas)
        for topic in self.replicas:
            self._push(topic)
        self.every(self.heartbeat_us, "liveness", self._check_liveness, first=self.heartbeat_us)
        self.every(self.check_us, "preferred-check", self._check_preferred, first=self.check_us)

    def on_crash(self) -> None:
        self.elections.clear()

    def metadata(self) -> Metadata:
        return Metadata({topic: (self.leaders[topic], self.epochs[topic]) for topic in self.replicas})

    ##############################
    # Liveness
    ##############################

    def _on_heartbeat(self, src: str, msg: Heartbeat) -> None:
        broker = msg.broker
        self.last_seen[broker] = self.now
        self.send(src, HeartbeatAck())
        rejoined = not self.live[broker] or msg.incarnation != self.incarnations[broker]
        self.live[broker] = True
        self.incarnations[broker] = msg.incarnation
        if rejoined:
            LOGGER.info(f"Broker {broker} is back at t={self.now}us.")
            self.annotate(Annotation.BROKER_RECONNECTED, f"broker={broker}")
            for topic, replicas in self.replicas.items():
                if broker in replicas and self.leaders[topic] is not None:
                    self.send(src, self._leader_and_isr(topic))
            for client in self.clients:
                if self.ctx.network.node_of(client) == broker:
                    self.send(client, self.metadata())
            for topic in self.replicas:
                if self.leaders[topic] is None and topic not in self.elections:
                    self._elect(topic, None)
            return
        # A leader that resigned while the controller still counts on it is reinstated.
        for topic, leader in self.leaders.items():
            if leader == broker and topic not in msg.leading and topic not in self.elections:
                self.send(src, self._leader_and_isr(topic))

    def _check_liveness(self) -> None:
        for broker in self.brokers:
            if not self.live[broker] or self.now - self.last_seen[broker] <= self.session_us:
                continue
            self.live[broker] = False
            LOGGER.info(f"Broker {broker} missed its session at t={self.now}us.")
            for topic, leader in self.leaders.items():
                if leader != broker or topic in self.elections:
                    continue
                self.annotate(
                    Annotation.LEADER_DISCONNECT_DETECTED,
                    f"topic={topic},leader={broker},epoch={self.epochs[topic]}",
                )
                self.elections[topic] = self.timer(
                    self.election_us, "election", lambda t=topic, b=broker: self._elect(t, b)
                )

    ##############################
    # Elections
    ##############################

    def _elect(self, topic: str, failed: Optional[str]) -> None:
        """
        Pick the lowest live in-sync replica other than the failed leader.
        """
        self.elections.pop(topic, None)
        candidates = sorted(
            [b for b in self.isr[topic] if b != failed and self.live[b]],
            key=natural_key,
        )
        if not candidates:
            if self.leaders[topic] is not None:
                LOGGER.warning(f"No live in-sync replica for topic {topic}.")
                self.annotate(Annotation.TOPIC_UNAVAILABLE, f"topic={topic},epoch={self.epochs[topic]}")
                self.leaders[topic] = None
                self._broadcast_metadata()
            return
        self.epochs[topic] += 1
        self.leaders[topic] = candidates[0]
        self.isr[topic] = candidates
        LOGGER.info(f"Elected {candidates[0]} for topic {topic}, epoch {self.epochs[topic]}.")
        self.annotate(
            Annotation.LEADER_ELECTED,
            f"topic={topic},leader={candidates[0]},epoch={self.epochs[topic]}",
        )
        self._push(topic, failover=True)

    def _check_preferred(self) -> None:
        for topic, preferred in self.preferred.items():
            leader = self.leaders[topic]
            if leader is None or leader == preferred or topic in self.elections:
                continue
            if self.live[preferred] and preferred in self.isr[topic]:
                self.send(broker_cid(leader), TransferRequest(topic, self.epochs[topic], preferred))

    def _on_transfer_ready(self, src: str, msg: TransferReady) -> None:
        topic = msg.topic
        leader = self.leaders.get(topic)
        if msg.epoch != self.epochs.get(topic) or leader is None or self.ctx.network.node_of(src) != leader:
            return
        if not self.live[msg.target]:
            return
        self.epochs[topic] += 1
        self.leaders[topic] = msg.target
        if msg.target not in self.isr[topic]:
            self.isr[topic] = sorted(self.isr[topic] + [msg.target], key=natural_key)
        LOGGER.info(f"Leadership of {topic} back to {msg.target}, epoch {self.epochs[topic]}.")
        self.annotate(
            Annotation.LEADERSHIP_RESTORED,
            f"topic={topic},leader={msg.target},epoch={self.epochs[topic]}",
        )
        self._push(topic)

    def _on_isr_update(self, src: str, msg: IsrUpdate) -> None:
        if msg.epoch == self.epochs.get(msg.topic) and self.ctx.network.node_of(src) == self.leaders[msg.topic]:
            self.isr[msg.topic] = list(msg.isr)

    ##############################
    # Propagation
    ##############################

    def _leader_and_isr(self, topic: str, failover: bool = False) -> LeaderAndIsr:
        return LeaderAndIsr(topic, self.leaders[topic], self.epochs[topic], list(self.isr[topic]), self.now, failover)

    def _push(self, topic: str, failover: bool = False) -> None:
        message = self._leader_and_isr(topic, failover)
        for replica in self.replicas[topic]:
            self.send(broker_cid(replica), message)
        self._broadcast_metadata()

    def _broadcast_metadata(self) -> None:
        for client in self.clients:
            self.send(client, self.metadata())

    def _on_metadata_request(self, src: str, msg: MetadataRequest) -> None:
        self.send(src, self.metadata())
