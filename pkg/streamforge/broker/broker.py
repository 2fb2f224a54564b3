# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from typing import Optional

from streamforge.broker.enums import Annotation, ErrorCode, broker_cid, controller_cid
from streamforge.broker.models import Record, RecordId, TopicLog, TruncationReport
from streamforge.broker.protocol import (
    FetchRequest,
    FetchResponse,
    Heartbeat,
    HeartbeatAck,
    IsrUpdate,
    LeaderAndIsr,
    OffsetForEpochRequest,
    OffsetForEpochResponse,
    ProduceRequest,
    ProduceResponse,
    Replicate,
    ReplicateAck,
    TransferReady,
    TransferRequest,
)
from streamforge.components._base import Component, RunContext
from streamforge.spec.configs import BrokerConfig
from streamforge.spec.enums import ConsistencyMode
from streamforge.utils.generic_utils import natural_key
from streamforge.utils.logger import LOGGER
from streamforge.utils.time_utils import ms_to_us


class FollowerProgress:
    """
    Leader side replication state of one follower.
    """

    __slots__ = ("match", "next", "last_caught_up", "sent_at", "sent_end", "sent_records")

    def __init__(self, next_offset: int, now: int) -> None:
        self.match = -1
        self.next = next_offset
        self.last_caught_up = now
        self.sent_at: Optional[int] = None
        self.sent_end = next_offset
        self.sent_records = False


class PendingProduce:
    """
    Produce request waiting for its records to commit (raft mode).
    """

    __slots__ = ("client", "request_id", "acked", "last_offset")

    def __init__(self, client: str, request_id: int, acked: list[RecordId], last_offset: int) -> None:
        self.client = client
        self.request_id = request_id
        self.acked = acked
        self.last_offset = last_offset


class BacklogTracker:
    """
    Records produced before a failover election that the new leader
    appends and commits within the backlog window, and the bytes of those
    records served to each consumer.

    Only records appended after the election count, so every consumer
    of the topic needs the whole held set from the new leader.
    """

    def __init__(self, elected_at: int, until: int, floor: int) -> None:
        self.elected_at = elected_at
        self.until = until
        self.floor = floor
        self.held: dict[RecordId, int] = {}
        self.served: dict[str, int] = {}
        self._seen: dict[str, set[RecordId]] = {}

    @property
    def held_bytes(self) -> int:
        return sum(self.held.values())

    def committed(self, records: list[Record], now: int) -> None:
        if now > self.until:
            return
        for record in records:
            if record.offset >= self.floor and record.produce_time < self.elected_at:
                self.held[record.ident] = record.size

    def serving(self, label: str, records: list[Record]) -> None:
        seen = self._seen.setdefault(label, set())
        size = 0
        for record in records:
            if record.ident in self.held and record.ident not in seen:
                seen.add(record.ident)
                size += self.held[record.ident]
        if size:
            self.served[label] = self.served.get(label, 0) + size

    def detail(self, topic: str) -> str:
        served = ";".join(f"{k}:{self.served[k]}" for k in sorted(self.served, key=natural_key)) or "-"
        return f"topic={topic},held_bytes={self.held_bytes},served={served}"


class LeaderState:
    """
    Volatile state of a topic this broker leads.
    """

    def __init__(self, followers: list[str], log_end: int, now: int) -> None:
        self.followers = {f: FollowerProgress(log_end, now) for f in followers}
        self.pending: list[PendingProduce] = []
        self.parked: dict[str, tuple[str, FetchRequest, int]] = {}
        self.transfer_target: Optional[str] = None
        self.transfer_since = 0
        self.backlog: Optional[BacklogTracker] = None


class Broker(Component):
    """
    Replica of every topic that lists this node among its replicas.

    The broker acts as leader or follower per topic as instructed by the
    controller, replicates by pushing records to its followers and keeps
    its logs across crashes.
    """

    role = "broker"

    def __init__(self, node_id: str, ctx: RunContext, config: BrokerConfig, controller_node: str) -> None:
        super().__init__(node_id, ctx)
        self.config = config
        self.controller = controller_cid(controller_node)
        self.heartbeat_us = ms_to_us(config.heartbeat_interval_ms)
        self.session_us = ms_to_us(config.session_timeout_ms)
        self.lag_us = ms_to_us(config.replica_lag_time_ms)
        self.backlog_us = ms_to_us(config.backlog_window_ms)

        spec = ctx.spec
        self.logs: dict[str, TopicLog] = {}
        self.modes: dict[str, str] = {}
        for topic in spec.topics:
            replicas = spec.replicas(topic.name)
            if node_id in replicas:
                self.logs[topic.name] = TopicLog(topic.name, node_id, replicas)
                self.modes[topic.name] = topic.consistency_mode
        self.leading: dict[str, LeaderState] = {}
        self.syncing: set[str] = set()
        self.last_controller_contact = 0
        self.truncations: list[TruncationReport] = []

        self.on(HeartbeatAck, self._on_heartbeat_ack)
        self.on(LeaderAndIsr, self._on_leader_and_isr)
        self.on(ProduceRequest, self._on_produce)
        self.on(FetchRequest, self._on_fetch)
        self.on(Replicate, self._on_replicate)
        self.on(ReplicateAck, self._on_replicate_ack)
        self.on(OffsetForEpochRequest, self._on_offset_for_epoch)
        self.on(OffsetForEpochResponse, self._on_offset_for_epoch_response)
        self.on(TransferRequest, self._on_transfer_request)

    def start(self) -> None:
        self.last_controller_contact = self.now
        self.every(self.heartbeat_us, "heartbeat", self._tick, first=self.heartbeat_us)

    def on_crash(self) -> None:
        # Logs survive, roles do not.
        self.leading.clear()
        self.syncing.clear()
        for log in self.logs.values():
            log.leader = None

    ##############################
    # Controller session
    ##############################

    def _tick(self) -> None:
        self.send(self.controller, Heartbeat(self.node_id, self.incarnation, list(self.leading)))
        if self.leading and self.now - self.last_controller_contact > self.session_us:
            for topic in list(self.leading):
                LOGGER.warning(f"Broker {self.node_id} lost the controller, resigning leadership of {topic}.")
                self.annotate(Annotation.LEADER_RESIGNED, f"topic={topic},epoch={self.logs[topic].epoch}")
                self._step_down(topic)
                self.logs[topic].leader = None
        for topic in list(self.leading):
            self._leader_tick(topic)
        for topic in self.syncing:
            self._request_epoch_end(topic)

    def _on_heartbeat_ack(self, src: str, msg: HeartbeatAck) -> None:
        self.last_controller_contact = self.now

    def _on_leader_and_isr(self, src: str, msg: LeaderAndIsr) -> None:
        log = self.logs.get(msg.topic)
        if log is None or msg.epoch < log.epoch:
            return
        self.last_controller_contact = self.now
        if msg.leader == self.node_id:
            if msg.topic in self.leading and msg.epoch == log.epoch:
                return
            self._become_leader(log, msg)
        else:
            if msg.epoch == log.epoch and log.leader == msg.leader and msg.topic not in self.leading:
                log.isr = list(msg.isr)
                return
            self._become_follower(log, msg)

    def _become_leader(self, log: TopicLog, msg: LeaderAndIsr) -> None:
        topic = log.topic
        log.leader = self.node_id
        log.epoch = msg.epoch
        log.isr = list(msg.isr)
        self.syncing.discard(topic)
        followers = [r for r in log.replicas if r != self.node_id]
        state = LeaderState(followers, log.end_offset, self.now)
        self.leading[topic] = state
        self.annotate(Annotation.LEADER_ACTIVE, f"topic={topic},epoch={msg.epoch}")
        if msg.failover:
            tracker = BacklogTracker(msg.elected_at, msg.elected_at + self.backlog_us, log.end_offset)
            state.backlog = tracker
            # Held records are committed during one window and served during the next.
            self.timer(
                max(0, tracker.until + self.backlog_us - self.now),
                "backlog-report",
                lambda: self.annotate(Annotation.BACKLOG_SERVED, tracker.detail(topic)),
            )
        for follower in followers:
            self._replicate_to(topic, follower)
        self._update_high_watermark(topic)

    def _become_follower(self, log: TopicLog, msg: LeaderAndIsr) -> None:
        topic = log.topic
        if topic in self.leading:
            self._step_down(topic)
        log.leader = msg.leader
        log.epoch = msg.epoch
        log.isr = list(msg.isr)
        if msg.leader is None:
            self.syncing.discard(topic)
            return
        self.syncing.add(topic)
        self._request_epoch_end(topic)

    def _step_down(self, topic: str) -> None:
        state = self.leading.pop(topic)
        for pending in state.pending:
            self.send(pending.client, ProduceResponse(topic, pending.request_id, [], ErrorCode.NOT_LEADER.value))
        for client, request, _ in state.parked.values():
            self._fetch_error(client, request, ErrorCode.NOT_LEADER)

    ##############################
    # Produce and fetch
    ##############################

    def _on_produce(self, src: str, msg: ProduceRequest) -> None:
        topic = msg.topic
        state = self.leading.get(topic)
        if topic not in self.logs:
            self.send(src, ProduceResponse(topic, msg.request_id, [], ErrorCode.UNKNOWN_TOPIC.value))
            return
        if state is None:
            self.send(src, ProduceResponse(topic, msg.request_id, [], ErrorCode.NOT_LEADER.value))
            return
        if state.transfer_target is not None:
            self.send(src, ProduceResponse(topic, msg.request_id, [], ErrorCode.LEADER_TRANSFER.value))
            return

        log = self.logs[topic]
        offsets = []
        for record in msg.records:
            offset = log.lookup(record.ident)
            if offset is None:
                offset = log.append(record).offset
            offsets.append(offset)
        idents = [r.ident for r in msg.records]
        if self.modes[topic] == ConsistencyMode.ZK.value:
            log.acked.update(idents)
            self.send(src, ProduceResponse(topic, msg.request_id, idents))
        else:
            state.pending.append(PendingProduce(src, msg.request_id, idents, max(offsets)))
        for follower in state.followers:
            self._replicate_to(topic, follower)
        self._update_high_watermark(topic)

    def _on_fetch(self, src: str, msg: FetchRequest) -> None:
        state = self.leading.get(msg.topic)
        if state is None:
            self._fetch_error(src, msg, ErrorCode.NOT_LEADER)
            return
        log = self.logs[msg.topic]
        start = log.high_watermark if msg.from_offset is None else msg.from_offset
        if start > log.end_offset:
            self._fetch_error(src, msg, ErrorCode.OFFSET_OUT_OF_RANGE)
            return
        state.parked.pop(msg.label, None)
        if start < log.high_watermark:
            self._serve(msg.topic, src, msg, start)
        else:
            state.parked[msg.label] = (src, msg, start)

    def _serve(self, topic: str, client: str, request: FetchRequest, start: int) -> None:
        log = self.logs[topic]
        max_bytes = min(request.max_bytes, self.config.max_fetch_bytes)
        records = log.read(start, log.high_watermark, max_bytes)
        state = self.leading[topic]
        if state.backlog is not None:
            state.backlog.serving(request.label, records)
        self.send(client, FetchResponse(topic, request.from_offset, records, log.high_watermark))

    def _fetch_error(self, client: str, request: FetchRequest, error: ErrorCode) -> None:
        log = self.logs.get(request.topic)
        high_watermark = log.high_watermark if log is not None else 0
        self.send(client, FetchResponse(request.topic, request.from_offset, [], high_watermark, error.value))

    ##############################
    # Replication, leader side
    ##############################

    def _replicate_to(self, topic: str, follower: str, empty: bool = False) -> None:
        log = self.logs[topic]
        progress = self.leading[topic].followers[follower]
        start = min(progress.next, log.end_offset)
        records = [] if empty else log.read(start, log.end_offset, self.config.max_fetch_bytes)
        progress.next = start + len(records)
        progress.sent_at = self.now
        progress.sent_records = bool(records)
        progress.sent_end = log.end_offset
        self.send(broker_cid(follower), Replicate(topic, log.epoch, start, records, log.high_watermark))

    def _on_replicate_ack(self, src: str, msg: ReplicateAck) -> None:
        state = self.leading.get(msg.topic)
        log = self.logs.get(msg.topic)
        if state is None or msg.epoch != log.epoch or msg.broker not in state.followers:
            return
        progress = state.followers[msg.broker]
        progress.match = msg.log_end
        progress.next = msg.log_end if msg.reset else max(progress.next, msg.log_end)
        progress.sent_at = None
        if msg.log_end >= progress.sent_end:
            progress.last_caught_up = self.now
        if progress.next < log.end_offset:
            self._replicate_to(msg.topic, msg.broker)
        self._maintain_isr(msg.topic)
        self._update_high_watermark(msg.topic)
        self._check_transfer(msg.topic)

    def _leader_tick(self, topic: str) -> None:
        state = self.leading[topic]
        for follower, progress in state.followers.items():
            if progress.sent_at is None:
                self._replicate_to(topic, follower)
            elif self.now - progress.sent_at >= (self.lag_us if progress.sent_records else self.heartbeat_us):
                # Unanswered: resend an empty batch and restart from the answer.
                progress.next = max(progress.match, 0)
                self._replicate_to(topic, follower, empty=True)
        if state.transfer_target is not None and self.now - state.transfer_since > self.session_us:
            LOGGER.info(f"Broker {self.node_id} gave up handing {topic} to {state.transfer_target}.")
            state.transfer_target = None
        self._maintain_isr(topic)
        self._update_high_watermark(topic)

    def _maintain_isr(self, topic: str) -> None:
        log = self.logs[topic]
        state = self.leading[topic]
        if self.modes[topic] == ConsistencyMode.ZK.value:
            isr = [self.node_id]
            for follower, progress in state.followers.items():
                if follower in log.isr:
                    if self.now - progress.last_caught_up <= self.lag_us:
                        isr.append(follower)
                elif progress.match >= log.high_watermark:
                    isr.append(follower)
        else:
            isr = [self.node_id] + [f for f, p in state.followers.items() if p.match >= log.high_watermark]
        isr = sorted(isr, key=natural_key)
        if isr == sorted(log.isr, key=natural_key):
            return
        removed = [b for b in log.isr if b not in isr]
        added = [b for b in isr if b not in log.isr]
        if removed:
            self.annotate(Annotation.ISR_SHRINK, f"topic={topic},removed={';'.join(removed)}")
        if added:
            self.annotate(Annotation.ISR_EXPAND, f"topic={topic},added={';'.join(added)}")
        log.isr = isr
        self.send(self.controller, IsrUpdate(topic, log.epoch, list(isr)))

    def _update_high_watermark(self, topic: str) -> None:
        log = self.logs[topic]
        state = self.leading[topic]
        if self.modes[topic] == ConsistencyMode.ZK.value:
            ends = [log.end_offset] + [max(p.match, 0) for f, p in state.followers.items() if f in log.isr]
            target = min(ends)
        else:
            ends = sorted([log.end_offset] + [max(p.match, 0) for p in state.followers.values()], reverse=True)
            target = ends[len(log.replicas) // 2]
        previous = log.high_watermark
        if not log.set_high_watermark(target):
            return
        if state.backlog is not None:
            state.backlog.committed(log.records[previous : log.high_watermark], self.now)
        if state.pending:
            still = []
            for pending in state.pending:
                if pending.last_offset < log.high_watermark:
                    log.acked.update(pending.acked)
                    self.send(pending.client, ProduceResponse(topic, pending.request_id, pending.acked))
                else:
                    still.append(pending)
            state.pending = still
        for label, (client, request, start) in list(state.parked.items()):
            if start < log.high_watermark:
                del state.parked[label]
                self._serve(topic, client, request, start)

    ##############################
    # Replication, follower side
    ##############################

    def _on_replicate(self, src: str, msg: Replicate) -> None:
        log = self.logs.get(msg.topic)
        if log is None or msg.epoch != log.epoch or msg.topic in self.syncing or msg.topic in self.leading:
            return
        if self.ctx.network.node_of(src) != log.leader:
            return
        reset = msg.start > log.end_offset
        if not reset:
            log.append_replicated(msg.records)
        log.set_high_watermark(msg.high_watermark)
        self.send(src, ReplicateAck(msg.topic, log.epoch, self.node_id, log.end_offset, reset))

    def _request_epoch_end(self, topic: str) -> None:
        log = self.logs[topic]
        if log.leader is not None:
            self.send(broker_cid(log.leader), OffsetForEpochRequest(topic, log.epoch, log.last_epoch()))

    def _on_offset_for_epoch(self, src: str, msg: OffsetForEpochRequest) -> None:
        log = self.logs.get(msg.topic)
        if msg.topic not in self.leading or msg.epoch != log.epoch:
            return
        end = log.end_offset_for_epoch(msg.last_epoch)
        self.send(src, OffsetForEpochResponse(msg.topic, msg.epoch, end, log.present_from(end)))

    def _on_offset_for_epoch_response(self, src: str, msg: OffsetForEpochResponse) -> None:
        """
        Reconcile this replica with the leader before following it.
        """
        log = self.logs.get(msg.topic)
        if log is None or msg.topic not in self.syncing or msg.epoch != log.epoch:
            return
        report = log.merge_on_rejoin(msg.end_offset, msg.present)
        if not report.is_empty():
            self.truncations.append(report)
            self.ctx.metrics.truncated(report)
            self.annotate(
                Annotation.TRUNCATED,
                f"topic={msg.topic},truncated={len(report.truncated)},lost={len(report.lost)}",
            )
        self.syncing.discard(msg.topic)
        self.send(src, ReplicateAck(msg.topic, log.epoch, self.node_id, log.end_offset, True))

    ##############################
    # Leadership transfer
    ##############################

    def _on_transfer_request(self, src: str, msg: TransferRequest) -> None:
        state = self.leading.get(msg.topic)
        if state is None or msg.epoch != self.logs[msg.topic].epoch or msg.target not in state.followers:
            return
        if state.transfer_target != msg.target:
            state.transfer_target = msg.target
            state.transfer_since = self.now
        self._check_transfer(msg.topic)

    def _check_transfer(self, topic: str) -> None:
        state = self.leading.get(topic)
        if state is None or state.transfer_target is None:
            return
        log = self.logs[topic]
        if state.followers[state.transfer_target].match == log.end_offset:
            self.send(self.controller, TransferReady(topic, log.epoch, state.transfer_target))
