# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

"""
Messages exchanged between brokers, the controller and clients.

Control messages travel as overhead-only frames; messages carrying
records are charged the records' payload bytes.
"""

from __future__ import annotations

from typing import Optional

from streamforge.broker.models import Record


def batch_bytes(records: list[Record]) -> int:
    return sum(r.size for r in records)


class Message:
    """
    Base protocol message.
    """

    __slots__ = ()

    def wire_bytes(self) -> int:
        return 0

    def __repr__(self) -> str:
        fields = ", ".join(f"{s}={getattr(self, s)!r}" for s in self.__slots__ if s != "records")
        return f"{type(self).__name__}({fields})"


##############################
# Client <-> leader
##############################


class ProduceRequest(Message):
    __slots__ = ("topic", "request_id", "records")

    def __init__(self, topic: str, request_id: int, records: list[Record]) -> None:
        self.topic = topic
        self.request_id = request_id
        self.records = records

    def wire_bytes(self) -> int:
        return batch_bytes(self.records)


class ProduceResponse(Message):
    __slots__ = ("topic", "request_id", "acked", "error")

    def __init__(self, topic: str, request_id: int, acked: list[tuple[str, int]], error: Optional[str] = None) -> None:
        self.topic = topic
        self.request_id = request_id
        self.acked = acked
        self.error = error


class FetchRequest(Message):
    __slots__ = ("topic", "from_offset", "max_bytes", "label")

    def __init__(self, topic: str, from_offset: Optional[int], max_bytes: int, label: str) -> None:
        self.topic = topic
        self.from_offset = from_offset
        self.max_bytes = max_bytes
        self.label = label


class FetchResponse(Message):
    __slots__ = ("topic", "from_offset", "records", "high_watermark", "error")

    def __init__(
        self,
        topic: str,
        from_offset: Optional[int],
        records: list[Record],
        high_watermark: int,
        error: Optional[str] = None,
    ) -> None:
        self.topic = topic
        self.from_offset = from_offset
        self.records = records
        self.high_watermark = high_watermark
        self.error = error

    def wire_bytes(self) -> int:
        return batch_bytes(self.records)


##############################
# Metadata
##############################


class MetadataRequest(Message):
    __slots__ = ("topics",)

    def __init__(self, topics: list[str]) -> None:
        self.topics = topics


class Metadata(Message):
    """
    Leader and epoch of each topic, None when the topic has no leader.
    """

    __slots__ = ("leaders",)

    def __init__(self, leaders: dict[str, tuple[Optional[str], int]]) -> None:
        self.leaders = leaders


##############################
# Controller <-> brokers
##############################


class Heartbeat(Message):
    """
    Liveness beacon. Carries the broker incarnation, bumped on restart,
    and the topics the broker currently leads.
    """

    __slots__ = ("broker", "incarnation", "leading")

    def __init__(self, broker: str, incarnation: int, leading: list[str]) -> None:
        self.broker = broker
        self.incarnation = incarnation
        self.leading = leading


class HeartbeatAck(Message):
    __slots__ = ()


class LeaderAndIsr(Message):
    __slots__ = ("topic", "leader", "epoch", "isr", "elected_at", "failover")

    def __init__(
        self,
        topic: str,
        leader: Optional[str],
        epoch: int,
        isr: list[str],
        elected_at: int,
        failover: bool = False,
    ) -> None:
        self.topic = topic
        self.leader = leader
        self.epoch = epoch
        self.isr = isr
        self.elected_at = elected_at
        self.failover = failover


class IsrUpdate(Message):
    __slots__ = ("topic", "epoch", "isr")

    def __init__(self, topic: str, epoch: int, isr: list[str]) -> None:
        self.topic = topic
        self.epoch = epoch
        self.isr = isr


class TransferRequest(Message):
    __slots__ = ("topic", "epoch", "target")

    def __init__(self, topic: str, epoch: int, target: str) -> None:
        self.topic = topic
        self.epoch = epoch
        self.target = target


class TransferReady(Message):
    __slots__ = ("topic", "epoch", "target")

    def __init__(self, topic: str, epoch: int, target: str) -> None:
        self.topic = topic
        self.epoch = epoch
        self.target = target


##############################
# Leader <-> followers
##############################


class Replicate(Message):
    __slots__ = ("topic", "epoch", "start", "records", "high_watermark")

    def __init__(self, topic: str, epoch: int, start: int, records: list[Record], high_watermark: int) -> None:
        self.topic = topic
        self.epoch = epoch
        self.start = start
        self.records = records
        self.high_watermark = high_watermark

    def wire_bytes(self) -> int:
        return batch_bytes(self.records)


class ReplicateAck(Message):
    """
    Follower log end. With reset set, the leader restarts replication from
    log_end instead of its optimistic position.
    """

    __slots__ = ("topic", "epoch", "broker", "log_end", "reset")

    def __init__(self, topic: str, epoch: int, broker: str, log_end: int, reset: bool = False) -> None:
        self.topic = topic
        self.epoch = epoch
        self.broker = broker
        self.log_end = log_end
        self.reset = reset


class OffsetForEpochRequest(Message):
    __slots__ = ("topic", "epoch", "last_epoch")

    def __init__(self, topic: str, epoch: int, last_epoch: int) -> None:
        self.topic = topic
        self.epoch = epoch
        self.last_epoch = last_epoch


class OffsetForEpochResponse(Message):
    """
    End offset of the requested epoch in the leader log, plus the record
    identities the leader holds from that offset on.
    """

    __slots__ = ("topic", "epoch", "end_offset", "present")

    def __init__(self, topic: str, epoch: int, end_offset: int, present: list[tuple[str, int]]) -> None:
        self.topic = topic
        self.epoch = epoch
        self.end_offset = end_offset
        self.present = present
