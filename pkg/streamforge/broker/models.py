# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from typing import Any, Optional

# (producer id, producer sequence number)
RecordId = tuple[str, int]


class Record:
    """
    Record appended to a topic log.

    The source tag (producer, seq, produce time) of the record that started
    a pipeline travels unchanged through every operator output.
    """

    __slots__ = (
        "topic",
        "producer",
        "seq",
        "size",
        "produce_time",
        "payload",
        "key",
        "source",
        "offset",
        "epoch",
    )

    def __init__(
        self,
        topic: str,
        producer: str,
        seq: int,
        size: int,
        produce_time: int,
        payload: Any = None,
        key: Optional[str] = None,
        source: Optional[tuple[str, int, int]] = None,
    ) -> None:
        self.topic = topic
        self.producer = producer
        self.seq = seq
        self.size = size
        self.produce_time = produce_time
        self.payload = payload
        self.key = key
        self.source = source if source is not None else (producer, seq, produce_time)
        self.offset: Optional[int] = None
        self.epoch: Optional[int] = None

    @property
    def ident(self) -> RecordId:
        return self.producer, self.seq

    def stamped(self, offset: int, epoch: int) -> Record:
        """
        Copy of the record with the offset and leader epoch assigned on append.
        """
        copy = Record(
            self.topic,
            self.producer,
            self.seq,
            self.size,
            self.produce_time,
            self.payload,
            self.key,
            self.source,
        )
        copy.offset = offset
        copy.epoch = epoch
        return copy

    def __repr__(self) -> str:
        return f"Record({self.topic}, {self.producer}#{self.seq}, offset={self.offset}, epoch={self.epoch})"


class TruncationReport:
    """
    Outcome of reconciling a rejoining replica with the current leader.
    """

    __slots__ = ("topic", "broker", "truncated", "lost")

    def __init__(self, topic: str, broker: str, truncated: list[Record], lost: list[Record]) -> None:
        self.topic = topic
        self.broker = broker
        self.truncated = truncated
        self.lost = lost

    def is_empty(self) -> bool:
        return not self.truncated


class TopicLog:
    """
    One broker's copy of a topic: the log plus the broker's view of
    leadership for it.

    Offsets are list indexes. The high watermark never passes the log end.
    """

    def __init__(self, topic: str, broker: str, replicas: list[str]) -> None:
        self.topic = topic
        self.broker = broker
        self.replicas = list(replicas)
        self.records: list[Record] = []
        self.high_watermark = 0
        self.leader: Optional[str] = None
        self.epoch = 0
        self.isr: list[str] = []
        self.acked: set[RecordId] = set()
        self._index: dict[RecordId, int] = {}

    @property
    def end_offset(self) -> int:
        return len(self.records)

    def lookup(self, ident: RecordId) -> Optional[int]:
        return self._index.get(ident)

    def append(self, record: Record) -> Record:
        """
        Stamp a record with the next offset and the current epoch and append it.

        Parameters
        ----------
        record : Record
            Record as sent by the producer.

        Returns
        -------
        Record
            The stored copy.
        """
        stored = record.stamped(self.end_offset, self.epoch)
        self.records.append(stored)
        self._index[stored.ident] = stored.offset
        return stored

    def append_replicated(self, records: list[Record]) -> None:
        """
        Append records already stamped by a leader, skipping the ones below
        the log end.
        """
        for record in records:
            if record.offset < self.end_offset:
                continue
            self.records.append(record)
            self._index[record.ident] = record.offset

    def read(self, start: int, stop: int, max_bytes: int) -> list[Record]:
        """
        Records in [start, stop) up to max_bytes. At least one record is
        returned when the range is not empty.
        """
        batch: list[Record] = []
        total = 0
        for record in self.records[start:stop]:
            if batch and total + record.size > max_bytes:
                break
            batch.append(record)
            total += record.size
        return batch

    def set_high_watermark(self, offset: int) -> bool:
        """
        Advance the high watermark. Returns True if it moved.
        """
        offset = min(offset, self.end_offset)
        if offset <= self.high_watermark:
            return False
        self.high_watermark = offset
        return True

    def last_epoch(self) -> int:
        return self.records[-1].epoch if self.records else 0

    def end_offset_for_epoch(self, epoch: int) -> int:
        """
        First offset written in an epoch later than epoch, or the log end.
        """
        for record in self.records:
            if record.epoch > epoch:
                return record.offset
        return self.end_offset

    def present_from(self, offset: int) -> list[RecordId]:
        return [r.ident for r in self.records[offset:]]

    def truncate(self, offset: int) -> list[Record]:
        """
        Drop every record at or after offset.

        Returns
        -------
        list[Record]
            Removed records, in offset order.
        """
        removed = self.records[offset:]
        del self.records[offset:]
        for record in removed:
            self._index.pop(record.ident, None)
        self.high_watermark = min(self.high_watermark, offset)
        return removed

    def merge_on_rejoin(self, end_offset: int, present: list[RecordId]) -> TruncationReport:
        """
        Truncate the divergent suffix against the leader's end offset for
        this log's last epoch.

        Parameters
        ----------
        end_offset : int
            Leader end offset of the epoch this log last wrote in.
        present : list[RecordId]
            Records the leader holds from end_offset on.

        Returns
        -------
        TruncationReport
            Truncated records, and the ones this broker acknowledged as leader
            that the leader does not hold.
        """
        removed = self.truncate(end_offset) if end_offset < self.end_offset else []
        kept = set(present)
        lost = [r for r in removed if r.ident in self.acked and r.ident not in kept]
        for record in removed:
            self.acked.discard(record.ident)
        return TruncationReport(self.topic, self.broker, removed, lost)
