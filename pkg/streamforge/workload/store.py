# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from collections import deque
from typing import Optional, Union

from streamforge.broker.protocol import Message
from streamforge.components._base import Component, RunContext
from streamforge.spec.configs import StoreConfig
from streamforge.utils.exceptions import MalformedRecordError


class StorePut(Message):
    __slots__ = ("request_id", "key", "value")

    def __init__(self, request_id: int, key: str, value: str) -> None:
        self.request_id = request_id
        self.key = key
        self.value = value

    def wire_bytes(self) -> int:
        return len(self.key.encode("utf-8")) + len(self.value.encode("utf-8"))


class StoreGet(Message):
    __slots__ = ("request_id", "key")

    def __init__(self, request_id: int, key: str) -> None:
        self.request_id = request_id
        self.key = key


class StoreReply(Message):
    __slots__ = ("request_id", "key", "value")

    def __init__(self, request_id: int, key: str, value: Optional[str]) -> None:
        self.request_id = request_id
        self.key = key
        self.value = value

    def wire_bytes(self) -> int:
        return len(self.value.encode("utf-8")) if self.value else 0


def add_values(stored: Optional[str], value: str) -> str:
    """
    Sum of a stored value and a new one. Integers stay integers.

    Raises
    ------
    MalformedRecordError
        If either value is not a number.
    """
    if stored is None:
        return value
    try:
        return str(int(stored) + int(value))
    except ValueError:
        pass
    try:
        return repr(float(stored) + float(value))
    except ValueError:
        raise MalformedRecordError(f"Cannot add '{value}' to '{stored}'.")


def store_cid(node_id: str) -> str:
    return f"{node_id}/{KVStore.role}"


class KVStore(Component):
    """
    Key-value store served by a single FIFO server.

    Requests are handled in arrival order, so a client always reads its
    own earlier writes.
    """

    role = "store"

    def __init__(self, node_id: str, ctx: RunContext, config: StoreConfig) -> None:
        super().__init__(node_id, ctx)
        self.config = config
        self.data: dict[str, str] = {}
        self.queue: deque[tuple[str, Union[StorePut, StoreGet]]] = deque()
        self.busy = False
        self.writes = 0
        self.reads = 0
        self.on(StorePut, self._enqueue)
        self.on(StoreGet, self._enqueue)

    def on_crash(self) -> None:
        # Stored data is durable, queued requests are not.
        self.queue.clear()
        self.busy = False

    def _enqueue(self, src: str, msg: Union[StorePut, StoreGet]) -> None:
        self.queue.append((src, msg))
        self._serve_next()

    def _serve_next(self) -> None:
        if self.busy or not self.queue:
            return
        src, msg = self.queue.popleft()
        self.busy = True
        latency = self.config.write_latency_us if isinstance(msg, StorePut) else self.config.read_latency_us
        self.timer(latency, "store-op", lambda: self._complete(src, msg))

    def _complete(self, src: str, msg: Union[StorePut, StoreGet]) -> None:
        self.busy = False
        if isinstance(msg, StorePut):
            self.data[msg.key] = msg.value
            self.writes += 1
            self.send(src, StoreReply(msg.request_id, msg.key, None))
        else:
            self.reads += 1
            self.send(src, StoreReply(msg.request_id, msg.key, self.data.get(msg.key)))
        self._serve_next()
