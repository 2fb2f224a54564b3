# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from typing import Any

# Per frame header bytes added to every payload.
FRAME_OVERHEAD_BYTES = 24


class Frame:
    """
    Whole message travelling between two components.
    """

    __slots__ = ("src", "dst", "src_node", "dst_node", "payload", "size_bytes", "sent_at")

    def __init__(
        self,
        src: str,
        dst: str,
        src_node: str,
        dst_node: str,
        payload: Any,
        payload_bytes: int,
        sent_at: int,
    ) -> None:
        self.src = src
        self.dst = dst
        self.src_node = src_node
        self.dst_node = dst_node
        self.payload = payload
        self.size_bytes = payload_bytes + FRAME_OVERHEAD_BYTES
        self.sent_at = sent_at

    @property
    def control(self) -> bool:
        """
        True for frames carrying no payload bytes.
        """
        return self.size_bytes == FRAME_OVERHEAD_BYTES

    def __repr__(self) -> str:
        kind = type(self.payload).__name__
        return f"Frame({self.src}->{self.dst}, {kind}, {self.size_bytes}B)"
