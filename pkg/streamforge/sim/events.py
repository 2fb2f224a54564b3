# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from typing import Callable, Optional


class SimEvent:
    """
    Timestamped unit of work dispatched by the engine.

    Events are ordered by (time, seq). The sequence number is assigned
    when the event is scheduled.
    """

    __slots__ = ("time", "seq", "target", "kind", "handler", "cancelled")

    def __init__(self, time: int, target: str, kind: str, handler: Callable[[], None]) -> None:
        self.time = time
        self.seq: Optional[int] = None
        self.target = target
        self.kind = kind
        self.handler = handler
        self.cancelled = False

    def cancel(self) -> None:
        """
        Mark the event so that the engine skips it.
        """
        self.cancelled = True

    def __repr__(self) -> str:
        return f"SimEvent(time={self.time}, seq={self.seq}, target={self.target!r}, kind={self.kind!r})"
