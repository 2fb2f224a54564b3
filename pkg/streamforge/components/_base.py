# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import typing
from pathlib import Path
from typing import Callable, Optional

from streamforge.broker.enums import Annotation
from streamforge.sim.events import SimEvent
from streamforge.utils.logger import LOGGER

if typing.TYPE_CHECKING:
    from streamforge.metrics.store import MetricsStore
    from streamforge.net.frame import Frame
    from streamforge.net.network import Network
    from streamforge.sim.engine import Engine
    from streamforge.spec.models import ExperimentSpec


class RunContext:
    """
    Shared objects of one run handed to every component.
    """

    def __init__(
        self,
        engine: Engine,
        network: Network,
        metrics: MetricsStore,
        spec: ExperimentSpec,
        base_dir: Optional[Path] = None,
    ) -> None:
        self.engine = engine
        self.network = network
        self.metrics = metrics
        self.spec = spec
        self.base_dir = base_dir or Path.cwd()

    def resolve(self, path: str) -> Path:
        """
        Resolve a path of a component config against the experiment directory.
        """
        candidate = Path(path)
        return candidate if candidate.is_absolute() else self.base_dir / candidate


class Component:
    """
    Base class for everything attached to the network.

    Timers are bound to the incarnation that scheduled them, so a crash
    silently cancels every pending timer of the component.
    """

    role = "component"

    def __init__(self, node_id: str, ctx: RunContext) -> None:
        self.node_id = node_id
        self.cid = f"{node_id}/{self.role}"
        self.ctx = ctx
        self.engine = ctx.engine
        self.alive = True
        self.incarnation = 0
        self.rng = ctx.engine.rng(self.cid)
        self._handlers: dict[type, Callable] = {}
        ctx.network.attach(self.cid, node_id, self.receive)

    @property
    def now(self) -> int:
        return self.engine.now

    ##############################
    # Messaging
    ##############################

    def on(self, message_type: type, handler: Callable) -> None:
        """
        Register the handler of a message type. Handlers get (sender, message).
        """
        self._handlers[message_type] = handler

    def receive(self, frame: Frame) -> None:
        if not self.alive:
            return
        handler = self._handlers.get(type(frame.payload))
        if handler is None:
            LOGGER.warning(f"{self.cid} ignored unexpected {type(frame.payload).__name__}.")
            return
        handler(frame.src, frame.payload)

    def send(self, dst: str, message) -> None:
        if self.alive:
            self.ctx.network.send(self.cid, dst, message, message.wire_bytes())

    ##############################
    # Timers
    ##############################

    def timer(self, delay: int, kind: str, fn: Callable[[], None]) -> SimEvent:
        """
        Run fn after delay unless the component crashes first.
        """
        incarnation = self.incarnation
        return self.engine.after(delay, self.cid, kind, lambda: self._fire(incarnation, fn))

    def every(self, period: int, kind: str, fn: Callable[[], None], first: int = 0) -> None:
        """
        Run fn every period, starting after first.
        """

        def tick() -> None:
            fn()
            self.timer(period, kind, tick)

        self.timer(first, kind, tick)

    def _fire(self, incarnation: int, fn: Callable[[], None]) -> None:
        if self.alive and incarnation == self.incarnation:
            fn()

    ##############################
    # Lifecycle
    ##############################

    def annotate(self, kind: Annotation | str, detail: str = "-") -> None:
        kind = kind.value if isinstance(kind, Annotation) else kind
        self.ctx.metrics.annotate(self.now, self.cid, kind, detail)

    def start(self) -> None:
        """
        Schedule the initial work of the component.
        """

    def crash(self) -> None:
        if not self.alive:
            return
        self.alive = False
        self.incarnation += 1
        self.on_crash()
        self.annotate(Annotation.COMPONENT_CRASHED)

    def recover(self) -> None:
        if self.alive:
            return
        self.alive = True
        self.annotate(Annotation.COMPONENT_RECOVERED)
        self.on_recover()

    def on_crash(self) -> None:
        """
        Drop volatile state.
        """

    def on_recover(self) -> None:
        self.start()
