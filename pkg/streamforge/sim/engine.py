# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from typing import Callable, Optional

import simpy

from streamforge.sim.events import SimEvent
from streamforge.sim.rng import RandomSource, RandomStreams
from streamforge.utils.exceptions import HandlerPanic, SchedulingInPastError
from streamforge.utils.logger import LOGGER


class Engine:
    """
    Single threaded discrete-event engine with integer microsecond time.

    Events sit in the simpy heap as timeouts. Simpy orders its heap by
    (time, priority, insertion id); every event here uses the same
    priority, so dispatch order is (time, seq).
    """

    def __init__(self, seed: int = 1, trace: bool = False) -> None:
        self.env = simpy.Environment(initial_time=0)
        self.streams = RandomStreams(seed)
        self.seed = seed
        self.processed = 0
        self._seq = 0
        self._clock = 0
        self._trace: Optional[list[str]] = [] if trace else None

    @property
    def now(self) -> int:
        """
        Current simulated time in microseconds.
        """
        return self._clock

    def rng(self, stream_id: str) -> RandomSource:
        return self.streams.stream(stream_id)

    ##############################
    # Scheduling
    ##############################

    def schedule(self, event: SimEvent) -> SimEvent:
        """
        Enqueue an event and assign its sequence number.

        Parameters
        ----------
        event : SimEvent
            Event to enqueue.

        Returns
        -------
        SimEvent
            The same event, with seq set.

        Raises
        ------
        SchedulingInPastError
            If the event time lies before the current clock.
        """
        if event.time < self._clock:
            raise SchedulingInPastError(
                f"Event '{event.kind}' for '{event.target}' at t={event.time}us is before now={self._clock}us."
            )
        event.seq = self._seq
        self._seq += 1
        timeout = self.env.timeout(event.time - self.env.now)
        timeout.callbacks.append(lambda _, ev=event: self._dispatch(ev))
        return event

    def at(self, time: int, target: str, kind: str, handler: Callable[[], None]) -> SimEvent:
        """
        Schedule a handler at an absolute time.
        """
        return self.schedule(SimEvent(time, target, kind, handler))

    def after(self, delay: int, target: str, kind: str, handler: Callable[[], None]) -> SimEvent:
        """
        Schedule a handler after a delay from now.
        """
        return self.schedule(SimEvent(self._clock + delay, target, kind, handler))

    ##############################
    # Execution
    ##############################

    def _dispatch(self, event: SimEvent) -> None:
        self._clock = event.time
        if event.cancelled:
            return
        self.processed += 1
        if self._trace is not None:
            self._trace.append(f"{event.time} {event.seq} {event.target} {event.kind}")
        try:
            event.handler()
        except Exception as err:
            LOGGER.exception(f"Handler failed for event {event!r}.")
            raise HandlerPanic(event.time, event.seq, event.target, event.kind) from err

    def run_until(self, duration: int) -> int:
        """
        Process every event with time <= duration.

        Parameters
        ----------
        duration : int
            End of the run in microseconds.

        Returns
        -------
        int
            Final clock, equal to duration.

        Raises
        ------
        HandlerPanic
            If a handler raises, with the failing event as context.
        """
        while self.env.peek() <= duration:
            self.env.step()
        self._clock = max(self._clock, duration)
        return self._clock

    def trace(self) -> list[str]:
        """
        Dispatched events as "time seq target kind" lines, if tracing was enabled.
        """
        return list(self._trace or [])
