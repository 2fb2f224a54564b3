# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from fractions import Fraction

from streamforge.sim.rng import RandomSource
from streamforge.spec.models import LinkSpec
from streamforge.utils.generic_utils import ceil_fraction, exact
from streamforge.utils.time_utils import ms_to_us


def serialization_time(size_bytes: int, link: LinkSpec) -> int:
    """
    Time the link is occupied by a frame, in microseconds rounded up.
    Bandwidth in Mbps is bits per microsecond.
    """
    return ceil_fraction(Fraction(size_bytes * 8) / exact(link.bw))


def propagation_time(link: LinkSpec) -> int:
    return ms_to_us(link.lat)


def transmission_time(size_bytes: int, link: LinkSpec) -> int:
    """
    Serialization then propagation of one frame over one link.

    Parameters
    ----------
    size_bytes : int
        Frame size, overhead included.
    link : LinkSpec
        Link crossed.

    Returns
    -------
    int
        Microseconds, each term rounded up.

    Examples
    --------
    >>> transmission_time(12500, LinkSpec(id="l", source="a", target="b", lat=10, bw=1))
    110000
    """
    return serialization_time(size_bytes, link) + propagation_time(link)


class LinkState:
    """
    Runtime state of a link: availability, effective loss and the
    transmit queue of each direction.
    """

    def __init__(self, spec: LinkSpec, rng: RandomSource) -> None:
        self.spec = spec
        self.rng = rng
        self.up = True
        self.effective_loss = spec.loss
        self.down_epoch = 0
        self.propagation_us = propagation_time(spec)
        # Keyed by the sending endpoint.
        self.busy_until = {spec.source: 0, spec.target: 0}
        self.control_until = {spec.source: 0, spec.target: 0}

    @property
    def id(self) -> str:
        return self.spec.id

    def reserve(self, from_node: str, now: int, size_bytes: int, control: bool = False) -> int:
        """
        Queue a frame in the direction leaving from_node.

        Control frames use their own queue and do not wait behind data.

        Parameters
        ----------
        from_node : str
            Sending endpoint.
        now : int
            Time the frame reaches the queue.
        size_bytes : int
            Frame size.
        control : bool
            Whether the frame is header only.

        Returns
        -------
        int
            Arrival time at the other endpoint.
        """
        queue = self.control_until if control else self.busy_until
        start = max(now, queue[from_node])
        depart = start + serialization_time(size_bytes, self.spec)
        queue[from_node] = depart
        return depart + self.propagation_us

    def draw_loss(self) -> bool:
        """
        Bernoulli draw of the effective loss. True means the frame is lost.
        """
        if self.effective_loss <= 0:
            return False
        return self.rng.bernoulli(self.effective_loss / 100)

    def set_up(self, up: bool) -> None:
        if self.up and not up:
            self.down_epoch += 1
        if up:
            self.effective_loss = self.spec.loss
        self.up = up

    def set_loss(self, percent: float) -> None:
        self.effective_loss = max(self.spec.loss, percent)
