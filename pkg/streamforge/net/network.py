# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from collections import Counter
from typing import Any, Callable, Optional

from streamforge.net.counters import PortCounters
from streamforge.net.enums import DropReason
from streamforge.net.frame import Frame
from streamforge.net.link import LinkState
from streamforge.net.routing import RoutingTable, compute_routes
from streamforge.sim.engine import Engine
from streamforge.sim.events import SimEvent
from streamforge.spec.models import ExperimentSpec
from streamforge.utils.exceptions import NetworkError
from streamforge.utils.logger import LOGGER


class Network:
    """
    Store and forward network between components.

    Each hop is one event: the frame queues behind earlier frames of the
    same link direction and lane, is serialised, propagates, then passes
    the loss draw and the link-down check on arrival. Header only frames
    travel in a lane of their own, so they never wait behind data.
    """

    def __init__(self, engine: Engine, spec: ExperimentSpec, routes: Optional[RoutingTable] = None) -> None:
        self.engine = engine
        self.spec = spec
        self.routes = routes or compute_routes(spec)
        self.counters = PortCounters(spec)
        self.links = {link.id: LinkState(link, engine.rng(f"link:{link.id}")) for link in spec.links}
        self.node_up = {node.id: True for node in spec.nodes}
        self.stats: Counter[str] = Counter()
        self._endpoints: dict[str, tuple[str, Callable[[Frame], None]]] = {}

    ##############################
    # Endpoints
    ##############################

    def attach(self, component_id: str, node_id: str, handler: Callable[[Frame], None]) -> None:
        """
        Register a component so that frames addressed to it reach handler.
        """
        if component_id in self._endpoints:
            raise NetworkError(f"Component '{component_id}' is already attached.")
        self._endpoints[component_id] = (node_id, handler)

    def node_of(self, component_id: str) -> str:
        return self._endpoints[component_id][0]

    ##############################
    # Transmission
    ##############################

    def send(self, src: str, dst: str, payload: Any, payload_bytes: int = 0) -> Optional[Frame]:
        """
        Send a message from one component to another over the precomputed route.

        Parameters
        ----------
        src : str
            Sending component.
        dst : str
            Receiving component.
        payload : Any
            Protocol message.
        payload_bytes : int
            Bytes carried besides the frame overhead.

        Returns
        -------
        Frame or None
            The frame in flight, None if dropped at the source.
        """
        src_node = self.node_of(src)
        dst_node = self.node_of(dst)
        frame = Frame(src, dst, src_node, dst_node, payload, payload_bytes, self.engine.now)
        if src_node == dst_node:
            self.stats["sent"] += 1
            self.engine.after(0, dst, "deliver", lambda: self._deliver(frame))
            return frame
        return frame if self.send_frame(frame, self.routes.path(src_node, dst_node)) else None

    def send_frame(self, frame: Frame, route: list[str]) -> Optional[SimEvent]:
        """
        Schedule a frame along a node route.

        Parameters
        ----------
        frame : Frame
            Frame to send.
        route : list[str]
            Nodes from the source to the destination, both included.

        Returns
        -------
        SimEvent or None
            Arrival event of the first hop, None if the frame is dropped
            before leaving the source.
        """
        self.stats["sent"] += 1
        if not self.node_up[route[0]]:
            self._drop(frame, DropReason.NODE_DOWN)
            return None
        return self._forward(frame, route, 0)

    def _link_between(self, u: str, v: str) -> LinkState:
        return self.links[self.routes.graph.edges[u, v]["link"]]

    def _forward(self, frame: Frame, route: list[str], index: int) -> Optional[SimEvent]:
        at, nxt = route[index], route[index + 1]
        link = self._link_between(at, nxt)
        if not link.up:
            self._drop(frame, DropReason.LINK_DOWN)
            return None
        self.counters.add_tx(at, link.spec.port_on(at), frame.size_bytes)
        arrival = link.reserve(at, self.engine.now, frame.size_bytes, frame.control)
        epoch = link.down_epoch
        return self.engine.at(arrival, nxt, "hop", lambda: self._arrive(frame, route, index + 1, link, epoch))

    def _arrive(self, frame: Frame, route: list[str], index: int, link: LinkState, epoch: int) -> None:
        node = route[index]
        # In flight frames die with their link.
        if not link.up or link.down_epoch != epoch:
            self._drop(frame, DropReason.LINK_DOWN)
            return
        if link.draw_loss():
            self._drop(frame, DropReason.LOSS)
            return
        if not self.node_up[node]:
            self._drop(frame, DropReason.NODE_DOWN)
            return
        self.counters.add_rx(node, link.spec.port_on(node), frame.size_bytes)
        if index == len(route) - 1:
            self._deliver(frame)
        else:
            self._forward(frame, route, index)

    def _deliver(self, frame: Frame) -> None:
        node, handler = self._endpoints[frame.dst]
        if not self.node_up[node]:
            self._drop(frame, DropReason.NODE_DOWN)
            return
        self.stats["delivered"] += 1
        handler(frame)

    def _drop(self, frame: Frame, reason: DropReason) -> None:
        self.stats[reason.value] += 1
        LOGGER.debug("Dropped %r: %s.", frame, reason.value)

    ##############################
    # Faults
    ##############################

    def set_link_up(self, link_id: str, up: bool) -> None:
        self.links[link_id].set_up(up)

    def set_loss(self, link_id: str, percent: float) -> None:
        self.links[link_id].set_loss(percent)

    def set_node_up(self, node_id: str, up: bool) -> None:
        self.node_up[node_id] = up

    def sample_ports(self) -> None:
        self.counters.sample(self.engine.now)
