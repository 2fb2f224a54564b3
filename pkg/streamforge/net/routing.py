# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Optional

import networkx as nx

from streamforge.spec.models import ExperimentSpec
from streamforge.utils.exceptions import DisconnectedError


def topology_graph(spec: ExperimentSpec) -> nx.Graph:
    """
    Undirected graph of the experiment, one edge per node pair.
    Parallel links keep the one with the smallest id.

    Parameters
    ----------
    spec : ExperimentSpec
        Experiment description.

    Returns
    -------
    nx.Graph
        Nodes carry "kind", edges carry "link" (the link id).
    """
    graph = nx.Graph()
    for node in spec.nodes:
        graph.add_node(node.id, kind=node.kind)
    for link in spec.links:
        u, v = link.endpoints()
        if graph.has_edge(u, v) and graph.edges[u, v]["link"] <= link.id:
            continue
        graph.add_edge(u, v, link=link.id)
    return graph


def _path(preds: dict[str, str], source: str, target: str) -> list[str]:
    path = [target]
    while path[-1] != source:
        path.append(preds[path[-1]])
    path.reverse()
    return path


class RoutingTable:
    """
    Precomputed shortest paths between hosts.
    """

    def __init__(self, graph: nx.Graph, paths: dict[tuple[str, str], list[str]]) -> None:
        self.graph = graph
        self._paths = paths

    def path(self, source: str, target: str) -> list[str]:
        """
        Node sequence from source to target, both included.
        """
        return self._paths[(source, target)]

    def links(self, source: str, target: str) -> list[str]:
        """
        Link ids crossed from source to target.
        """
        nodes = self.path(source, target)
        return [self.graph.edges[u, v]["link"] for u, v in zip(nodes, nodes[1:])]

    def hops(self, source: str, target: str) -> int:
        return len(self.path(source, target)) - 1

    def next_hop(self, at: str, source: str, target: str) -> Optional[str]:
        nodes = self.path(source, target)
        index = nodes.index(at)
        return nodes[index + 1] if index + 1 < len(nodes) else None

    def pairs(self) -> list[tuple[str, str]]:
        return list(self._paths)


def compute_routes(spec: ExperimentSpec, required: Optional[Iterable[str]] = None) -> RoutingTable:
    """
    All-pairs shortest paths by hop count between hosts. Among equal
    length paths the lexicographically smallest node sequence wins.

    Parameters
    ----------
    spec : ExperimentSpec
        Experiment description.
    required : Iterable[str]
        Hosts that must reach each other. Defaults to every host
        that carries a component.

    Returns
    -------
    RoutingTable
        Paths for every ordered pair of reachable hosts.

    Raises
    ------
    DisconnectedError
        If a pair of required hosts has no path.
    """
    graph = topology_graph(spec)
    hosts = [n.id for n in spec.hosts()]
    if required is None:
        required = [n.id for n in spec.hosts() if n.components()]
    required = set(required)

    paths: dict[tuple[str, str], list[str]] = {}
    for source in hosts:
        # Sorted neighbour expansion makes each BFS parent the one with the smallest path.
        preds = dict(nx.bfs_predecessors(graph, source, sort_neighbors=sorted))
        for target in hosts:
            if target == source:
                paths[(source, target)] = [source]
            elif target in preds:
                paths[(source, target)] = _path(preds, source, target)

    missing = [(a, b) for a, b in combinations(sorted(required), 2) if (a, b) not in paths]
    if missing:
        raise DisconnectedError(missing)
    return RoutingTable(graph, paths)
