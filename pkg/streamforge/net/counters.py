# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from streamforge.spec.models import ExperimentSpec
from streamforge.utils.exceptions import UnknownPortError
from streamforge.utils.generic_utils import natural_key

# Sampling period of the port counters (500 ms).
DEFAULT_SAMPLE_INTERVAL_US = 500_000


class PortCounters:
    """
    Cumulative tx/rx byte counters of every (node, port) and their
    periodic samples.
    """

    def __init__(self, spec: ExperimentSpec) -> None:
        ports = []
        for link in spec.links:
            ports.append((link.source, link.st))
            ports.append((link.target, link.dt))
        self.ports: list[tuple[str, int]] = sorted(ports, key=lambda p: (natural_key(p[0]), p[1]))
        self._tx = {p: 0 for p in self.ports}
        self._rx = {p: 0 for p in self.ports}
        self.samples: list[tuple[int, str, int, int, int]] = []

    def add_tx(self, node: str, port: int, size_bytes: int) -> None:
        self._tx[(node, port)] += size_bytes

    def add_rx(self, node: str, port: int, size_bytes: int) -> None:
        self._rx[(node, port)] += size_bytes

    def totals(self, node: str, port: int) -> tuple[int, int]:
        """
        Current (tx, rx) bytes of a port.
        """
        self._check(node, port)
        return self._tx[(node, port)], self._rx[(node, port)]

    def sample(self, time: int) -> None:
        """
        Append one row per port with the cumulative counters at time.
        """
        for node, port in self.ports:
            self.samples.append((time, node, port, self._tx[(node, port)], self._rx[(node, port)]))

    def series(self, node: str, port: int) -> list[tuple[int, int, int]]:
        """
        Sampled (time_us, tx_bytes, rx_bytes) of one port.

        Parameters
        ----------
        node : str
            Node id.
        port : int
            Port number.

        Returns
        -------
        list[tuple[int, int, int]]
            Samples in time order.

        Raises
        ------
        UnknownPortError
            If the port does not exist.
        """
        self._check(node, port)
        return [(t, tx, rx) for t, n, p, tx, rx in self.samples if n == node and p == port]

    def _check(self, node: str, port: int) -> None:
        if (node, port) not in self._tx:
            raise UnknownPortError(f"Port {port} does not exist on node '{node}'.")
