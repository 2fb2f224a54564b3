# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import typing

from streamforge.spec.enums import LINK_FAULTS, FaultKind
from streamforge.utils.exceptions import FaultError, TargetMissingError
from streamforge.utils.logger import LOGGER

if typing.TYPE_CHECKING:
    from streamforge.components._base import Component
    from streamforge.metrics.store import MetricsStore
    from streamforge.net.network import Network
    from streamforge.sim.engine import Engine
    from streamforge.spec.models import FaultSpec

# Component name of fault lines in the event log.
FAULTS = "faults"


class FaultTimeline:
    """
    Fault schedule of a run, applied in time order, each fault once.
    Faults sharing a time keep their declaration order.
    """

    def __init__(
        self,
        engine: Engine,
        network: Network,
        metrics: MetricsStore,
        faults: list[FaultSpec],
        components: dict[str, list[Component]],
    ) -> None:
        self.engine = engine
        self.network = network
        self.metrics = metrics
        self.components = components
        order = sorted(range(len(faults)), key=lambda i: (faults[i].at_us(), i))
        self.faults = [faults[i] for i in order]
        self.applied = [False] * len(self.faults)

    def schedule(self) -> None:
        for index, fault in enumerate(self.faults):
            self.engine.at(fault.at_us(), FAULTS, fault.kind, lambda i=index: self.apply(i))

    def apply(self, index: int) -> None:
        if self.applied[index]:
            raise FaultError(f"Fault #{index} was already applied.")
        self.apply_fault(self.faults[index])
        self.applied[index] = True

    def apply_fault(self, fault: FaultSpec) -> None:
        """
        Change network or component state as the fault prescribes.

        Parameters
        ----------
        fault : FaultSpec
            Fault to apply now.

        Raises
        ------
        TargetMissingError
            If the target is not part of the topology.
        """
        kind = fault.kind
        if kind in LINK_FAULTS:
            if fault.target not in self.network.links:
                raise TargetMissingError(f"{kind} targets unknown link '{fault.target}'.")
        elif fault.target not in self.network.node_up:
            raise TargetMissingError(f"{kind} targets unknown node '{fault.target}'.")

        detail = f"target={fault.target}"
        if kind == FaultKind.LINK_DOWN.value:
            self.network.set_link_up(fault.target, False)
        elif kind == FaultKind.LINK_UP.value:
            self.network.set_link_up(fault.target, True)
        elif kind == FaultKind.SET_LOSS.value:
            self.network.set_loss(fault.target, fault.param)
            detail += f",loss={fault.param:g}"
        elif kind == FaultKind.NODE_CRASH.value:
            self.network.set_node_up(fault.target, False)
            for component in self.components.get(fault.target, []):
                component.crash()
        elif kind == FaultKind.NODE_RECOVER.value:
            self.network.set_node_up(fault.target, True)
            for component in self.components.get(fault.target, []):
                component.recover()
        LOGGER.info(f"Applied {kind} on {fault.target} at t={self.engine.now}us.")
        self.metrics.annotate(self.engine.now, FAULTS, kind, detail)
