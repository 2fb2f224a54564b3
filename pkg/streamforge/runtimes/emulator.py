# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import time
from pathlib import Path
from typing import Optional

from streamforge.broker.broker import Broker
from streamforge.broker.controller import Controller
from streamforge.components._base import Component, RunContext
from streamforge.faults.timeline import FaultTimeline
from streamforge.metrics.export import export
from streamforge.metrics.store import MetricsStore
from streamforge.metrics.summary import summarize
from streamforge.net.counters import DEFAULT_SAMPLE_INTERVAL_US
from streamforge.net.network import Network
from streamforge.runtimes._base import Runtime
from streamforge.sim.engine import Engine
from streamforge.spec.enums import NodeAttr
from streamforge.spec.models import ExperimentSpec
from streamforge.utils.io_utils import write_text
from streamforge.utils.logger import LOGGER
from streamforge.utils.time_utils import us_to_seconds
from streamforge.workload.consumer import ConsumerStub
from streamforge.workload.job import StreamJob
from streamforge.workload.producer import ProducerStub
from streamforge.workload.store import KVStore

TRACE_FILE = "trace.log"


class RunResult:
    """
    Outcome of an emulated run.
    """

    def __init__(self, emulator: Emulator, summary: dict, out_dir: Optional[Path]) -> None:
        self.emulator = emulator
        self.summary = summary
        self.out_dir = out_dir

    @property
    def metrics(self) -> MetricsStore:
        return self.emulator.metrics

    def events(self, kind: Optional[str] = None) -> list[tuple[int, str, str, str]]:
        return [e for e in self.emulator.metrics.events if kind is None or e[2] == kind]


class Emulator(Runtime):
    """
    Runtime executing an experiment on the discrete-event engine.

    Parameters
    ----------
    spec : ExperimentSpec
        Validated experiment description.
    base_dir : Path
        Directory against which relative input paths are resolved.
    trace : bool
        Keep the full list of dispatched events.
    """

    def __init__(self, spec: ExperimentSpec, base_dir: Optional[Path] = None, trace: bool = False) -> None:
        super().__init__(spec)
        self.base_dir = Path(base_dir) if base_dir is not None else None
        self.trace = trace
        self.engine: Optional[Engine] = None
        self.network: Optional[Network] = None
        self.metrics: Optional[MetricsStore] = None
        self.brokers: dict[str, Broker] = {}
        self.controller: Optional[Controller] = None
        self.components: list[Component] = []
        self.timeline: Optional[FaultTimeline] = None

    ##############################
    # Wiring
    ##############################

    def build(self) -> None:
        """
        Create engine, network, metrics and every component of the topology.
        """
        spec = self.spec
        self.engine = Engine(spec.seed, self.trace)
        self.network = Network(self.engine, spec)
        self.metrics = MetricsStore()
        self.metrics.ports = self.network.counters
        ctx = RunContext(self.engine, self.network, self.metrics, spec, self.base_dir)

        controller_node = spec.controller()
        cluster = spec.cluster_config()
        by_node: dict[str, list[Component]] = {}
        clients: list[Component] = []
        servers: list[Component] = []
        for node in spec.hosts():
            hosted = node.components()
            placed: list[Component] = []
            if node.is_broker():
                broker = Broker(node.id, ctx, spec.broker_config(node.id), controller_node)
                self.brokers[node.id] = broker
                placed.append(broker)
                servers.append(broker)
            if NodeAttr.STORE_CFG.value in hosted:
                store = KVStore(node.id, ctx, spec.store_config(node.id))
                placed.append(store)
                servers.append(store)
            if NodeAttr.PROD_CFG.value in hosted:
                placed.append(ProducerStub(node.id, ctx, spec.producer_config(node.id), controller_node))
            if NodeAttr.CONS_CFG.value in hosted:
                placed.append(
                    ConsumerStub(
                        node.id,
                        ctx,
                        spec.consumer_config(node.id),
                        controller_node,
                        cluster.max_fetch_bytes,
                    )
                )
            if NodeAttr.STREAM_PROC_CFG.value in hosted:
                placed.append(
                    StreamJob(
                        node.id,
                        ctx,
                        spec.stream_proc_config(node.id),
                        controller_node,
                        node.cpu_percentage,
                        cluster.max_fetch_bytes,
                    )
                )
            clients.extend(c for c in placed if c not in servers)
            by_node[node.id] = placed

        if controller_node is not None:
            self.controller = Controller(controller_node, ctx, cluster, [c.cid for c in clients])
            by_node[controller_node].insert(0, self.controller)
            servers.insert(0, self.controller)
        self.components = servers + clients
        self.timeline = FaultTimeline(self.engine, self.network, self.metrics, list(spec.faults), by_node)

    ##############################
    # Execution
    ##############################

    def _sample(self, duration_us: int) -> None:
        self.network.sample_ports()
        if self.engine.now + DEFAULT_SAMPLE_INTERVAL_US <= duration_us:
            self.engine.after(DEFAULT_SAMPLE_INTERVAL_US, "net", "sample", lambda: self._sample(duration_us))

    def _simulate(self) -> None:
        duration_us = self.spec.duration_us()
        if duration_us == 0:
            return
        self.engine.at(0, "net", "sample", lambda: self._sample(duration_us))
        for component in self.components:
            component.start()
        self.timeline.schedule()
        self.engine.run_until(duration_us)

    def in_leader_log(self, topic: str, producer: str, seq: int) -> bool:
        """
        Whether a record sits in the log of the final leader of its topic,
        or of any replica when the topic has no leader.
        """
        leader = self.controller.leaders.get(topic) if self.controller is not None else None
        candidates = [leader] if leader is not None else self.spec.replicas(topic)
        for broker_id in candidates:
            log = self.brokers[broker_id].logs.get(topic)
            if log is not None and log.lookup((producer, seq)) is not None:
                return True
        return False

    def run(self, out_dir: Optional[Path] = None) -> RunResult:
        """
        Execute the run.

        Parameters
        ----------
        out_dir : Path
            Where artifacts are written. Nothing is written when None.

        Returns
        -------
        RunResult
            Summary and access to the run state.
        """
        if self.engine is None:
            self._execute(self.build)
        started = time.perf_counter()
        LOGGER.info(f"Running {self.spec.duration}s of simulated time with seed {self.spec.seed}.")
        self._execute(self._simulate)
        self.metrics.finalize(self.in_leader_log)
        LOGGER.info(
            f"Run finished: {self.engine.processed} events in {time.perf_counter() - started:.1f}s wall clock."
        )

        duration_s = us_to_seconds(self.spec.duration_us())
        if out_dir is None:
            return RunResult(self, summarize(self.metrics.to_frames(), duration_s), None)
        out_dir = Path(out_dir)
        summary = self._execute(export, self.metrics, out_dir, duration_s, self.spec.brokers() or None)
        if self.trace:
            write_text(out_dir / TRACE_FILE, "".join(f"{line}\n" for line in self.engine.trace()))
        return RunResult(self, summary, out_dir)


def run_experiment(
    spec: ExperimentSpec,
    out_dir: Optional[Path] = None,
    base_dir: Optional[Path] = None,
    trace: bool = False,
) -> RunResult:
    """
    Build and execute one run.

    Parameters
    ----------
    spec : ExperimentSpec
        Validated experiment description.
    out_dir : Path
        Output directory, None to skip exports.
    base_dir : Path
        Directory of the experiment, for relative input paths.
    trace : bool
        Write the dispatched event trace.

    Returns
    -------
    RunResult
        Summary and access to the run state.
    """
    return Emulator(spec, base_dir, trace).run(out_dir)
