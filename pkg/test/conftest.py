# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0
from __future__ import annotations

from pathlib import Path
from typing import Callable, Optional

import pytest

from streamforge.runtimes.emulator import Emulator, RunResult
from streamforge.spec.models import ExperimentSpec, LinkSpec
from streamforge.spec.parser import assign_ports
from streamforge.spec.validator import validate_experiment

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "streamforge" / "scenarios"


def star_spec(
    hosts: dict[str, dict[str, str]],
    configs: Optional[dict[str, dict]] = None,
    topics: tuple = (),
    faults: tuple = (),
    duration: float = 10.0,
    seed: int = 1,
    lat: float = 1.0,
    bw: float = 100.0,
) -> ExperimentSpec:
    """
    Hosts attached to a single switch s1 by identical links named "<host>-s1".
    """
    nodes = [{"id": host, "kind": "host", **attrs} for host, attrs in hosts.items()]
    nodes.append({"id": "s1", "kind": "switch"})
    links = assign_ports([LinkSpec(id=f"{h}-s1", source=h, target="s1", lat=lat, bw=bw) for h in hosts])
    data = {
        "nodes": nodes,
        "links": [link.model_dump() for link in links],
        "topics": list(topics),
        "faults": list(faults),
        "duration": duration,
        "seed": seed,
        "configs": {ref: {k: str(v) for k, v in values.items()} for ref, values in (configs or {}).items()},
    }
    return validate_experiment(ExperimentSpec.model_validate(data))


@pytest.fixture
def make_spec() -> Callable[..., ExperimentSpec]:
    return star_spec


@pytest.fixture
def run_spec(tmp_path) -> Callable[..., RunResult]:
    def _run(spec: ExperimentSpec, out: bool = False) -> RunResult:
        return Emulator(spec, base_dir=tmp_path).run(tmp_path / "out" if out else None)

    return _run


@pytest.fixture
def pipe_spec(make_spec) -> ExperimentSpec:
    """
    One producer, one single replica broker and one consumer.
    """
    return make_spec(
        {
            "h1": {"prodCfg": "producer.yaml"},
            "h2": {"brokerCfg": "broker.yaml"},
            "h3": {"consCfg": "consumer.yaml"},
        },
        configs={
            "producer.yaml": {"mode": "syntheticRate", "rateKbps": 60, "topics": "t"},
            "broker.yaml": {},
            "consumer.yaml": {"topics": "t"},
        },
        topics=({"name": "t", "preferredLeader": "h2"},),
        duration=10,
    )
