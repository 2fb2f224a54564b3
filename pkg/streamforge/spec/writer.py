# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from pathlib import Path
from typing import Any

from lxml import etree

from streamforge.spec.enums import GraphAttr, LinkAttr, NodeAttr
from streamforge.spec.models import ExperimentSpec
from streamforge.spec.parser import DEFAULT_GRAPHML
from streamforge.utils.exceptions import IoError
from streamforge.utils.io_utils import write_yaml

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"

DEFAULT_TOPIC_FILE = "topics.yaml"
DEFAULT_FAULT_FILE = "faults.yaml"

# (domain, attribute, GraphML attr.type)
KEYS = [
    ("graph", GraphAttr.TOPIC_CFG.value, "string"),
    ("graph", GraphAttr.FAULT_CFG.value, "string"),
    ("graph", GraphAttr.SEED.value, "long"),
    ("graph", GraphAttr.DURATION.value, "double"),
    *[("node", a.value, "double" if a == NodeAttr.CPU_PERCENTAGE else "string") for a in NodeAttr],
    *[("edge", a.value, "int" if a in (LinkAttr.ST, LinkAttr.DT) else "double") for a in LinkAttr],
]


def _text(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _add_data(parent: etree._Element, attrs: dict[str, Any]) -> None:
    for name, value in attrs.items():
        if value is None:
            continue
        data = etree.SubElement(parent, "data", key=name)
        data.text = _text(value)


def _companion_refs(spec: ExperimentSpec) -> tuple:
    topic_cfg = spec.topic_cfg or (DEFAULT_TOPIC_FILE if spec.topics else None)
    fault_cfg = spec.fault_cfg or (DEFAULT_FAULT_FILE if spec.faults else None)
    return topic_cfg, fault_cfg


def to_graphml(spec: ExperimentSpec) -> bytes:
    """
    Serialise the topology part of an experiment description.

    Parameters
    ----------
    spec : ExperimentSpec
        Description to serialise.

    Returns
    -------
    bytes
        GraphML document. Companion files are referenced, not inlined.
    """
    root = etree.Element("graphml", nsmap={None: GRAPHML_NS})
    for domain, name, attr_type in KEYS:
        etree.SubElement(root, "key", {"id": name, "for": domain, "attr.name": name, "attr.type": attr_type})

    graph = etree.SubElement(root, "graph", id="G", edgedefault="undirected")
    topic_cfg, fault_cfg = _companion_refs(spec)
    _add_data(
        graph,
        {
            GraphAttr.TOPIC_CFG.value: topic_cfg,
            GraphAttr.FAULT_CFG.value: fault_cfg,
            GraphAttr.SEED.value: spec.seed,
            GraphAttr.DURATION.value: spec.duration,
        },
    )
    for node in spec.nodes:
        element = etree.SubElement(graph, "node", id=node.id)
        _add_data(element, {a.value: node.attribute(a.value) for a in NodeAttr})
    for link in spec.links:
        element = etree.SubElement(graph, "edge", id=link.id, source=link.source, target=link.target)
        _add_data(element, {a.value: getattr(link, a.value) for a in LinkAttr})
    return etree.tostring(root, pretty_print=True, xml_declaration=True, encoding="UTF-8")


def write_experiment(spec: ExperimentSpec, out_dir: str | Path) -> Path:
    """
    Write an experiment description with its companion files, so that
    parsing the result gives back an equal description.

    Parameters
    ----------
    spec : ExperimentSpec
        Description to write.
    out_dir : str | Path
        Target directory, created if missing.

    Returns
    -------
    Path
        Path of the GraphML file.

    Raises
    ------
    IoError
        If the files cannot be written.
    """
    out_dir = Path(out_dir)
    topic_cfg, fault_cfg = _companion_refs(spec)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        graphml = out_dir / DEFAULT_GRAPHML
        graphml.write_bytes(to_graphml(spec))
        if topic_cfg is not None:
            rows = [t.model_dump(by_alias=True) for t in spec.topics]
            _write_config(out_dir / topic_cfg, rows)
        if fault_cfg is not None:
            rows = [f.model_dump(by_alias=True, exclude_none=True) for f in spec.faults]
            _write_config(out_dir / fault_cfg, rows)
        for ref, values in spec.configs.items():
            _write_config(out_dir / ref, values)
    except OSError as err:
        raise IoError(f"Cannot write experiment to '{out_dir}': {err}") from err
    return graphml


def _write_config(path: Path, obj: dict | list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if obj:
        write_yaml(path, obj)
    else:
        path.write_text("", encoding="utf-8")

