# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Any, Optional

from lxml import etree
from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from streamforge.spec.enums import GraphAttr, LinkAttr, NodeAttr
from streamforge.spec.loader import load_component_config, load_config_rows
from streamforge.spec.models import (
    ExperimentSpec,
    FaultSpec,
    LinkSpec,
    NodeSpec,
    TopicSpec,
    format_errors,
    kind_from_id,
)
from streamforge.spec.validator import validate_experiment
from streamforge.utils.exceptions import MissingConfigError, ParseError, ValidationError
from streamforge.utils.generic_utils import list_enum
from streamforge.utils.io_utils import read_text

DEFAULT_GRAPHML = "topology.graphml"

ALLOWED_KEYS = {
    "graph": list_enum(GraphAttr),
    "node": list_enum(NodeAttr),
    "edge": list_enum(LinkAttr),
}

UNSUPPORTED_ELEMENTS = ("hyperedge", "port", "endpoint", "locator")


class _Key:
    """
    Declared GraphML attribute.
    """

    def __init__(self, domain: str, name: str, attr_type: str, default: Optional[str]) -> None:
        self.domain = domain
        self.name = name
        self.attr_type = attr_type
        self.default = default


def _local(element: etree._Element) -> str:
    return etree.QName(element).localname


def _children(element: etree._Element, name: str) -> list[etree._Element]:
    return [c for c in element if isinstance(c.tag, str) and _local(c) == name]


def _decode(raw: str, key: _Key, where: str) -> Any:
    """
    Decode a data value according to the declared attr.type.
    """
    text = raw.strip()
    try:
        if key.attr_type in ("int", "long"):
            return int(text)
        if key.attr_type in ("float", "double"):
            return float(text)
        if key.attr_type == "boolean":
            if text.lower() not in ("true", "false"):
                raise ValueError(text)
            return text.lower() == "true"
    except ValueError:
        raise ParseError(f"{where}: bad {key.attr_type} value '{raw}' for '{key.name}'.")
    return raw


def assign_ports(links: list[LinkSpec]) -> list[LinkSpec]:
    """
    Give every unnumbered link end the lowest free port of its node, in document order.

    Parameters
    ----------
    links : list[LinkSpec]
        Links in document order.

    Returns
    -------
    list[LinkSpec]
        Links with both ports set.
    """
    used: dict[str, set[int]] = defaultdict(set)
    for link in links:
        if link.st is not None:
            used[link.source].add(link.st)
        if link.dt is not None:
            used[link.target].add(link.dt)

    def _next(node_id: str) -> int:
        port = 1
        while port in used[node_id]:
            port += 1
        used[node_id].add(port)
        return port

    assigned = []
    for link in links:
        update = {}
        if link.st is None:
            update["st"] = _next(link.source)
        if link.dt is None:
            update["dt"] = _next(link.target)
        assigned.append(link.model_copy(update=update) if update else link)
    return assigned


class GraphmlReader:
    """
    Reads one GraphML document into an ExperimentSpec.
    """

    def __init__(self, graphml_text: str | bytes, config_dir: str | Path, source: str = "<graphml>") -> None:
        self.text = graphml_text.encode("utf-8") if isinstance(graphml_text, str) else graphml_text
        self.config_dir = Path(config_dir)
        self.source = source
        self.keys: dict[str, _Key] = {}
        self.configs: dict[str, dict[str, str]] = {}

    def where(self, element: etree._Element) -> str:
        return f"{self.source}:{element.sourceline}"

    ##############################
    # Structure
    ##############################

    def read(self) -> ExperimentSpec:
        root = self._root()
        self._read_keys(root)
        graphs = _children(root, "graph")
        if len(graphs) != 1:
            raise ParseError(f"{self.where(root)}: expected exactly one <graph>, found {len(graphs)}.")
        graph = graphs[0]
        for element in graph.iter():
            if isinstance(element.tag, str) and _local(element) in UNSUPPORTED_ELEMENTS:
                raise ParseError(f"{self.where(element)}: unsupported GraphML element <{_local(element)}>.")

        attrs = self._data(graph, "graph")
        nodes = [self._node(n) for n in _children(graph, "node")]
        links = assign_ports([self._link(e) for e in _children(graph, "edge")])

        topic_cfg = attrs.get(GraphAttr.TOPIC_CFG.value)
        fault_cfg = attrs.get(GraphAttr.FAULT_CFG.value)
        topics = [self._row(TopicSpec, row, f"topic row {i}") for i, row in enumerate(self._rows(topic_cfg))]
        faults = [self._row(FaultSpec, row, f"fault row {i}") for i, row in enumerate(self._rows(fault_cfg))]

        for node in nodes:
            for cfg_attr, ref in node.components().items():
                if ref is not None:
                    self._load_config(node.id, cfg_attr, ref)

        fields = {"nodes": nodes, "links": links, "topics": topics, "faults": faults, "configs": self.configs}
        fields.update(attrs)
        spec = self._row(ExperimentSpec, fields, "graph")
        return validate_experiment(spec)

    def _root(self) -> etree._Element:
        parser = etree.XMLParser(remove_blank_text=True, resolve_entities=False, no_network=True)
        try:
            root = etree.fromstring(self.text, parser)
        except etree.XMLSyntaxError as err:
            raise ParseError(f"{self.source}:{err.lineno}: {err.msg}") from err
        if _local(root) != "graphml":
            raise ParseError(f"{self.where(root)}: root element must be <graphml>, got <{_local(root)}>.")
        return root

    def _read_keys(self, root: etree._Element) -> None:
        """
        Collect the <key> declarations. Keys naming attributes the
        emulator does not know are rejected.
        """
        for element in _children(root, "key"):
            key_id = element.get("id")
            name = element.get("attr.name") or key_id
            if key_id is None:
                raise ParseError(f"{self.where(element)}: <key> without id.")
            domain = element.get("for", "all")
            if domain == "all":
                allowed = {n for names in ALLOWED_KEYS.values() for n in names}
            elif domain in ALLOWED_KEYS:
                allowed = set(ALLOWED_KEYS[domain])
            else:
                raise ParseError(f"{self.where(element)}: key '{key_id}' is declared for unsupported '{domain}'.")
            if name not in allowed:
                raise ValidationError(f"key {key_id}", f"unknown attribute key '{name}' for {domain}")
            defaults = _children(element, "default")
            default = defaults[0].text if defaults else None
            self.keys[key_id] = _Key(domain, name, element.get("attr.type", "string"), default)

    def _data(self, element: etree._Element, domain: str) -> dict[str, Any]:
        """
        Collect the attribute values of a graph, node or edge element.
        Unknown keys are rejected.
        """
        values: dict[str, Any] = {}
        for key in self.keys.values():
            if key.default is not None and key.domain in (domain, "all") and key.name in ALLOWED_KEYS[domain]:
                values[key.name] = _decode(key.default, key, self.where(element))
        seen: set[str] = set()
        for data in _children(element, "data"):
            where = self.where(data)
            key_id = data.get("key")
            if key_id not in self.keys:
                raise ParseError(f"{where}: <data> refers to undeclared key '{key_id}'.")
            key = self.keys[key_id]
            if key.domain not in (domain, "all"):
                raise ParseError(f"{where}: key '{key.name}' is declared for {key.domain}, used on {domain}.")
            if key.name not in ALLOWED_KEYS[domain]:
                raise ValidationError(f"{domain} {self._label(element)}", f"unknown attribute key '{key.name}'")
            if key.name in seen:
                raise ParseError(f"{where}: attribute '{key.name}' given twice.")
            seen.add(key.name)
            values[key.name] = _decode(data.text or "", key, where)
        return values

    def _label(self, element: etree._Element) -> str:
        ident = element.get("id")
        if ident is None and _local(element) == "edge":
            ident = f"{element.get('source')}-{element.get('target')}"
        return f"'{ident}'" if ident is not None else f"at {self.where(element)}"

    ##############################
    # Elements
    ##############################

    def _node(self, element: etree._Element) -> NodeSpec:
        node_id = element.get("id")
        if not node_id:
            raise ParseError(f"{self.where(element)}: <node> without id.")
        if _children(element, "graph"):
            raise ParseError(f"{self.where(element)}: nested graphs are not supported.")
        fields = {"id": node_id, "kind": kind_from_id(node_id)}
        fields.update(self._data(element, "node"))
        return self._row(NodeSpec, fields, f"node '{node_id}'")

    def _link(self, element: etree._Element) -> LinkSpec:
        source, target = element.get("source"), element.get("target")
        if not source or not target:
            raise ParseError(f"{self.where(element)}: <edge> needs source and target.")
        link_id = element.get("id") or f"{source}-{target}"
        fields = {"id": link_id, "source": source, "target": target}
        fields.update(self._data(element, "edge"))
        return self._row(LinkSpec, fields, f"link '{link_id}'")

    @staticmethod
    def _row(model: type[BaseModel], fields: dict, element: str) -> Any:
        try:
            return model.model_validate(fields)
        except PydanticValidationError as err:
            raise ValidationError(element, format_errors(err)) from err

    ##############################
    # Companion files
    ##############################

    def _resolve(self, ref: str, owner: str) -> Path:
        path = self.config_dir / ref
        if not path.is_file():
            raise MissingConfigError(f"{owner}: config '{ref}' not found in '{self.config_dir}'.")
        return path

    def _load_config(self, node_id: str, cfg_attr: str, ref: str) -> None:
        path = self._resolve(ref, f"node '{node_id}' {cfg_attr}")
        if ref not in self.configs:
            self.configs[ref] = load_component_config(path)

    def _rows(self, ref: Optional[str]) -> list[dict[str, str]]:
        if ref is None:
            return []
        return load_config_rows(self._resolve(ref, "graph"))


def parse_experiment(graphml_text: str | bytes, config_dir: str | Path, source: str = "<graphml>") -> ExperimentSpec:
    """
    Parse and validate an experiment description.

    Parameters
    ----------
    graphml_text : str | bytes
        GraphML document.
    config_dir : str | Path
        Directory the *Cfg, topicCfg and faultCfg references are relative to.
    source : str
        Name used in error locations.

    Returns
    -------
    ExperimentSpec
        Fully validated description.

    Raises
    ------
    ParseError
        Malformed XML or attribute value.
    ValidationError
        Invariant violation.
    MissingConfigError
        Dangling config reference.
    """
    return GraphmlReader(graphml_text, config_dir, source).read()


def resolve_graphml(path: str | Path) -> Path:
    """
    Accept a GraphML file or a directory holding topology.graphml.

    Parameters
    ----------
    path : str | Path
        File or directory.

    Returns
    -------
    Path
        GraphML file path.
    """
    path = Path(path)
    if path.is_dir():
        path = path / DEFAULT_GRAPHML
    if not path.is_file():
        raise MissingConfigError(f"GraphML file '{path}' does not exist.")
    return path


def parse_experiment_file(path: str | Path) -> ExperimentSpec:
    """
    Parse an experiment from disk, resolving references next to the GraphML file.

    Parameters
    ----------
    path : str | Path
        GraphML file or directory holding topology.graphml.

    Returns
    -------
    ExperimentSpec
        Fully validated description.
    """
    graphml = resolve_graphml(path)
    return parse_experiment(read_text(graphml), graphml.parent, str(graphml))
