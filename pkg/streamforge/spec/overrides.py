# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from pydantic import ValidationError as PydanticValidationError
from pydantic.alias_generators import to_snake

from streamforge.spec.enums import GraphAttr, LinkAttr, NodeAttr
from streamforge.spec.models import ExperimentSpec, LinkSpec, format_errors
from streamforge.spec.parser import assign_ports
from streamforge.spec.validator import validate_experiment
from streamforge.utils.exceptions import ValidationError

# scope -> (collection, identifier field, overridable attributes)
OVERRIDABLE = {
    "link": ("links", "id", [LinkAttr.LAT.value, LinkAttr.BW.value, LinkAttr.LOSS.value]),
    "node": ("nodes", "id", [NodeAttr.CPU_PERCENTAGE.value]),
    "topic": ("topics", "name", ["replicationFactor", "consistencyMode", "preferredLeader"]),
}

GRAPH_OVERRIDES = [GraphAttr.SEED.value, GraphAttr.DURATION.value]

REPLICATE = "replicate"


def describe_paths() -> list[str]:
    """
    Supported override path patterns.
    """
    paths = [f"graph.{a}" for a in GRAPH_OVERRIDES]
    for scope, (_, _, attrs) in OVERRIDABLE.items():
        paths.extend(f"{scope}.<id>.{a}" for a in attrs)
    paths.append(f"{REPLICATE}.<nodeId>")
    return paths


def _replicate(spec: ExperimentSpec, node_id: str, value: str, path: str) -> dict:
    """
    Clone a host and its links so that `value` copies exist in total.
    """
    try:
        copies = int(value)
    except ValueError:
        raise ValidationError(f"override '{path}'", f"expected an integer count, got '{value}'")
    if copies < 1:
        raise ValidationError(f"override '{path}'", f"count must be >= 1, got {copies}")
    try:
        node = spec.node(node_id)
    except KeyError:
        raise ValidationError(f"override '{path}'", f"node '{node_id}' is not declared")
    if node.is_switch():
        raise ValidationError(f"override '{path}'", "only hosts can be replicated")

    nodes = list(spec.nodes)
    links = list(spec.links)
    position = nodes.index(node)
    touching = [link for link in spec.links if node_id in link.endpoints()]
    for i in range(2, copies + 1):
        clone_id = f"{node_id}r{i}"
        position += 1
        nodes.insert(position, node.model_copy(update={"id": clone_id}))
        for link in touching:
            source = clone_id if link.source == node_id else link.source
            target = clone_id if link.target == node_id else link.target
            links.append(
                LinkSpec(
                    id=f"{link.id}r{i}",
                    source=source,
                    target=target,
                    lat=link.lat,
                    bw=link.bw,
                    loss=link.loss,
                )
            )
    data = spec.model_dump()
    data["nodes"] = [n.model_dump() for n in nodes]
    data["links"] = [link.model_dump() for link in assign_ports(links)]
    return data


def apply_override(spec: ExperimentSpec, path: str, value: str) -> ExperimentSpec:
    """
    Return a copy of the description with one attribute replaced.

    Parameters
    ----------
    spec : ExperimentSpec
        Description to copy.
    path : str
        Attribute path, e.g. "link.h2-s1.lat" or "graph.seed".
    value : str
        New value, coerced to the attribute type.

    Returns
    -------
    ExperimentSpec
        Validated copy.

    Raises
    ------
    ValidationError
        If the path does not resolve or the value does not fit the attribute.
    """
    scope, _, rest = path.partition(".")
    element = f"override '{path}'"
    if scope == "graph":
        if rest not in GRAPH_OVERRIDES:
            raise ValidationError(element, f"unknown graph attribute '{rest}'")
        data = spec.model_dump()
        data[rest] = value
    elif scope in OVERRIDABLE:
        collection, id_field, attrs = OVERRIDABLE[scope]
        ident, _, attr = rest.rpartition(".")
        if attr not in attrs:
            raise ValidationError(element, f"'{attr}' is not overridable on {scope}s, use one of {attrs}")
        data = spec.model_dump()
        matches = [item for item in data[collection] if item[id_field] == ident]
        if not matches:
            raise ValidationError(element, f"{scope} '{ident}' is not declared")
        matches[0][to_snake(attr)] = value
    elif scope == REPLICATE:
        data = _replicate(spec, rest, value, path)
    else:
        raise ValidationError(element, f"unknown scope '{scope}', expected one of {describe_paths()}")

    try:
        updated = ExperimentSpec.model_validate(data)
    except PydanticValidationError as err:
        raise ValidationError(element, format_errors(err)) from err
    return validate_experiment(updated)
