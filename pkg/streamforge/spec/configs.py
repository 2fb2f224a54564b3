# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic.alias_generators import to_camel

from streamforge.spec.enums import (
    DEFAULT_SERVICE_TIME_US,
    WINDOWED_OPERATORS,
    NodeAttr,
    OperatorKind,
    ProducerMode,
    StoreMode,
)

MIB = 1024 * 1024


class ComponentConfig(BaseModel):
    """
    Base model for the flat per-component configuration files.
    """

    model_config = ConfigDict(
        extra="forbid",
        alias_generator=to_camel,
        populate_by_name=True,
        use_enum_values=True,
        validate_default=True,
    )


def parse_topic_list(value: str) -> dict[str, float]:
    """
    Parse a "name[:weight],..." topic list.

    Parameters
    ----------
    value : str
        Comma separated topics with optional weights.

    Returns
    -------
    dict[str, float]
        Topic to weight, in declaration order.
    """
    weights: dict[str, float] = {}
    for item in value.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, weight = item.partition(":")
        name = name.strip()
        weight_value = float(weight) if weight.strip() else 1.0
        if weight_value <= 0:
            raise ValueError(f"topic weight for '{name}' must be positive")
        if name in weights:
            raise ValueError(f"topic '{name}' listed twice")
        weights[name] = weight_value
    if not weights:
        raise ValueError("at least one topic is required")
    return weights


class BrokerConfig(ComponentConfig):
    """
    brokerCfg keys.
    """

    heartbeat_interval_ms: int = Field(default=1000, gt=0)
    """Heartbeat period towards the controller."""

    session_timeout_ms: int = Field(default=6000, gt=0)
    """Silence after which a broker is considered gone."""

    preferred_check_interval_ms: int = Field(default=5000, gt=0)
    """Period of the preferred replica check."""

    election_delay_ms: int = Field(default=200, ge=0)
    """Time taken by the controller to run an election."""

    replica_lag_time_ms: int = Field(default=10000, gt=0)
    """Follower lag tolerated before leaving the ISR (zk mode)."""

    max_fetch_bytes: int = Field(default=MIB, gt=0)
    """Upper bound of a fetch or replication batch."""

    backlog_window_ms: int = Field(default=2000, gt=0)
    """Window after a failover election used to report backlog serving."""


class ClientConfig(ComponentConfig):
    """
    Keys shared by components that produce records.
    """

    retry_interval_ms: int = Field(default=2000, gt=0)
    produce_timeout_s: float = Field(default=30, gt=0)
    request_timeout_ms: int = Field(default=10000, gt=0)


class ProducerConfig(ClientConfig):
    """
    prodCfg keys.
    """

    mode: ProducerMode

    path: Optional[str] = None
    """Input file (lineOfFile) or directory (fileOfDirectory)."""

    rate_kbps: Optional[float] = Field(default=None, gt=0)
    """Emission rate in kilobits per second."""

    record_size_bytes: int = Field(default=750, gt=0)
    """Payload size of synthetic records."""

    buffer_bytes: int = Field(default=16 * MIB, gt=0)
    """Memory reserved for unacknowledged records."""

    interval_ms: int = Field(default=1000, gt=0)
    """Emission period of file modes without rateKbps."""

    topics: str
    """Target topics as "name[:weight],..."."""

    @model_validator(mode="after")
    def _check_mode(self) -> ProducerConfig:
        if self.mode == ProducerMode.SYNTHETIC_RATE.value and self.rate_kbps is None:
            raise ValueError("syntheticRate producers need rateKbps")
        if self.mode != ProducerMode.SYNTHETIC_RATE.value and not self.path:
            raise ValueError(f"{self.mode} producers need path")
        parse_topic_list(self.topics)
        return self

    def topic_weights(self) -> dict[str, float]:
        return parse_topic_list(self.topics)


class ConsumerConfig(ComponentConfig):
    """
    consCfg keys.
    """

    topics: str
    request_timeout_ms: int = Field(default=10000, gt=0)

    @model_validator(mode="after")
    def _check_topics(self) -> ConsumerConfig:
        parse_topic_list(self.topics)
        return self

    def topic_list(self) -> list[str]:
        return list(parse_topic_list(self.topics))


class StreamProcConfig(ClientConfig):
    """
    streamProcCfg keys.
    """

    kind: OperatorKind

    in_topic: str
    """Topic the job consumes."""

    out_topic: Optional[str] = None
    """Topic the job produces to. A job without one is a sink."""

    service_time_us: Optional[int] = Field(default=None, ge=0)
    """Busy time per record at full CPU share."""

    window_seconds: Optional[float] = Field(default=None, gt=0)
    """Tumbling window length for windowed operators."""

    store: Optional[str] = None
    """Node hosting the key-value store the job writes to."""

    store_mode: StoreMode = StoreMode.PUT
    """put overwrites the stored value, add reads it and stores the sum."""

    @model_validator(mode="after")
    def _check_window(self) -> StreamProcConfig:
        if self.kind in WINDOWED_OPERATORS and self.window_seconds is None:
            raise ValueError(f"{self.kind} needs windowSeconds")
        return self

    def service_time(self) -> int:
        if self.service_time_us is not None:
            return self.service_time_us
        return DEFAULT_SERVICE_TIME_US[self.kind]

    def is_sink(self) -> bool:
        return self.out_topic is None


class StoreConfig(ComponentConfig):
    """
    storeCfg keys.
    """

    write_latency_us: int = Field(default=100, ge=0)
    read_latency_us: int = Field(default=50, ge=0)


CONFIG_MODELS: dict[str, type[ComponentConfig]] = {
    NodeAttr.BROKER_CFG.value: BrokerConfig,
    NodeAttr.PROD_CFG.value: ProducerConfig,
    NodeAttr.CONS_CFG.value: ConsumerConfig,
    NodeAttr.STREAM_PROC_CFG.value: StreamProcConfig,
    NodeAttr.STORE_CFG.value: StoreConfig,
}

# *Cfg attribute -> matching *Type label attribute.
COMPONENT_ATTRS: dict[str, Optional[str]] = {
    NodeAttr.BROKER_CFG.value: None,
    NodeAttr.PROD_CFG.value: NodeAttr.PROD_TYPE.value,
    NodeAttr.CONS_CFG.value: NodeAttr.CONS_TYPE.value,
    NodeAttr.STREAM_PROC_CFG.value: NodeAttr.STREAM_PROC_TYPE.value,
    NodeAttr.STORE_CFG.value: NodeAttr.STORE_TYPE.value,
}
