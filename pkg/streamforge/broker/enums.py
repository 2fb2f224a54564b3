# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from enum import Enum


class ErrorCode(Enum):
    """
    Error codes carried by broker responses.
    """

    NOT_LEADER = "NOT_LEADER"
    LEADER_TRANSFER = "LEADER_TRANSFER"
    UNKNOWN_TOPIC = "UNKNOWN_TOPIC"
    OFFSET_OUT_OF_RANGE = "OFFSET_OUT_OF_RANGE"


class Annotation(Enum):
    """
    Kinds written to the event log by the cluster and its clients.
    """

    LEADER_DISCONNECT_DETECTED = "LeaderDisconnectDetected"
    LEADER_ELECTED = "LeaderElected"
    BACKLOG_SERVED = "BacklogServed"
    LEADERSHIP_RESTORED = "LeadershipRestored"
    LEADER_ACTIVE = "LeaderActive"
    LEADER_RESIGNED = "LeaderResigned"
    TRUNCATED = "Truncated"
    ISR_SHRINK = "IsrShrink"
    ISR_EXPAND = "IsrExpand"
    TOPIC_UNAVAILABLE = "TopicUnavailable"
    BROKER_RECONNECTED = "BrokerReconnected"
    BUFFER_FULL_STALL = "BufferFullStall"
    RECORD_TIMEOUT = "RecordTimeout"
    OFFSET_RESET = "OffsetReset"
    MALFORMED_RECORD = "MalformedRecord"
    COMPONENT_CRASHED = "ComponentCrashed"
    COMPONENT_RECOVERED = "ComponentRecovered"


def broker_cid(node_id: str) -> str:
    return f"{node_id}/broker"


def controller_cid(node_id: str) -> str:
    return f"{node_id}/controller"
