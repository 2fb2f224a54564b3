# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from enum import Enum


class DropReason(Enum):
    """
    Reasons a frame is dropped, used as keys of the network statistics.
    """

    LINK_DOWN = "LinkDownDrop"
    LOSS = "LossDrop"
    NODE_DOWN = "NodeDown"
