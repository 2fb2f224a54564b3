# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from enum import Enum


class SetProfile(Enum):
    """
    Supported profile selectors.
    """

    DEFAULT = "__default"
    PROFILE_VAR = "STREAMFORGE_PROFILE"


class ConfigurationVars(Enum):
    """
    List of supported configuration variables.
    """

    OUT_DIR = "STREAMFORGE_OUT"
    LOG_LEVEL = "STREAMFORGE_LOG_LEVEL"
    WORKERS = "STREAMFORGE_WORKERS"
