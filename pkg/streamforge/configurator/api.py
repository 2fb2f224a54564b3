# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from streamforge.configurator.configurator import configurator


def get_current_profile() -> str:
    """
    Get the name of the current configuration profile.

    Returns
    -------
    str
        Name of the current profile.
    """
    return configurator.get_current_profile()


def reload_configuration() -> None:
    """
    Re-read run defaults from environment and file.
    """
    configurator.reload()
