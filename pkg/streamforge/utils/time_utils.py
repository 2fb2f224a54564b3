# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from fractions import Fraction

from streamforge.utils.generic_utils import ceil_fraction, exact

US_PER_MS = 1_000
US_PER_S = 1_000_000


def seconds_to_us(seconds: int | float | str | Fraction) -> int:
    """
    Convert simulated seconds to integer microseconds, rounding up.

    Parameters
    ----------
    seconds : int | float | str | Fraction
        Seconds as written in an experiment description.

    Returns
    -------
    int
        Microseconds.
    """
    return ceil_fraction(exact(seconds) * US_PER_S)


def ms_to_us(millis: int | float | str | Fraction) -> int:
    """
    Convert milliseconds to integer microseconds, rounding up.

    Parameters
    ----------
    millis : int | float | str | Fraction
        Milliseconds.

    Returns
    -------
    int
        Microseconds.
    """
    return ceil_fraction(exact(millis) * US_PER_MS)


def us_to_seconds(micros: int) -> float:
    """
    Convert microseconds to float seconds for reporting only.

    Parameters
    ----------
    micros : int
        Microseconds.

    Returns
    -------
    float
        Seconds.
    """
    return micros / US_PER_S
