# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import re
from enum import Enum, EnumMeta
from fractions import Fraction

_DIGITS = re.compile(r"(\d+)")


def list_enum(enum: EnumMeta) -> list:
    """
    Get all the values of an enum.

    Parameters
    ----------
    enum : EnumMeta
        Enum to get values from.

    Returns
    -------
    list
        List of enum values.
    """
    vals: list[Enum] = list(enum)
    return [v.value for v in vals]


def natural_key(identifier: str) -> tuple:
    """
    Sort key that orders embedded numbers numerically ("h2" < "h10").

    Parameters
    ----------
    identifier : str
        Node or component identifier.

    Returns
    -------
    tuple
        Comparable key.
    """
    parts = _DIGITS.split(identifier)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p != "")


def ceil_fraction(value: Fraction) -> int:
    """
    Round a non negative fraction up to the next integer.

    Parameters
    ----------
    value : Fraction
        Value to round.

    Returns
    -------
    int
        Smallest integer not lower than value.
    """
    return -((-value.numerator) // value.denominator)


def exact(value: int | float | str) -> Fraction:
    """
    Exact rational form of a decimal number as written in a config.

    Parameters
    ----------
    value : int | float | str
        Number to convert. Floats go through their shortest repr.

    Returns
    -------
    Fraction
        Exact value.
    """
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)
