# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class SweepConfig(BaseModel):
    """
    Attribute path and the values it takes, one run per value.
    """

    model_config = ConfigDict(frozen=True)

    attribute: str
    values: list[str] = Field(min_length=1)

    @classmethod
    def parse(cls, text: str) -> SweepConfig:
        """
        Build from "attr=v1,v2,...".

        Parameters
        ----------
        text : str
            Sweep argument.

        Returns
        -------
        SweepConfig
            Parsed sweep.

        Raises
        ------
        ValueError
            If the text has no "=" or no value.
        """
        attribute, sep, raw = text.partition("=")
        if not sep or not attribute.strip():
            raise ValueError(f"sweep must look like attr=v1,v2,..., got '{text}'")
        values = [v.strip() for v in raw.split(",") if v.strip()]
        if not values:
            raise ValueError(f"sweep '{attribute}' has no values")
        return cls(attribute=attribute.strip(), values=values)


class RunConfig(BaseModel):
    """
    Options of a run or a sweep.
    """

    model_config = ConfigDict(extra="forbid")

    spec_path: str
    """GraphML file, directory holding topology.graphml, or bundled scenario name."""

    out_dir: Optional[Path] = None
    seed: Optional[int] = Field(default=None, ge=0)
    duration: Optional[float] = Field(default=None, ge=0)
    sweep: Optional[SweepConfig] = None
    workers: int = Field(default=1, ge=1)
    trace: bool = False

    @field_validator("sweep", mode="before")
    @classmethod
    def _parse_sweep(cls, value):
        if isinstance(value, str):
            return SweepConfig.parse(value)
        return value
