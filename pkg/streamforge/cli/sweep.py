# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import pandas as pd

from streamforge.cli.models import SweepConfig
from streamforge.runtimes.emulator import run_experiment
from streamforge.spec.models import ExperimentSpec
from streamforge.spec.overrides import apply_override
from streamforge.utils.exceptions import IoError
from streamforge.utils.logger import LOGGER

SWEEP_FILE = "sweep_summary.csv"

SWEEP_COLUMNS = [
    "attribute",
    "value",
    "kind",
    "name",
    "produced",
    "delivered",
    "lost",
    "samples",
    "mean_ms",
    "median_ms",
    "p99_ms",
    "mean_rx_kbps",
    "peak_rx_kbps",
]


def expand_sweep(spec: ExperimentSpec, sweep: SweepConfig) -> list[tuple[str, ExperimentSpec]]:
    """
    One validated description per sweep value.

    Every value is applied before anything runs, so a value that does not
    fit the attribute fails the whole sweep up front.

    Parameters
    ----------
    spec : ExperimentSpec
        Base description.
    sweep : SweepConfig
        Attribute and values.

    Returns
    -------
    list[tuple[str, ExperimentSpec]]
        (value, description) pairs in the given order.
    """
    return [(value, apply_override(spec, sweep.attribute, value)) for value in sweep.values]


def value_dir(out_dir: Path, attribute: str, value: str) -> Path:
    return Path(out_dir) / f"{attribute}={value}"


def run_value(spec: ExperimentSpec, out_dir: Path, base_dir: Optional[Path], trace: bool) -> dict:
    """
    Execute one sweep value and return its summary.
    """
    return run_experiment(spec, out_dir, base_dir, trace).summary


def summary_rows(attribute: str, value: str, summary: dict) -> list[dict]:
    """
    Flatten a run summary into rows of the combined sweep table.

    Parameters
    ----------
    attribute : str
        Swept attribute path.
    value : str
        Value of this run.
    summary : dict
        Run summary.

    Returns
    -------
    list[dict]
        One row per topic, pipeline and port.
    """
    rows = []
    for topic, section in summary["topics"].items():
        rows.append(
            {
                "kind": "topic",
                "name": topic,
                "produced": section["produced"],
                "delivered": section["delivered"],
                "lost": section["lost"],
                **section["latency"],
            }
        )
    for pipeline, stats in summary["pipelines"].items():
        rows.append({"kind": "pipeline", "name": pipeline, **stats})
    for port, rates in summary["ports"].items():
        rows.append(
            {
                "kind": "port",
                "name": port,
                "mean_rx_kbps": rates["mean_rx_kbps"],
                "peak_rx_kbps": rates["peak_rx_kbps"],
            }
        )
    return [{"attribute": attribute, "value": value, **row} for row in rows]


def run_sweep(
    spec: ExperimentSpec,
    sweep: SweepConfig,
    out_dir: Path,
    base_dir: Optional[Path] = None,
    workers: int = 1,
    trace: bool = False,
) -> pd.DataFrame:
    """
    Run every sweep value with the same seed and write the combined table.

    Parameters
    ----------
    spec : ExperimentSpec
        Base description.
    sweep : SweepConfig
        Attribute and values.
    out_dir : Path
        Parent directory; each value writes to "<attribute>=<value>/".
    base_dir : Path
        Directory of the experiment, for relative input paths.
    workers : int
        Process pool size. 1 runs values in this process.
    trace : bool
        Write the event trace of each run.

    Returns
    -------
    pd.DataFrame
        Combined table, also written to sweep_summary.csv.

    Raises
    ------
    IoError
        If the combined table cannot be written.
    """
    out_dir = Path(out_dir)
    runs = expand_sweep(spec, sweep)
    dirs = [value_dir(out_dir, sweep.attribute, value) for value, _ in runs]
    LOGGER.info(f"Sweeping {sweep.attribute} over {sweep.values} with {workers} worker(s).")

    if workers > 1 and len(runs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(runs))) as pool:
            futures = [
                pool.submit(run_value, value_spec, target, base_dir, trace)
                for (_, value_spec), target in zip(runs, dirs)
            ]
            summaries = [future.result() for future in futures]
    else:
        summaries = [run_value(value_spec, target, base_dir, trace) for (_, value_spec), target in zip(runs, dirs)]

    rows = []
    for (value, _), summary in zip(runs, summaries):
        rows.extend(summary_rows(sweep.attribute, value, summary))
    table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        table.to_csv(out_dir / SWEEP_FILE, index=False, lineterminator="\n")
    except OSError as err:
        LOGGER.exception(f"Cannot write {SWEEP_FILE} to {out_dir}.")
        raise IoError(f"Cannot write sweep table to {out_dir}: {err}") from err
    return table
