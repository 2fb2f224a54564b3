# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from pathlib import Path
from typing import Optional

import pandas as pd

from streamforge.metrics.models import DELIVERY, EVENTS, LATENCY, PORTS, STRING_COLUMNS, SUMMARY_FILE, TABLES
from streamforge.metrics.store import MetricsStore
from streamforge.metrics.summary import port_rates, summarize
from streamforge.metrics.svg import delivery_svg, latency_svg, throughput_svg
from streamforge.utils.exceptions import IoError
from streamforge.utils.generic_utils import natural_key
from streamforge.utils.io_utils import read_text, write_text, write_yaml
from streamforge.utils.logger import LOGGER


def _events_text(events: pd.DataFrame) -> str:
    lines = [f"{t} {c} {k} {d}\n" for t, c, k, d in events.itertuples(index=False, name=None)]
    return "".join(lines)


def _read_events(path: Path) -> pd.DataFrame:
    rows = []
    for line in read_text(path).splitlines():
        if line:
            time_us, component, kind, detail = line.split(" ", 3)
            rows.append((int(time_us), component, kind, detail))
    return pd.DataFrame(rows, columns=TABLES[EVENTS][1])


def write_frames(frames: dict[str, pd.DataFrame], out_dir: Path) -> None:
    """
    Write every table: CSV files plus the space separated event log.
    """
    for name, (filename, _) in TABLES.items():
        path = out_dir / filename
        if name == EVENTS:
            write_text(path, _events_text(frames[name]))
        else:
            frames[name].to_csv(path, index=False, lineterminator="\n")


def load_frames(out_dir: str | Path) -> dict[str, pd.DataFrame]:
    """
    Read back the tables written by export.

    Parameters
    ----------
    out_dir : str | Path
        Run output directory.

    Returns
    -------
    dict[str, pd.DataFrame]
        Tables keyed like MetricsStore.to_frames.

    Raises
    ------
    IoError
        If a table is missing or unreadable.
    """
    out_dir = Path(out_dir)
    frames = {}
    try:
        for name, (filename, columns) in TABLES.items():
            path = out_dir / filename
            if name == EVENTS:
                frames[name] = _read_events(path)
                continue
            dtypes = {c: str for c in columns if c in STRING_COLUMNS}
            frames[name] = pd.read_csv(path, dtype=dtypes, keep_default_na=False)
    except (OSError, ValueError) as err:
        LOGGER.exception(f"Cannot read run tables from {out_dir}.")
        raise IoError(f"Cannot read run tables from {out_dir}: {err}") from err
    return frames


def export(
    store: MetricsStore,
    out_dir: str | Path,
    duration_s: Optional[float] = None,
    nodes: Optional[list[str]] = None,
) -> dict:
    """
    Write tables, summary and renderings of a finished run.

    Parameters
    ----------
    store : MetricsStore
        Observations of the run.
    out_dir : str | Path
        Destination directory, created if missing.
    duration_s : float
        Simulated duration, copied into the summary.
    nodes : list[str]
        Nodes plotted on the throughput chart. Defaults to every node with samples.

    Returns
    -------
    dict
        The run summary.

    Raises
    ------
    IoError
        If the directory or a file cannot be written.
    """
    out_dir = Path(out_dir)
    frames = store.to_frames()
    summary = summarize(frames, duration_s)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_frames(frames, out_dir)
        write_yaml(out_dir / SUMMARY_FILE, summary)
        for topic in sorted(set(frames[LATENCY]["topic"]), key=natural_key):
            write_text(out_dir / f"latency_{topic}.svg", latency_svg(frames[LATENCY], topic))
        if nodes is None:
            nodes = sorted(set(frames[PORTS]["node"]), key=natural_key)
        rates = port_rates(frames[PORTS])
        write_text(out_dir / "throughput.svg", throughput_svg(rates, frames[EVENTS], nodes))
        write_text(out_dir / "delivery_matrix.svg", delivery_svg(frames[DELIVERY]))
    except OSError as err:
        LOGGER.exception(f"Cannot write run outputs to {out_dir}.")
        raise IoError(f"Cannot write run outputs to {out_dir}: {err}") from err
    return summary
