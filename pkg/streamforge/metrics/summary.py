# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from typing import Optional

import numpy as np
import pandas as pd

from streamforge.metrics.models import EVENTS, LATENCY, PIPELINE, PORTS, RECORDS, RecordStatus
from streamforge.utils.generic_utils import natural_key


def _stats_ms(values_us: pd.Series) -> dict:
    """
    Mean, median and 99th percentile of microsecond samples, in milliseconds.
    """
    if len(values_us) == 0:
        return {"samples": 0, "mean_ms": None, "median_ms": None, "p99_ms": None}
    values = values_us.to_numpy(dtype=np.int64) / 1000.0
    return {
        "samples": int(len(values)),
        "mean_ms": float(np.mean(values)),
        "median_ms": float(np.median(values)),
        "p99_ms": float(np.percentile(values, 99)),
    }


def _topic_section(records: pd.DataFrame, latency: pd.DataFrame) -> dict:
    section = {}
    topics = sorted(set(records["topic"]) | set(latency["topic"]), key=natural_key)
    for topic in topics:
        rows = records[records["topic"] == topic]
        status = rows["status"].value_counts()
        samples = latency[latency["topic"] == topic]
        delay = samples["deliver_time_us"].astype(np.int64) - samples["produce_time_us"].astype(np.int64)
        section[topic] = {
            "produced": int(len(rows)),
            "delivered": int(status.get(RecordStatus.DELIVERED.value, 0)),
            "lost": int(status.get(RecordStatus.LOST.value, 0)),
            "in_flight": int(status.get(RecordStatus.IN_FLIGHT.value, 0)),
            "duplicates": int(rows["duplicates"].astype(np.int64).sum()),
            "latency": _stats_ms(delay),
        }
    return section


def pipeline_e2e(pipeline: pd.DataFrame) -> pd.DataFrame:
    """
    One end-to-end sample per (pipeline, source record): the last sink
    receipt minus the source produce time.
    """
    if len(pipeline) == 0:
        return pd.DataFrame(columns=["pipeline", "source_producer", "source_seq", "e2e_us"])
    frame = pipeline.astype({"source_seq": np.int64, "produce_time_us": np.int64, "deliver_time_us": np.int64})
    grouped = frame.groupby(["pipeline", "source_producer", "source_seq"], sort=True).agg(
        produce_time_us=("produce_time_us", "min"),
        deliver_time_us=("deliver_time_us", "max"),
    )
    grouped["e2e_us"] = grouped["deliver_time_us"] - grouped["produce_time_us"]
    return grouped.reset_index()[["pipeline", "source_producer", "source_seq", "e2e_us"]]


def _pipeline_section(pipeline: pd.DataFrame) -> dict:
    e2e = pipeline_e2e(pipeline)
    section = {}
    for name in sorted(set(e2e["pipeline"]), key=natural_key):
        section[name] = _stats_ms(e2e[e2e["pipeline"] == name]["e2e_us"])
    return section


def port_rates(ports: pd.DataFrame) -> pd.DataFrame:
    """
    Throughput between consecutive samples of each port, in Kbps.
    """
    columns = ["time_s", "node", "port", "tx_kbps", "rx_kbps"]
    if len(ports) == 0:
        return pd.DataFrame(columns=columns)
    frame = ports.astype({"time_s": float, "port": np.int64, "tx_bytes": np.int64, "rx_bytes": np.int64})
    parts = []
    for (_, _), rows in frame.groupby(["node", "port"], sort=False):
        rows = rows.sort_values("time_s", kind="stable")
        span = rows["time_s"].diff()
        rates = rows[["time_s", "node", "port"]].copy()
        rates["tx_kbps"] = rows["tx_bytes"].diff() * 8 / 1000 / span
        rates["rx_kbps"] = rows["rx_bytes"].diff() * 8 / 1000 / span
        parts.append(rates.iloc[1:])
    return pd.concat(parts, ignore_index=True)[columns] if parts else pd.DataFrame(columns=columns)


def _port_section(ports: pd.DataFrame) -> dict:
    rates = port_rates(ports)
    section = {}
    keys = sorted({(n, int(p)) for n, p in zip(rates["node"], rates["port"])}, key=lambda k: (natural_key(k[0]), k[1]))
    for node, port in keys:
        rows = rates[(rates["node"] == node) & (rates["port"].astype(np.int64) == port)]
        section[f"{node}:{port}"] = {
            "mean_tx_kbps": float(rows["tx_kbps"].mean()),
            "peak_tx_kbps": float(rows["tx_kbps"].max()),
            "mean_rx_kbps": float(rows["rx_kbps"].mean()),
            "peak_rx_kbps": float(rows["rx_kbps"].max()),
        }
    return section


def summarize(frames: dict[str, pd.DataFrame], duration_s: Optional[float] = None) -> dict:
    """
    Aggregate the tables of a run.

    Parameters
    ----------
    frames : dict[str, pd.DataFrame]
        Tables as produced by MetricsStore.to_frames or load_frames.
    duration_s : float
        Simulated duration, reported as is.

    Returns
    -------
    dict
        Per topic accounting and latency, per pipeline end-to-end latency,
        per port throughput and event counts.
    """
    records = frames[RECORDS]
    events = frames[EVENTS]
    counts = events["kind"].value_counts() if len(events) else pd.Series(dtype=np.int64)
    summary = {
        "duration_s": duration_s,
        "records": {
            "produced": int(len(records)),
            "delivered": int((records["status"] == RecordStatus.DELIVERED.value).sum()),
            "lost": int((records["status"] == RecordStatus.LOST.value).sum()),
            "in_flight": int((records["status"] == RecordStatus.IN_FLIGHT.value).sum()),
        },
        "topics": _topic_section(records, frames[LATENCY]),
        "pipelines": _pipeline_section(frames[PIPELINE]),
        "ports": _port_section(frames[PORTS]),
        "events": {kind: int(counts[kind]) for kind in sorted(counts.index)},
    }
    return summary
