# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

"""
SVG renderings of the exported tables.
"""

from __future__ import annotations

from io import StringIO

import matplotlib
import numpy as np
import pandas as pd
from matplotlib.figure import Figure

from streamforge.utils.generic_utils import natural_key

FIGSIZE = (10, 5)
MAX_COLUMNS = 200

# Fixed salt and no date keep the files identical across runs.
SVG_RC = {"svg.hashsalt": "streamforge", "svg.fonttype": "none"}

# Annotations drawn on the throughput chart, with their marker.
MARKERS = {
    "LeaderDisconnectDetected": "1",
    "LeaderElected": "2",
    "BacklogServed": "3",
    "LeadershipRestored": "4",
}


def render(fig: Figure) -> str:
    """
    Serialize a figure to SVG text.
    """
    buffer = StringIO()
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def latency_svg(latency: pd.DataFrame, topic: str) -> str:
    """
    Latency of each received record of a topic, in production order.
    """
    rows = latency[latency["topic"] == topic]
    rows = rows.astype({"produce_time_us": np.int64, "deliver_time_us": np.int64})
    rows = rows.sort_values(["produce_time_us", "producer", "producer_seq", "consumer"], kind="stable")
    values = ((rows["deliver_time_us"] - rows["produce_time_us"]) / 1000.0).to_numpy()

    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    ax.scatter(np.arange(len(values)), values, s=2, gid=f"latency-{topic}")
    ax.set_title(f"Latency of topic {topic}")
    ax.set_xlabel("message order")
    ax.set_ylabel("latency (ms)")
    return render(fig)


def throughput_svg(rates: pd.DataFrame, events: pd.DataFrame, nodes: list[str]) -> str:
    """
    Received throughput of each node over time, with the leadership
    annotations as vertical markers.
    """
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    plotted = False
    for node in nodes:
        rows = rates[rates["node"] == node]
        if not len(rows):
            continue
        series = rows.groupby("time_s", sort=True)["rx_kbps"].sum()
        ax.plot(series.index.to_numpy(), series.to_numpy(), linewidth=1, label=node)
        plotted = True
    if plotted:
        ax.legend(loc="upper right", fontsize="small")

    marked = events[events["kind"].isin(list(MARKERS))]
    for time_us, kind in zip(marked["time_us"], marked["kind"]):
        x = int(time_us) / 1_000_000
        ax.axvline(x, color="gray", linestyle="--", linewidth=0.8)
        ax.text(x, 1.01, MARKERS[kind], transform=ax.get_xaxis_transform(), ha="center", fontsize="small")

    ax.set_title("Received throughput")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("rx (Kbps)")
    return render(fig)


def delivery_svg(matrix: pd.DataFrame) -> str:
    """
    Delivered share of each producer's records, binned by sequence number.
    White is fully delivered, black is nothing delivered.
    """
    producers = sorted(set(matrix["producer"]), key=natural_key)
    seqs = matrix["producer_seq"].astype(np.int64) if len(matrix) else pd.Series(dtype=np.int64)
    top = int(seqs.max()) + 1 if len(seqs) else 1
    columns = min(MAX_COLUMNS, top)

    grid = np.full((max(len(producers), 1), columns), np.nan)
    for row, producer in enumerate(producers):
        rows = matrix[matrix["producer"] == producer]
        bins = rows["producer_seq"].astype(np.int64) * columns // top
        share = (rows["delivered"] == "Y").groupby(bins).mean()
        grid[row, share.index.to_numpy()] = share.to_numpy(dtype=float)

    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    ax.pcolormesh(
        np.linspace(0, top, columns + 1),
        np.arange(grid.shape[0] + 1),
        np.ma.masked_invalid(grid),
        cmap="gray",
        vmin=0.0,
        vmax=1.0,
        gid="delivery",
    )
    ax.set_yticks(np.arange(len(producers)) + 0.5, labels=producers)
    ax.invert_yaxis()
    ax.set_title("Delivery matrix")
    ax.set_xlabel("message sequence")
    ax.set_ylabel("producer")
    return render(fig)
