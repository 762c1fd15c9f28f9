"""Snapshot CSV files and generated plotting scripts."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import numpy as np

from .network import NetworkState, NetworkTopology

HEADER = ["edge", "x", "u"]


def _fmt(x: float) -> str:
    return f"{x:.17e}"


def snapshot_name(t: float) -> str:
    return f"snapshot_t{t:.6f}.csv"


def write_snapshot(state: NetworkState, topology: NetworkTopology, path) -> Path:
    """Write cell averages as ``edge,x,u[,v]`` rows ordered by edge id and cell."""
    path = Path(path)
    with_v = state.v is not None
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER + (["v"] if with_v else []))
        order = sorted(range(len(topology.edges)), key=lambda k: topology.edges[k].id)
        for k in order:
            e = topology.edges[k]
            x = e.cell_centers()
            u = state.u[k]
            v = state.v[k] if with_v else None
            for j in range(e.m):
                row = [str(e.id), _fmt(x[j]), _fmt(u[j])]
                if with_v:
                    row.append(_fmt(v[j]))
                w.writerow(row)
    return path


def read_snapshot(path) -> dict[int, dict[str, np.ndarray]]:
    """Read a snapshot back as ``{edge_id: {"x": ..., "u": ..., ["v": ...]}}``."""
    data: dict[int, dict[str, list]] = {}
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or reader.fieldnames[:3] != HEADER:
            raise ValueError(f"{path}: not a snapshot file (header {reader.fieldnames})")
        cols = reader.fieldnames[1:]
        for row in reader:
            d = data.setdefault(int(row["edge"]), {c: [] for c in cols})
            for c in cols:
                d[c].append(float(row[c]))
    return {k: {c: np.asarray(vals) for c, vals in d.items()} for k, d in data.items()}


_SCRIPT_HEAD = '''\
"""Plot network snapshots. Generated file; edit freely."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt


def load(path):
    edges = defaultdict(lambda: ([], []))
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            xs, us = edges[int(row["edge"])]
            xs.append(float(row["x"]))
            us.append(float(row["u"]))
    return edges


'''

_SCRIPT_PANELS = '''\
fig, axes = plt.subplots(1, len(PANELS), figsize=(4 * len(PANELS), 3.2), sharey=True, squeeze=False)
for ax, (title, curves) in zip(axes[0], PANELS):
    for label, path in curves:
        first = True
        for edge, (xs, us) in sorted(load(path).items()):
            ax.plot(xs, us, color=COLORS.get(label), label=label if first else None, lw=1.2)
            first = False
    ax.axvline(0.0, color="0.6", ls=":", lw=0.8)
    ax.set_xlim(-1.0, 1.0)
    ax.set_title(title)
    ax.set_xlabel("x")
    if len(curves) > 1:
        ax.legend(fontsize="small")
axes[0][0].set_ylabel("u")
fig.tight_layout()
fig.savefig(OUTPUT, dpi=150)
'''


def emit_plot_script(
    snapshots: Sequence,
    path,
    style: str = "panels",
    title: str = "",
) -> Path:
    """Write a matplotlib script drawing the given snapshot files over x in (-1, 1).

    ``snapshots`` is a list of ``(label, csv_path)`` pairs, or of
    ``(label, time, csv_path)`` triples. With ``style="panels"`` each
    snapshot gets its own panel; with ``style="overlay"`` snapshots sharing
    a time are drawn in one panel, one curve per label. The script is
    written, never run.
    """
    if not snapshots:
        raise ValueError("emit_plot_script needs at least one snapshot")
    if style not in ("panels", "overlay"):
        raise ValueError(f"unknown plot style {style!r}")
    entries = []
    for item in snapshots:
        if len(item) == 2:
            label, p = item
            entries.append((str(label), None, str(p)))
        else:
            label, t, p = item
            entries.append((str(label), float(t), str(p)))

    panels: list[tuple[str, list[tuple[str, str]]]] = []
    if style == "panels":
        for label, t, p in entries:
            name = f"t = {t:g}" if t is not None else label
            panels.append((name, [(label, p)]))
    else:
        by_time: dict = {}
        for label, t, p in entries:
            by_time.setdefault(t, []).append((label, p))
        for t, curves in by_time.items():
            panels.append((f"t = {t:g}" if t is not None else title, curves))

    labels = sorted({label for label, _, _ in entries})
    palette = ["C0", "C1", "C2", "C3", "C4", "C5", "C6", "C7"]
    colors = {lab: palette[i % len(palette)] for i, lab in enumerate(labels)}
    path = Path(path)
    body = (
        _SCRIPT_HEAD
        + f"PANELS = {panels!r}\n"
        + f"COLORS = {colors!r}\n"
        + f"OUTPUT = {str(path.with_suffix('.png').name)!r}\n\n"
        + _SCRIPT_PANELS
    )
    path.write_text(body)
    return path
