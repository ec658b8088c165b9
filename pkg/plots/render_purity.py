#!/usr/bin/env python3
"""Render purity-vs-time figures from purity-sweep CSV files.

Reads one or more CSV files produced by ``raman-cavity purity-sweep`` plus
the JSON file from ``raman-cavity times``, and draws every purity column as
a curve with vertical markers at the disentanglement and revival times.
The curve labels come from the metadata embedded in each CSV header, so a
coherent and a squeezed sweep plotted together are distinguished
automatically.

Usage:
    python render_purity.py SWEEP.csv [SWEEP2.csv ...] --times TIMES.json \
        --out FIGURE.png [--title TITLE]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


class RenderInputError(ValueError):
    """Malformed or incomplete input file."""


def read_sweep_csv(path: str) -> tuple[dict, list[str], dict[str, list[float]]]:
    """Parse a purity-sweep CSV: '#'-comment params, column header, rows."""
    params: dict[str, str] = {}
    columns: list[str] | None = None
    series: dict[str, list[float]] = {}
    for raw in Path(path).read_text().splitlines():
        if raw.startswith("#"):
            body = raw[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                params[key.strip()] = value.strip()
            continue
        if not raw.strip():
            continue
        cells = raw.split(",")
        if columns is None:
            columns = cells
            series = {name: [] for name in columns}
            continue
        if len(cells) != len(columns):
            raise RenderInputError(f"{path}: row has {len(cells)} cells, expected {len(columns)}")
        for name, cell in zip(columns, cells):
            try:
                series[name].append(float(cell))
            except ValueError as exc:
                raise RenderInputError(f"{path}: non-numeric cell {cell!r} in column {name}") from exc
    if columns is None:
        raise RenderInputError(f"{path}: no column header found")
    if "gt" not in columns:
        raise RenderInputError(f"{path}: missing required column 'gt'")
    if len(columns) < 2:
        raise RenderInputError(f"{path}: no purity columns next to 'gt'")
    return params, columns, series


def read_times_json(path: str) -> tuple[list[float], list[float]]:
    payload = json.loads(Path(path).read_text())
    try:
        dis = [float(t) for t in payload["disentanglement_times"]]
        rev = [float(t) for t in payload["revivals"]["times"]]
    except (KeyError, TypeError) as exc:
        raise RenderInputError(f"{path}: missing times fields ({exc})") from exc
    return dis, rev


def series_label(params: dict, column: str, n_files: int) -> str:
    """Human label: the purity column, tagged by family when it helps."""
    label = column.replace("_", " ")
    fam1 = params.get("state1.family", "")
    fam2 = params.get("state2.family", "")
    if n_files > 1 and fam1:
        family = fam1 if fam1 == fam2 else f"{fam1}/{fam2}"
        label = f"{family}: {label}"
    return label


def render_purity(csv_paths: list[str], times_path: str, out_image: str, title: str = ""):
    """Draw all purity curves plus time markers; returns the figure."""
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    for path in csv_paths:
        params, columns, series = read_sweep_csv(path)
        gt = series["gt"]
        for column in columns:
            if column == "gt":
                continue
            style = "-" if len(gt) > 1 else "o"
            ax.plot(gt, series[column], style, label=series_label(params, column, len(csv_paths)))
    dis_times, revival_times = read_times_json(times_path)
    for t in dis_times:
        ax.axvline(t, color="tab:gray", linestyle="--", alpha=0.7, linewidth=1.0)
    for t in revival_times:
        ax.axvline(t, color="tab:red", linestyle=":", alpha=0.7, linewidth=1.0)
    ax.set_xlabel("interaction time  gt")
    ax.set_ylabel("purity")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize="small")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_image, dpi=150)
    return fig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", nargs="+", help="purity-sweep CSV file(s)")
    parser.add_argument("--times", required=True, help="JSON file from the times command")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    try:
        render_purity(args.csv, args.times, args.out, args.title)
    except (RenderInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
