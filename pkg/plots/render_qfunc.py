#!/usr/bin/env python3
"""Render Q-function contour panels from a qfunc long-format CSV.

The input comes from ``raman-cavity qfunc``: columns gt, mode, branch, re,
im, q.  Panels are laid out as one row per time and one column per
(mode, branch) combination, filled contours, equal-aspect axes labeled
Re(alpha) / Im(alpha).

Usage:
    python render_qfunc.py QFUNC.csv --out FIGURE.png [--title TITLE]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


class RenderInputError(ValueError):
    """Malformed or incomplete input file."""

REQUIRED = ["gt", "mode", "branch", "re", "im", "q"]


def read_qfunc_csv(path: str) -> dict[tuple[str, str, str], dict[str, list[float]]]:
    """Group samples by (gt, mode, branch); values keep re/im/q lists."""
    columns: list[str] | None = None
    panels: dict[tuple[str, str, str], dict[str, list[float]]] = {}
    for raw in Path(path).read_text().splitlines():
        if raw.startswith("#") or not raw.strip():
            continue
        cells = raw.split(",")
        if columns is None:
            columns = cells
            missing = [name for name in REQUIRED if name not in columns]
            if missing:
                raise RenderInputError(f"{path}: missing column(s) {', '.join(missing)}")
            continue
        row = dict(zip(columns, cells))
        key = (row["gt"], row["mode"], row["branch"])
        panel = panels.setdefault(key, {"re": [], "im": [], "q": []})
        panel["re"].append(float(row["re"]))
        panel["im"].append(float(row["im"]))
        panel["q"].append(float(row["q"]))
    if columns is None:
        raise RenderInputError(f"{path}: no column header found")
    if not panels:
        raise RenderInputError(f"{path}: no Q samples in file")
    return panels


def panel_grid(panel: dict[str, list[float]]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    re_axis = np.unique(panel["re"])
    im_axis = np.unique(panel["im"])
    if re_axis.size < 2 or im_axis.size < 2:
        raise RenderInputError("degenerate Q grid (needs at least 2x2 samples)")
    values = np.full((im_axis.size, re_axis.size), np.nan)
    ri = {v: i for i, v in enumerate(re_axis)}
    ii = {v: i for i, v in enumerate(im_axis)}
    for re, im, q in zip(panel["re"], panel["im"], panel["q"]):
        values[ii[im], ri[re]] = q
    if np.any(np.isnan(values)):
        raise RenderInputError("incomplete Q grid (missing samples)")
    return re_axis, im_axis, values


def render_qfunc(csv_path: str, out_image: str, title: str = ""):
    """Contour panel figure; returns the figure object."""
    panels = read_qfunc_csv(csv_path)
    gts = sorted({key[0] for key in panels}, key=float)
    combos = sorted({(key[1], key[2]) for key in panels})
    fig, axes = plt.subplots(
        len(gts), len(combos),
        figsize=(3.2 * len(combos), 3.2 * len(gts)),
        squeeze=False,
    )
    for i, gt in enumerate(gts):
        for j, (mode, branch) in enumerate(combos):
            ax = axes[i][j]
            panel = panels.get((gt, mode, branch))
            if panel is None:
                ax.set_axis_off()
                continue
            re_axis, im_axis, values = panel_grid(panel)
            ax.contourf(re_axis, im_axis, values, levels=12, cmap="viridis")
            ax.set_aspect("equal")
            ax.set_title(f"mode {mode}, branch {branch}, gt={float(gt):.3g}", fontsize=9)
            ax.set_xlabel(r"Re $\alpha$", fontsize=8)
            ax.set_ylabel(r"Im $\alpha$", fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out_image, dpi=150)
    return fig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", help="qfunc long-format CSV file")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    try:
        render_qfunc(args.csv, args.out, args.title)
    except (RenderInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
