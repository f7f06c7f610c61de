"""Render ablation line charts from the engine's CSV output.

Input schema: a header ``<x>,family,acc`` (x is ``k`` or ``h``) followed by
one row per (x, family) pair. One line series per family.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .errors import ConvertError  # noqa: E402

_X_LABELS = {"k": "K (polynomial degree)", "h": "H (hidden dimension)"}


def read_ablation_csv(path: str) -> tuple[str, dict[str, list[tuple[int, float]]]]:
    """(x-column name, {family: [(x, acc), ...] sorted by x})."""
    if not os.path.isfile(path):
        raise ConvertError(f"missing file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConvertError(f"{path}: empty file") from None
        if len(header) != 3 or header[1:] != ["family", "acc"]:
            raise ConvertError(
                f"{path}: expected header '<x>,family,acc', got {header}")
        xcol = header[0]
        series: dict[str, list[tuple[int, float]]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ConvertError(f"{path}:{lineno}: expected 3 columns")
            try:
                x, fam, acc = int(row[0]), row[1], float(row[2])
            except ValueError as exc:
                raise ConvertError(f"{path}:{lineno}: {exc}") from exc
            series.setdefault(fam, []).append((x, acc))
    if not series:
        raise ConvertError(f"{path}: no data rows")
    for fam in series:
        series[fam].sort()
    return xcol, series


def plot_results(csv_path: str, out_path: str) -> int:
    """Write a line chart, one series per family; returns the series count."""
    xcol, series = read_ablation_csv(csv_path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for fam in sorted(series):
        xs, ys = zip(*series[fam])
        ax.plot(xs, ys, marker="o", label=fam)
    ax.set_xlabel(_X_LABELS.get(xcol, xcol))
    ax.set_ylabel("Test accuracy")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
    fig.savefig(out_path)
    plt.close(fig)
    return len(series)
