"""Curve files and figures for training/evaluation reports.

Every curve is written twice: a CSV of (episode, raw value, trailing moving
average) and a self-contained SVG line chart next to it. The CSV is the
contract; the chart is convenience.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ConfigError


def moving_average(series: Sequence[float], window: int) -> np.ndarray:
    """Trailing mean over min(window, index+1) points; output length equals input."""
    if window < 1:
        raise ConfigError(f"moving-average window must be >= 1, got {window}")
    values = np.asarray(series, dtype=float)
    if values.size == 0:
        return values
    csum = np.concatenate([[0.0], np.cumsum(values)])
    idx = np.arange(1, values.size + 1)
    lo = np.maximum(idx - window, 0)
    return (csum[idx] - csum[lo]) / (idx - lo)


def write_curve_csv(path, label: str, values: Sequence[float], window: int) -> np.ndarray:
    """CSV columns: episode, <label>, <label>_ma<window>. Returns the MA series."""
    ma = moving_average(values, window)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["episode", label, f"{label}_ma{window}"])
        for ep, (raw, avg) in enumerate(zip(values, ma)):
            writer.writerow([ep, repr(float(raw)), repr(float(avg))])
    return ma


def read_curve_csv(path) -> tuple[list[str], np.ndarray]:
    """Returns (header, data) with data shaped (rows, columns)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    return header, np.array(rows)


def render_curve_figure(
    path,
    values: Sequence[float],
    ma: Sequence[float],
    window: int,
    title: str,
    ylabel: str,
) -> None:
    """Raw series plus its moving average as one SVG line chart."""
    fig, ax = plt.subplots(figsize=(7, 4))
    episodes = np.arange(len(values))
    ax.plot(episodes, values, alpha=0.3, label=ylabel)
    ax.plot(episodes, ma, label=f"moving average ({window})")
    ax.set_xlabel("episode")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(loc="best")
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def render_multi_curve_figure(
    path,
    curves: dict[str, Sequence[float]],
    window: int,
    title: str,
    ylabel: str,
) -> None:
    """Moving-average curves of several agents on shared axes."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, values in curves.items():
        ax.plot(np.arange(len(values)), moving_average(values, window), label=name)
    ax.set_xlabel("episode")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(loc="best")
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def write_summary_table(csv_path, txt_path, rows: list[tuple[str, float, float]]) -> str:
    """Per-agent summary as CSV plus an aligned text table; returns the text."""
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["agent", "mean_return", "mean_wait"])
        for name, ret, wait in rows:
            writer.writerow([name, repr(float(ret)), repr(float(wait))])
    name_width = max([len("agent")] + [len(r[0]) for r in rows])
    lines = [f"{'agent':<{name_width}}  {'mean_return':>14}  {'mean_wait':>14}"]
    for name, ret, wait in rows:
        lines.append(f"{name:<{name_width}}  {ret:>14.4f}  {wait:>14.4f}")
    text = "\n".join(lines) + "\n"
    Path(txt_path).write_text(text, encoding="utf-8")
    return text
