"""Figure rendering for Monte-Carlo sweep results.

Consumes the results.csv written by the simulation harness and draws
mean spectral efficiency with standard-error bars, one line per design
method. Aggregates are recomputed from the raw rows instead of being
read from the JSON summary, so the two output files can be checked
against each other.
"""

import csv
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

SE_COLUMN = "spectral_efficiency_bps_hz"
STATUS_COLUMN = "status"

FIGURE_KINDS = ("ptx", "ptx-large", "npath", "nmse")

_AXES = {
    "ptx": ("p_tx_dbm", "transmit power (dBm)",
            "spectral efficiency vs transmit power"),
    "ptx-large": ("p_tx_dbm", "transmit power (dBm)",
                  "spectral efficiency vs transmit power, large arrays"),
    "npath": ("n_path", "number of propagation paths",
              "spectral efficiency vs path count"),
    "nmse": ("nmse_db", "channel estimation error (dB)",
             "spectral efficiency vs estimation error"),
}


@dataclass(frozen=True)
class FigureSpec:
    """Column roles, labels and file locations for one figure."""

    input_csv: Path
    x_column: str
    group_column: str
    output_path: Path
    x_label: str
    y_label: str = "spectral efficiency (bits/s/Hz)"
    title: str = ""


def spec_for_figure(kind: str, input_csv, output_path) -> FigureSpec:
    """Build the spec for one of the canned figure kinds."""
    if kind not in _AXES:
        raise ValueError(f"unknown figure kind {kind!r}; expected one of {FIGURE_KINDS}")
    x_column, x_label, title = _AXES[kind]
    return FigureSpec(
        input_csv=Path(input_csv),
        x_column=x_column,
        group_column="method",
        output_path=Path(output_path),
        x_label=x_label,
        title=title,
    )


def load_rows(path):
    """Read a sweep CSV; returns (header, rows) with rows as dicts.

    A file without even a header row is an error since there is no
    schema to plot against.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path} is empty, nothing to plot")
        header = list(reader.fieldnames)
        rows = list(reader)
    return header, rows


def aggregate(rows, x_column: str, group_column: str):
    """Mean and standard error of the ok-status rates per (group, x).

    Returns (series, reference). series maps group name to lists of x,
    mean, stderr and trial count sorted by x. Rows with a blank x cell
    (the perfect-knowledge point of an estimation-error sweep) land in
    reference as a single level per group. The standard error uses the
    n-1 normalization and is 0.0 for a single sample, matching the
    JSON summary convention.
    """
    buckets = defaultdict(list)
    for row in rows:
        if row[STATUS_COLUMN] != "ok":
            continue
        cell = row[SE_COLUMN]
        if not cell:
            continue
        x_cell = row[x_column]
        x = float(x_cell) if x_cell else None
        buckets[(row[group_column], x)].append(float(cell))

    series = {}
    reference = {}
    for (group, x), values in buckets.items():
        n = len(values)
        mean = math.fsum(values) / n
        if n > 1:
            var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
            stderr = math.sqrt(var) / math.sqrt(n)
        else:
            stderr = 0.0
        if x is None:
            reference[group] = {"mean": mean, "stderr": stderr, "trials": n}
        else:
            series.setdefault(group, []).append((x, mean, stderr, n))

    shaped = {}
    for group, points in series.items():
        points.sort(key=lambda p: p[0])
        xs, means, stderrs, counts = zip(*points)
        shaped[group] = {
            "x": list(xs),
            "mean": list(means),
            "stderr": list(stderrs),
            "trials": list(counts),
        }
    return shaped, reference


def render(spec: FigureSpec) -> dict:
    """Draw the figure and return the plotted values.

    All validation happens before the canvas is touched, so a failing
    render leaves no output file behind. The return value holds the
    exact series and reference levels that were drawn.
    """
    header, rows = load_rows(spec.input_csv)
    needed = (spec.x_column, spec.group_column, SE_COLUMN, STATUS_COLUMN)
    missing = [c for c in needed if c not in header]
    if missing:
        raise ValueError(
            f"{spec.input_csv} is missing column(s): {', '.join(missing)}")
    series, reference = aggregate(rows, spec.x_column, spec.group_column)
    if not series and not reference:
        raise ValueError(f"{spec.input_csv} has no plottable rows")

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    colors = {}
    for name in sorted(series):
        data = series[name]
        container = ax.errorbar(data["x"], data["mean"], yerr=data["stderr"],
                                marker="o", capsize=3, label=name)
        colors[name] = container.lines[0].get_color()
    for name in sorted(reference):
        level = reference[name]
        ax.axhline(level["mean"], linestyle="--", linewidth=1.2,
                   color=colors.get(name), label=f"{name}, perfect knowledge")
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(spec.output_path)
    plt.close(fig)
    return {"series": series, "reference": reference}
