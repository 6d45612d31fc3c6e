"""Deterministic SVG line plots of sweep CSV files."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SERIES_PREFIXES = ("K_", "F_")
X_COLUMNS = ("t", "distance_km", "spacing_km")


def series_columns(header) -> list[str]:
    return [c for c in header if c.startswith(SERIES_PREFIXES)]


def _value(cell: str) -> float:
    return float(cell) if cell != "" else math.nan


def plot_csv(header: list[str], rows: list[dict], out_path: str, x_col: str | None = None,
             title: str | None = None, log_x: bool | None = None) -> list[str]:
    """Log-scale rate plot, one line per K_/F_ column. Series without any
    positive value are left out and listed in the legend title.

    Returns the names of the plotted series.
    """
    cols = series_columns(header)
    if not cols:
        raise ValueError("no K_ or F_ columns to plot")
    if x_col is None:
        x_col = next((c for c in X_COLUMNS if c in header), None)
        if x_col is None:
            raise ValueError(f"no x column among {X_COLUMNS}")
    if log_x is None:
        log_x = x_col == "t"

    plt.rcParams["svg.hashsalt"] = "qkdrates"
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    x = [_value(r[x_col]) for r in rows]
    plotted, omitted = [], []
    for c in cols:
        y = [_value(r[c]) for r in rows]
        pts = [(a, b) for a, b in zip(x, y) if b > 0.0]
        if not pts:
            omitted.append(c)
            continue
        xs, ys = zip(*pts)
        line, = ax.plot(xs, ys, label=c[2:])
        line.set_gid(f"series-{c}")
        plotted.append(c)
    ax.set_yscale("log")
    if log_x:
        ax.set_xscale("log")
        ax.invert_xaxis()
    ax.set_xlabel(x_col)
    ax.set_ylabel("rate per source pulse")
    if title:
        ax.set_title(title)
    legend_title = ("no key: " + ", ".join(c[2:] for c in omitted)) if omitted else None
    if plotted or omitted:
        ax.legend(title=legend_title, fontsize="small")
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return plotted
