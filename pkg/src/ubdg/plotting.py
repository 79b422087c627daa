"""Static SVG charts derived from the CSV outputs (needs matplotlib)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed metadata keeps the SVG output deterministic
    matplotlib.rcParams["svg.hashsalt"] = "ubdg"
    return plt


def plot_convergence(tables, path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    for tab in tables:
        cells = [r[0] for r in tab.rows]
        label = ("filtered" if tab.filtered else "DG") + f", k={tab.k}, theta={tab.theta:g}"
        ax.loglog(cells, [r[1] for r in tab.rows], "o-", label=label + " (L2)")
        ax.loglog(cells, [r[3] for r in tab.rows], "s--", label=label + " (Linf)")
    ax.set_xlabel("cells")
    ax.set_ylabel("error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)


def plot_error_curve(curve, roots: Sequence[float], path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 3))
    for j in range(curve.n_cells):
        ax.plot(curve.x[j], curve.error[j], "b-", lw=1)
    h = curve.x[0, -1] - curve.x[0, 0]
    for j in range(curve.n_cells):
        x0 = curve.x[j, 0]
        xs = x0 + 0.5 * h * (np.asarray(roots) + 1.0)
        ax.plot(xs, np.zeros_like(xs), "rx")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("x")
    ax.set_ylabel("error")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)
