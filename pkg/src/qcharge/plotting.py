"""Figure rendering for staircases, charging curves, and sweeps.

Figures are rendered straight to files (Agg backend) next to the delimited
data they illustrate; nothing here opens a window.
"""

from __future__ import annotations

import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_staircase", "plot_charging", "plot_sweep"]

_DPI = 150


def plot_staircase(points: Sequence[tuple[float, int, int]], n: int, path: str) -> str:
    """Certified depth and the smooth bound as functions of the observed rate."""
    etas = np.array([p[0] for p in points])
    depth = np.array([p[1] for p in points])
    smooth = np.array([p[2] for p in points])

    fig, ax = plt.subplots(figsize=(6.0, 4.0), constrained_layout=True)
    ax.step(etas, depth, where="post", lw=1.8, label=r"certified depth $\lceil N/\lfloor\eta^{-2}\rfloor\rceil$")
    ax.plot(etas, smooth, ls="--", lw=1.2, color="tab:orange",
            label=r"smooth bound $\lceil N\eta^2\rceil$")
    ax.axvline(1.0 / math.sqrt(2.0), color="tab:red", ls=":", lw=1.0)
    ax.text(1.0 / math.sqrt(2.0), n * 0.45, r"$\eta=1/\sqrt{2}$", rotation=90,
            va="center", ha="right", fontsize=8, color="tab:red")
    ax.set_xlabel(r"QSL-normalized rate $\eta=\tau_{\rm QSL}/T$")
    ax.set_ylabel("certified trajectory depth")
    ax.set_title(f"Integer speed-depth staircase, N = {n}")
    ax.set_xlim(0.0, 1.02)
    ax.set_ylim(0.0, n * 1.08)
    ax.grid(alpha=0.3)
    ax.legend(loc="upper left", fontsize=8)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_charging(
    curve: np.ndarray,
    depth_times: Sequence[float] | None,
    depths: Sequence[int] | None,
    t_charge: float | None,
    n: int,
    omega: float,
    path: str,
) -> str:
    """Charging curve (fidelity, energy, speed) with the sampled depth profile."""
    has_depth = depth_times is not None and depths is not None
    rows = 2 if has_depth else 1
    fig, axes = plt.subplots(rows, 1, figsize=(6.0, 3.0 * rows),
                             sharex=True, constrained_layout=True)
    axes = np.atleast_1d(axes)

    ax = axes[0]
    ax.plot(curve[:, 0], curve[:, 1], lw=1.6, label="target fidelity")
    ax.plot(curve[:, 0], curve[:, 3] / (n * omega), lw=1.2, ls="--",
            label="stored energy / N$\\omega$")
    if t_charge is not None:
        ax.axvline(t_charge, color="tab:red", ls=":", lw=1.0, label="charging time")
    ax.set_ylabel("fidelity, filling")
    ax.set_ylim(-0.05, 1.1)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)

    if has_depth:
        ax2 = axes[1]
        ax2.step(depth_times, depths, where="mid", lw=1.6, color="tab:green")
        ax2.set_ylabel("entanglement depth")
        ax2.set_ylim(0, max(depths) + 1)
        ax2.grid(alpha=0.3)
    axes[-1].set_xlabel("time")
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_sweep(rows: Sequence[dict], path: str) -> str:
    """Measured (rate, trajectory depth) points on top of their staircases."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0), constrained_layout=True)
    ns = sorted({row["n"] for row in rows})
    cmap = plt.get_cmap("viridis")
    for i, n in enumerate(ns):
        color = cmap(i / max(len(ns) - 1, 1))
        etas = np.linspace(1e-3, 1.0, 512)
        depth = np.array([-(-n // max(int(math.floor(1.0 / (e * e) + 1e-12)), 1))
                          for e in etas])
        ax.step(etas, depth, where="post", lw=0.8, alpha=0.35, color=color)
        xs = [row["eta"] for row in rows if row["n"] == n and row["eta"] is not None]
        ys = [row["ent_u"] for row in rows if row["n"] == n and row["ent_u"] is not None]
        ax.scatter(xs, ys, s=22, color=color, edgecolor="k", linewidths=0.4,
                   label=f"N = {n}", zorder=3)
    ax.set_xlabel(r"measured rate $\eta$")
    ax.set_ylabel("measured trajectory depth")
    ax.set_title("Balanced cluster flips sit on the staircase")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7, ncols=2)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
