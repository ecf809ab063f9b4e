"""PNG figures for CLI reports (matplotlib, non-interactive backend)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_modes", "plot_lines", "plot_field"]


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    # fixed metadata keeps the files byte-stable between runs
    fig.savefig(path, dpi=110, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_modes(path: Path, modes, title: str = "") -> Path:
    """log phi_m and the Riccati variable x_m against r on log axes."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for mode in modes:
        ax1.plot(mode.grid, mode.log_phi, label=f"m={mode.m}")
        pos = mode.x > 0
        ax2.plot(mode.grid[pos], mode.x[pos], label=f"m={mode.m}")
    ax1.set_xscale("log")
    ax1.set_xlabel("r")
    ax1.set_ylabel("log phi_m")
    ax2.set_xscale("log")
    ax2.set_yscale("log")
    ax2.set_xlabel("r")
    ax2.set_ylabel("x_m")
    ax1.legend(fontsize="small")
    if title:
        fig.suptitle(title)
    return _save(fig, path)


def plot_lines(path: Path, x, series: dict[str, Sequence[float]], xlabel: str, ylabel: str,
               title: str = "", logx: bool = False, logy: bool = False,
               markers: bool = False) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, ys in series.items():
        ax.plot(x, ys, "o-" if markers else "-", label=label, markersize=3)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(series) > 1:
        ax.legend(fontsize="small")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_field(path: Path, field, title: str = "") -> Path:
    """Polar heat map of a harmonic field u(r, theta)."""
    r = np.asarray(field.r_grid)
    th = np.append(field.theta_grid, 2 * np.pi)
    vals = np.column_stack([field.values, field.values[:, :1]])
    T, Rr = np.meshgrid(th, r)
    fig, ax = plt.subplots(figsize=(5, 4.5))
    pc = ax.pcolormesh(Rr * np.cos(T), Rr * np.sin(T), vals, shading="gouraud", cmap="viridis")
    ax.set_aspect("equal")
    ax.set_xlabel("r cos theta")
    ax.set_ylabel("r sin theta")
    fig.colorbar(pc, ax=ax)
    if title:
        ax.set_title(title)
    return _save(fig, path)
