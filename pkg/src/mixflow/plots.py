"""Figure rendering for the report path: heatmaps, sweep curves, trajectories.

Figures are a convenience companion to the delimited output; the CSVs stay
the canonical artifact.  Rendering uses the Agg backend so the CLI works
headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .optimizer import OptimizationReport, SweepRow
from .simulate import Trajectory


def _count_value(cell, which: str, cap: int) -> float:
    res = getattr(cell, which)
    return float(cap + 1) if res.n_star is None else float(res.n_star)


def render_heatmaps(report: OptimizationReport, out_dir: Path) -> list[Path]:
    """One PNG per gain pair, colored by the stabilizable count (safety-constrained
    alongside), with infeasible cells masked out."""
    paths = []
    for ax_a, ax_b, ax_fixed, fixed_value, rows in report.heatmap_slices():
        a_vals = sorted({r[0] for r in rows})
        b_vals = sorted({r[1] for r in rows})
        shape = (len(a_vals), len(b_vals))
        idx = {(a, b): (a_vals.index(a), b_vals.index(b)) for a, b, _ in rows}
        fig, axes = plt.subplots(1, 2, figsize=(11, 4.2), constrained_layout=True)
        for ax, which, title in zip(axes, ("stable", "safe"), ("stabilizable", "safety-constrained")):
            z = np.full(shape, np.nan)
            for a, b, cell in rows:
                if cell.feasible:
                    z[idx[(a, b)]] = _count_value(cell, which, report.cap)
            im = ax.imshow(
                z.T,
                origin="lower",
                aspect="auto",
                extent=(min(a_vals), max(a_vals), min(b_vals), max(b_vals)),
                cmap="viridis",
            )
            ax.set_xlabel(ax_a)
            ax.set_ylabel(ax_b)
            ax.set_title(f"max {title} HDVs ({ax_fixed} = {fixed_value:g})")
            fig.colorbar(im, ax=ax)
        path = Path(out_dir) / f"heatmap_{ax_a}_{ax_b}.png"
        fig.savefig(path, dpi=130)
        plt.close(fig)
        paths.append(path)
    return paths


def _series(rows: list[SweepRow], attr: str, cap: int) -> np.ndarray:
    return np.array(
        [np.nan if getattr(r, attr) is None else getattr(r, attr) for r in rows], dtype=float
    )


def render_sweep(rows: list[SweepRow], cap: int, out_dir: Path) -> Path:
    """Counts against disturbance frequency, heterogeneous+delayed vs baseline."""
    w = np.array([r.omega for r in rows])
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.2), constrained_layout=True, sharex=True)
    for ax, attr, base_attr, title in (
        (axes[0], "n_stable", "n_stable_baseline", "stabilizable"),
        (axes[1], "n_safe", "n_safe_baseline", "safety-constrained"),
    ):
        ax.plot(w, _series(rows, attr, cap), label="heterogeneous + delay", lw=1.5)
        ax.plot(w, _series(rows, base_attr, cap), label="homogeneous, no delay", lw=1.5, ls="--")
        ax.set_xscale("log")
        ax.set_xlabel("disturbance frequency (rad/s)")
        ax.set_ylabel(f"max {title} HDVs")
        ax.legend()
    path = Path(out_dir) / "sweep.png"
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def render_trajectory(traj: Trajectory, out_dir: Path) -> Path:
    """Speed and gap time series, one line per vehicle."""
    fig, axes = plt.subplots(2, 1, figsize=(9, 6.5), constrained_layout=True, sharex=True)
    n = traj.n_vehicles
    colors = plt.cm.plasma(np.linspace(0.0, 0.9, n))
    for j in range(n):
        label = "leader" if j == 0 else (f"veh {j}")
        axes[0].plot(traj.times, traj.speed[:, j], color=colors[j], lw=0.9,
                     label=label if j < 8 else None)
        if j > 0:
            axes[1].plot(traj.times, traj.gap[:, j], color=colors[j], lw=0.9)
    axes[0].set_ylabel("speed (m/s)")
    axes[0].legend(ncols=4, fontsize=8)
    axes[1].set_ylabel("gap (m)")
    axes[1].set_xlabel("time (s)")
    if traj.collision is not None:
        axes[0].axvline(traj.collision[0], color="red", ls=":", lw=1.0)
    path = Path(out_dir) / "trajectory.png"
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
