"""Deterministic CSV/JSON emission with atomic writes.

Every float is printed with 17 significant digits, rows are emitted in a
fixed order, and files are written to a temporary sibling then renamed, so
identical inputs produce byte-identical outputs and failures never leave a
partial file behind.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .optimizer import OptimizationReport, SweepRow
from .simulate import SafetyReport, Trajectory

UNBOUNDED = "unbounded"

HEATMAP_HEADER = "k_a,k_b,n_stable,n_safe,feasible"
SWEEP_HEADER = "omega,n_stable,n_safe,n_stable_baseline,n_safe_baseline"
TRAJECTORY_HEADER = "t,vehicle,x,v,a,gap"
POPULATION_HEADER = "vehicle,alpha,beta,tau,desired_headway,lambda2,lambda3"


def fmt(x) -> str:
    """17-significant-digit text for floats; plain text for ints and strings."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def atomic_write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    return path


def write_csv(path: Path, header: str, rows) -> Path:
    lines = [header]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return atomic_write_text(path, "\n".join(lines) + "\n")


def write_json(path: Path, payload: dict) -> Path:
    return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def count_text(n: int | None) -> str:
    return UNBOUNDED if n is None else str(n)


def result_payload(res) -> dict:
    return {
        "n": None if res.n_star is None else int(res.n_star),
        "unbounded": res.n_star is None,
        "binding_omega": res.binding_omega,
        "log_margin": res.log_margin,
        "nonbinding_omegas": res.nonbinding_omegas,
    }


def emit_manifest(out_dir: Path, seed: int, config_hash: str, command: str) -> Path:
    return write_json(
        Path(out_dir) / "manifest.json",
        {"seed": seed, "config_hash": config_hash, "tool_version": __version__, "command": command},
    )


def emit_population(population, out_dir: Path) -> Path:
    rows = [
        [i, p.alpha, p.beta, p.tau, p.desired_headway, p.lambda2, p.lambda3]
        for i, p in enumerate(population)
    ]
    return write_csv(Path(out_dir) / "population.csv", POPULATION_HEADER, rows)


def emit_heatmaps(report: OptimizationReport, out_dir: Path) -> list[Path]:
    paths = []
    for ax_a, ax_b, _fixed_axis, _fixed_value, rows in report.heatmap_slices():
        out = []
        for a, b, cell in rows:
            if cell.feasible:
                out.append(
                    [a, b, count_text(cell.stable.n_star), count_text(cell.safe.n_star), True]
                )
            else:
                out.append([a, b, "", "", False])
        paths.append(write_csv(Path(out_dir) / f"heatmap_{ax_a}_{ax_b}.csv", HEATMAP_HEADER, out))
    return paths


def emit_optimization_report(report: OptimizationReport, out_dir: Path) -> Path:
    def cell_payload(cell):
        return {
            "k1": cell.gains.k1,
            "k2": cell.gains.k2,
            "k3": cell.gains.k3,
            "stable": result_payload(cell.stable),
            "safe": result_payload(cell.safe),
        }

    ratio = report.measured_gain_ratio()
    payload = {
        "best": cell_payload(report.best),
        "best_score": report.best.score(report.weights, report.cap),
        "argmax_set": [
            {"k1": c.gains.k1, "k2": c.gains.k2, "k3": c.gains.k3} for c in report.argmax_set
        ],
        "pareto_front": [cell_payload(c) for c in report.pareto_front()],
        "weights": {"stable": report.weights[0], "safe": report.weights[1]},
        "population_cap": report.cap,
        "eta": report.eta,
        "infeasible_count": report.infeasible_count,
        "lambda2": report.best.gains.lambda2,
        # measured at the selected optimum, reported but never asserted
        "k2_over_eta_k3": None if math.isnan(ratio) else ratio,
    }
    return write_json(Path(out_dir) / "optimization_report.json", payload)


def emit_sweep(rows: list[SweepRow], out_dir: Path) -> Path:
    table = [
        [
            r.omega,
            count_text(r.n_stable),
            count_text(r.n_safe),
            count_text(r.n_stable_baseline),
            count_text(r.n_safe_baseline),
        ]
        for r in rows
    ]
    return write_csv(Path(out_dir) / "sweep.csv", SWEEP_HEADER, table)


def emit_trajectory(traj: Trajectory, out_dir: Path) -> Path:
    rows = []
    for i, t in enumerate(traj.times):
        for j in range(traj.n_vehicles):
            rows.append(
                [t, j, traj.position[i, j], traj.speed[i, j], traj.accel[i, j], traj.gap[i, j]]
            )
    return write_csv(Path(out_dir) / "trajectory.csv", TRAJECTORY_HEADER, rows)


def emit_safety_report(report: SafetyReport, out_dir: Path) -> Path:
    def listify(a):
        return [None if (isinstance(x, float) and math.isnan(x)) else float(x) for x in a]

    payload = {
        "ttc_threshold": report.ttc_threshold,
        # null marks the leader (no predecessor); "inf" a gap that never closes
        "min_ttc": [
            None if math.isnan(x) else ("inf" if math.isinf(x) else float(x))
            for x in report.min_ttc
        ],
        "tet": listify(report.tet),
        "tit": listify(report.tit),
        "headway_violations": [int(x) for x in report.headway_violations],
        "collision": None
        if report.collision is None
        else {"time": report.collision[0], "vehicle": report.collision[1]},
    }
    return write_json(Path(out_dir) / "safety_report.json", payload)


def emit_stability_report(payload: dict, out_dir: Path) -> Path:
    return write_json(Path(out_dir) / "stability_report.json", payload)
