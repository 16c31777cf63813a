"""Exhaustive gain-grid search for the autonomous vehicle's controller.

The objective (both stabilizable counts) is integer-valued and piecewise
constant in the gains, so the search is a deterministic exhaustive grid
rather than anything gradient-based.  Cells are evaluated independently;
an optional thread pool (capped by the MIXFLOW_THREADS environment
variable) splits the cell list, and results are merged back in cell order
so reports are byte-identical across worker counts.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleGridError
from .frequency import HdvFrequencyModel, cav_stability_margin, cav_transfer, hdv_log_magnitudes
from .models import CavGains, HdvParams, OptimalVelocityFn
from .platoon import (
    BandEvaluator,
    SafetyEnvelope,
    StabilizableResult,
    band_grid,
    crossing_counts,
    stability_band,
)
from .sampling import collapse_to_mean


def feasible(g: CavGains) -> bool:
    """Gain triple admissible: nonnegative and attenuating at every frequency."""
    if g.k1 < 0 or g.k2 < 0 or g.k3 < 0:
        return False
    return cav_stability_margin(g) >= 0.0


def resolve_worker_count(requested: int | None = None) -> int:
    """Worker count from the argument or the MIXFLOW_THREADS variable (0 = auto)."""
    if requested is None:
        raw = os.environ.get("MIXFLOW_THREADS", "1")
        try:
            requested = int(raw)
        except ValueError:
            raise ValueError(f"MIXFLOW_THREADS must be an integer, got {raw!r}") from None
    if requested < 0:
        raise ValueError("worker count must be nonnegative")
    if requested == 0:
        requested = os.cpu_count() or 1
    return requested


@dataclass(frozen=True)
class GainAxis:
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.lo < 0:
            raise ValueError("gain axis minimum must be nonnegative")
        if self.hi < self.lo:
            raise ValueError("gain axis maximum must not be below its minimum")
        if self.steps < 2 and self.hi > self.lo:
            raise ValueError("a swept gain axis needs at least 2 steps")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class GainGrid:
    """Axis ranges for the three gains plus the fixed headway-policy slope."""

    k1: GainAxis = field(default_factory=lambda: GainAxis(0.0, 0.5, 21))
    k2: GainAxis = field(default_factory=lambda: GainAxis(0.0, 2.0, 21))
    k3: GainAxis = field(default_factory=lambda: GainAxis(0.0, 2.0, 21))
    lambda2: float = 1.125
    lambda3: float = 0.0

    def cells(self) -> list[CavGains]:
        """All grid cells in ascending (k1, k2, k3) lexicographic order."""
        return [
            CavGains(k1=a, k2=b, k3=c, lambda2=self.lambda2, lambda3=self.lambda3)
            for a in self.k1.values()
            for b in self.k2.values()
            for c in self.k3.values()
        ]


@dataclass(frozen=True)
class CellResult:
    gains: CavGains
    feasible: bool
    stable: StabilizableResult | None = None
    safe: StabilizableResult | None = None

    def score(self, weights: tuple[float, float], cap: int) -> float:
        return weights[0] * self.stable.count(cap) + weights[1] * self.safe.count(cap)


@dataclass(frozen=True)
class OptimizationReport:
    best: CellResult
    cells: list[CellResult]
    weights: tuple[float, float]
    cap: int
    eta: float
    infeasible_count: int

    @property
    def argmax_set(self) -> list[CellResult]:
        """All feasible cells whose scalarized objective ties the best."""
        target = self.best.score(self.weights, self.cap)
        return [c for c in self.cells if c.feasible and c.score(self.weights, self.cap) == target]

    def measured_gain_ratio(self) -> float:
        """k2 / (eta * k3) at the selected optimum; nan when k3 is zero.

        Recorded for comparison against the reported optimal-gain relation,
        never asserted.
        """
        g = self.best.gains
        if g.k3 == 0.0:
            return float("nan")
        return g.k2 / (self.eta * g.k3)

    def pareto_front(self) -> list[CellResult]:
        """Feasible cells not dominated in (stable count, safe count)."""
        feas = [c for c in self.cells if c.feasible]
        pts = [(c.stable.count(self.cap), c.safe.count(self.cap), i) for i, c in enumerate(feas)]
        front = []
        for ns, nf, i in pts:
            dominated = any(
                (os_ >= ns and of >= nf) and (os_ > ns or of > nf) for os_, of, _ in pts
            )
            if not dominated:
                front.append(feas[i])
        return front

    def heatmap_slices(self):
        """Three 2-D slices through the best cell, one per gain pair.

        Yields (axis_a, axis_b, fixed_axis, fixed_value, rows) with rows of
        (value_a, value_b, cell).
        """
        best = self.best.gains
        by_key = {(c.gains.k1, c.gains.k2, c.gains.k3): c for c in self.cells}
        k1v = sorted({c.gains.k1 for c in self.cells})
        k2v = sorted({c.gains.k2 for c in self.cells})
        k3v = sorted({c.gains.k3 for c in self.cells})
        plans = [
            ("k1", "k2", "k3", best.k3, k1v, k2v, lambda a, b: (a, b, best.k3)),
            ("k1", "k3", "k2", best.k2, k1v, k3v, lambda a, b: (a, best.k2, b)),
            ("k2", "k3", "k1", best.k1, k2v, k3v, lambda a, b: (best.k1, a, b)),
        ]
        for ax_a, ax_b, ax_fixed, fixed_value, values_a, values_b, key in plans:
            rows = [(a, b, by_key[key(a, b)]) for a in values_a for b in values_b]
            yield ax_a, ax_b, ax_fixed, fixed_value, rows


def grid_search(
    grid: GainGrid,
    models,
    env: SafetyEnvelope,
    band=None,
    points: int = 512,
    weights: tuple[float, float] = (0.5, 0.5),
    full_band: bool = False,
    refine: bool = True,
    workers: int | None = None,
) -> OptimizationReport:
    """Evaluate both counts at every feasible cell and return the argmax.

    Ties are broken toward smaller k1, then k2, then k3, which the ascending
    cell order realizes by keeping the first best.  Unbounded counts enter
    the scalarized objective as population size + 1.
    """
    models = list(models)
    evaluator = BandEvaluator(models, band=band, points=points, full_band=full_band, refine=refine)
    cells = grid.cells()
    cap = len(models)

    flags = [feasible(g) for g in cells]
    if not any(flags):
        n_negative = sum(1 for g in cells if g.k1 < 0 or g.k2 < 0 or g.k3 < 0)
        raise InfeasibleGridError(n_negative, len(cells) - n_negative)

    def evaluate(idx: int) -> CellResult:
        g = cells[idx]
        if not flags[idx]:
            return CellResult(g, False)
        return CellResult(g, True, evaluator.stable_count(g), evaluator.safe_count(g, env))

    n_workers = resolve_worker_count(workers)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(evaluate, range(len(cells)), chunksize=64))
    else:
        results = [evaluate(i) for i in range(len(cells))]

    best = None
    for cell in results:
        if not cell.feasible:
            continue
        if best is None or cell.score(weights, cap) > best.score(weights, cap):
            best = cell
    return OptimizationReport(
        best=best,
        cells=results,
        weights=weights,
        cap=cap,
        eta=env.eta,
        infeasible_count=sum(1 for c in results if not c.feasible),
    )


@dataclass(frozen=True)
class SweepRow:
    omega: float
    n_stable: int | None
    n_safe: int | None
    n_stable_baseline: int | None
    n_safe_baseline: int | None


def frequency_sweep(
    cav: CavGains,
    population: list[HdvParams],
    ovf: OptimalVelocityFn,
    env: SafetyEnvelope,
    points: int = 512,
    omegas: np.ndarray | None = None,
) -> list[SweepRow]:
    """Per-frequency counts (before the outer minimization) with a comparison series.

    The comparison series re-runs the same counts for the homogeneous
    zero-delay population at the empirical parameter means.  None entries
    mean "unbounded at this frequency relative to the population size".
    """
    if not feasible(cav):
        raise ValueError("frequency_sweep requires a feasible gain triple")
    population = list(population)
    het = [HdvFrequencyModel.from_params(p, ovf) for p in population]
    base = [HdvFrequencyModel.from_params(p, ovf) for p in collapse_to_mean(population)]
    if omegas is None:
        hi = max(stability_band(het)[1], stability_band(base)[1])
        omegas = band_grid((hi / 1000.0, hi), points)

    omegas = np.asarray(omegas, dtype=float)
    t = cav_transfer(omegas, cav)
    series = []
    for models in (het, base):
        tail = hdv_log_magnitudes(models, omegas)
        cap = len(models)
        with np.errstate(divide="ignore"):
            stable = crossing_counts(np.log(np.abs(t)), tail, 0.0)
            safe = crossing_counts(np.log(np.abs(1.0 - t)), tail, float(np.log(env.eta)))
        series.append(
            (
                [None if v > cap else int(v) for v in stable],
                [None if v > cap else int(v) for v in safe],
            )
        )
    return [
        SweepRow(
            omega=float(w),
            n_stable=series[0][0][i],
            n_safe=series[0][1][i],
            n_stable_baseline=series[1][0][i],
            n_safe_baseline=series[1][1][i],
        )
        for i, w in enumerate(omegas)
    ]
