"""Batch command-line interface.

Subcommands: ``analyze`` (verdicts and stabilizable counts), ``optimize``
(gain-grid search with heatmap tables), ``sweep`` (per-frequency counts
against the homogeneous no-delay baseline), ``simulate`` (time-domain run
with surrogate safety metrics) and ``sample`` (population draw).  Exit
codes: 0 success, 2 configuration error, 1 runtime fault.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, load_config
from .errors import ConfigError
from .frequency import HdvFrequencyModel, cav_string_stable, cav_transfer, hdv_stability_verdict
from .models import PlatoonSpec
from .optimizer import feasible, frequency_sweep, grid_search
from .platoon import BandEvaluator, stability_band
from .sampling import sample_population
from .simulate import ReferenceControllerParams, safety_metrics, simulate
from . import reporting
from .reporting import (
    emit_heatmaps,
    emit_manifest,
    emit_optimization_report,
    emit_population,
    emit_safety_report,
    emit_stability_report,
    emit_sweep,
    emit_trajectory,
)


class _Context:
    """Everything the subcommands need, assembled once from the config."""

    def __init__(self, cfg: ExperimentConfig, out_dir: str | None):
        self.cfg = cfg
        self.out_dir = Path(out_dir if out_dir is not None else cfg.output_dir)
        self.v_star = cfg.v_star_mps()
        self.ovf = cfg.ovf()
        self.population = sample_population(cfg.population_spec(), self.v_star)
        if not self.population:
            raise ConfigError("population.count: at least one vehicle is required")
        self.mean_headway = float(np.mean([p.desired_headway for p in self.population]))
        self.cav = cfg.cav_gains(self.mean_headway)
        self.env = cfg.safety.envelope(self.mean_headway)
        self.models = [HdvFrequencyModel.from_params(p, self.ovf) for p in self.population]

    def evaluator(self) -> BandEvaluator:
        band = self.cfg.frequency_band
        return BandEvaluator(
            self.models, points=band.points, full_band=band.full_band, refine=band.refine
        )

    def manifest(self, command: str):
        emit_manifest(self.out_dir, self.cfg.seed, self.cfg.canonical_hash(), command)


def _cmd_sample(ctx: _Context, args) -> int:
    emit_population(ctx.population, ctx.out_dir)
    ctx.manifest("sample")
    print(f"sampled {len(ctx.population)} drivers -> {ctx.out_dir / 'population.csv'}")
    return 0


def _cmd_analyze(ctx: _Context, args) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ev = ctx.evaluator()
        stable = ev.stable_count(ctx.cav)
        safe = ev.safe_count(ctx.cav, ctx.env)

    verdicts = [hdv_stability_verdict(m) for m in ctx.models]
    vehicles = [
        {
            "index": i,
            "alpha": p.alpha,
            "beta": p.beta,
            "tau": p.tau,
            "desired_headway": p.desired_headway,
            "k1": m.gains.k1,
            "k2": m.gains.k2,
            "k3": m.gains.k3,
            "aggregate_gain": m.aggregate_gain,
            "verdict": v.kind,
            "critical_frequency": v.critical_frequency,
        }
        for i, (p, m, v) in enumerate(zip(ctx.population, ctx.models, verdicts))
    ]
    dc = abs(cav_transfer(0.0, ctx.cav))
    payload = {
        "scenario": ctx.cfg.scenario,
        "seed": ctx.cfg.seed,
        "equilibrium_speed_mps": ctx.v_star,
        "eta": ctx.env.eta,
        "band": {"low": ev.band[0], "high": ev.band[1], "points": len(ev.omegas)},
        "cav": {
            "k1": ctx.cav.k1,
            "k2": ctx.cav.k2,
            "k3": ctx.cav.k3,
            "lambda2": ctx.cav.lambda2,
            "lambda3": ctx.cav.lambda3,
            "string_stable": cav_string_stable(ctx.cav),
            "dc_gain": dc,
            "dc_gain_is_limit": ctx.cav.k1 == 0.0,
        },
        "population_mean_headway": ctx.mean_headway,
        "n_stable": reporting.result_payload(stable),
        "n_safe": reporting.result_payload(safe),
        "excluded_vehicle_warnings": [str(w.message) for w in caught],
        "vehicles": vehicles,
    }
    emit_stability_report(payload, ctx.out_dir)
    ctx.manifest("analyze")
    print(
        f"n_stable={reporting.count_text(stable.n_star)} "
        f"n_safe={reporting.count_text(safe.n_star)} -> {ctx.out_dir / 'stability_report.json'}"
    )
    return 0


def _cmd_optimize(ctx: _Context, args) -> int:
    band = ctx.cfg.frequency_band
    report = grid_search(
        ctx.cfg.gain_grid.grid(ctx.cav.lambda2, ctx.cav.lambda3),
        ctx.models,
        ctx.env,
        points=band.points,
        weights=(ctx.cfg.objective_weights.stable, ctx.cfg.objective_weights.safe),
        full_band=band.full_band,
        refine=band.refine,
        workers=args.threads,
    )
    emit_heatmaps(report, ctx.out_dir)
    emit_optimization_report(report, ctx.out_dir)
    if args.figures:
        from .plots import render_heatmaps

        render_heatmaps(report, ctx.out_dir)
    ctx.manifest("optimize")
    b = report.best.gains
    print(
        f"best gains k1={b.k1:g} k2={b.k2:g} k3={b.k3:g} "
        f"(stable={reporting.count_text(report.best.stable.n_star)}, "
        f"safe={reporting.count_text(report.best.safe.n_star)}, "
        f"{report.infeasible_count} infeasible cells)"
    )
    return 0


def _cmd_sweep(ctx: _Context, args) -> int:
    if not feasible(ctx.cav):
        raise ConfigError("cav: gains violate the string-stability constraint")
    rows = frequency_sweep(
        ctx.cav, ctx.population, ctx.ovf, ctx.env, points=ctx.cfg.frequency_band.points
    )
    emit_sweep(rows, ctx.out_dir)
    if args.figures:
        from .plots import render_sweep

        render_sweep(rows, len(ctx.population), ctx.out_dir)
    ctx.manifest("sweep")
    print(f"swept {len(rows)} frequencies -> {ctx.out_dir / 'sweep.csv'}")
    return 0


def _cmd_simulate(ctx: _Context, args) -> int:
    sim = ctx.cfg.simulation
    hdvs = ctx.population[: sim.hdv_count]
    if len(hdvs) < sim.hdv_count:
        raise ConfigError("simulation.hdv_count: exceeds the sampled population size")
    spec = PlatoonSpec(
        v_star=ctx.v_star,
        cav=ctx.cav,
        hdvs=tuple(hdvs),
        headway_min=ctx.cfg.safety.headway_min,
        headway_max=ctx.cfg.safety.headway_max,
    )
    ref = ReferenceControllerParams(
        lambda2=ctx.cav.lambda2,
        lambda3=ctx.cav.lambda3,
        a_min=sim.a_min,
        a_max=sim.a_max,
    )
    traj = simulate(
        spec,
        ctx.ovf,
        ctx.cfg.perturbation.build(),
        ctx.cfg.integrator.build(),
        model=sim.model,
        controller=sim.controller,
        ref_params=ref,
    )
    report = safety_metrics(traj, ctx.cfg.safety.ttc_threshold, ctx.env)
    emit_trajectory(traj, ctx.out_dir)
    emit_safety_report(report, ctx.out_dir)
    if args.figures:
        from .plots import render_trajectory

        render_trajectory(traj, ctx.out_dir)
    ctx.manifest("simulate")
    status = "collision" if traj.collision else "completed"
    print(f"simulation {status}, {traj.times.size} samples -> {ctx.out_dir / 'trajectory.csv'}")
    return 0


_COMMANDS = {
    "analyze": _cmd_analyze,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "sample": _cmd_sample,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixflow",
        description="Mixed-platoon string stability analysis, gain optimization and simulation.",
    )
    parser.add_argument("--version", action="version", version=f"mixflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("analyze", "per-vehicle verdicts and stabilizable counts at the configured gains"),
        ("optimize", "exhaustive gain-grid search with heatmap tables"),
        ("sweep", "per-frequency counts with the homogeneous no-delay baseline"),
        ("simulate", "time-domain run with surrogate safety metrics"),
        ("sample", "draw and export the driver population"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="config file path or bundled preset name")
        p.add_argument("--out", default=None, help="output directory (overrides the config)")
        p.add_argument(
            "--no-figures",
            dest="figures",
            action="store_false",
            help="skip PNG rendering, emit only delimited output",
        )
        if name == "optimize":
            p.add_argument(
                "--threads",
                type=int,
                default=None,
                help="worker threads (default: MIXFLOW_THREADS, 0 = auto)",
            )
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not hasattr(args, "threads"):
        args.threads = None
    try:
        cfg = load_config(args.config)
        ctx = _Context(cfg, args.out)
        return _COMMANDS[args.command](ctx, args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
