"""Head-to-tail platoon stability and maximum stabilizable-vehicle counts.

The count searches read the product conditions in sign-change form: at a
fixed frequency, the platoon of n humans behind the autonomous vehicle is
counted stabilizable when the cumulative log-magnitude through vehicle n is
at or below the threshold while the (n+1)-th partial sum exceeds it.  The
reported count is the minimum over the probed frequency band.

All accumulation happens in log space; overflow-prone direct products are
reserved for the independent oracle in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frequency import cav_transfer, hdv_log_magnitudes, hdv_stability_verdict, UNSTABLE_BELOW
from .models import CavGains

_REFINE_POINTS = 65


@dataclass(frozen=True)
class SafetyEnvelope:
    """Headway band, disturbance size and their ratio eta.

    ``eta`` is the tightest allowable headway deviation divided by the
    disturbance magnitude; build it with :meth:`from_headway_band` so the
    deviation margin is taken against the platoon's mean desired headway.
    """

    headway_min: float
    headway_max: float
    disturbance: float
    eta: float

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta!r}")
        if not self.headway_max > self.headway_min:
            raise ValueError("headway_max must exceed headway_min")

    @classmethod
    def from_headway_band(
        cls,
        headway_min: float,
        headway_max: float,
        disturbance: float,
        mean_desired_headway: float,
    ) -> "SafetyEnvelope":
        if not disturbance > 0:
            raise ValueError("disturbance must be positive")
        margin = min(mean_desired_headway - headway_min, headway_max - mean_desired_headway)
        if margin <= 0:
            raise ValueError(
                f"mean desired headway {mean_desired_headway!r} m leaves no margin inside "
                f"[{headway_min!r}, {headway_max!r}] m"
            )
        return cls(headway_min, headway_max, disturbance, margin / disturbance)


@dataclass(frozen=True)
class StabilizableResult:
    """Outcome of a maximum-count search.

    ``n_star`` is None when no crossing occurs up to the population size,
    i.e. the count is unbounded relative to the given population.
    ``log_margin`` is the cumulative log-sum at ``n_star`` minus the
    threshold (nonpositive by construction).  ``nonbinding_omegas`` counts
    grid points whose head term was -inf (a vanishing |1 - T_A|) and which
    therefore can never bind.
    """

    n_star: int | None
    binding_omega: float | None
    log_margin: float | None
    nonbinding_omegas: int = 0

    @property
    def unbounded(self) -> bool:
        return self.n_star is None

    def count(self, cap: int) -> int:
        """Integer for ordering: unbounded maps to cap + 1 so it beats any finite count."""
        return cap + 1 if self.n_star is None else self.n_star


def head_to_tail_gain(omega, cav: CavGains, models):
    """|T_A| times the product of the human transfer magnitudes, via summed logs."""
    w = np.asarray(omega, dtype=float)
    with np.errstate(divide="ignore"):
        head = np.log(np.abs(cav_transfer(w, cav)))
    models = list(models)
    if models:
        head = head + hdv_log_magnitudes(models, np.atleast_1d(w)).sum(axis=0).reshape(w.shape)
    out = np.exp(head)
    return float(out) if np.ndim(omega) == 0 else out


def stability_band(models, full_band: bool = False) -> tuple[float, float]:
    """Frequency band searched by the count minimization.

    Default: up to the smallest per-vehicle critical frequency (the band the
    head-to-tail analysis assumes).  ``full_band=True`` extends to the
    largest per-vehicle critical frequency, beyond which every vehicle is
    certified to attenuate and no frequency can bind.
    """
    crit = [
        v.critical_frequency
        for v in (hdv_stability_verdict(m) for m in models)
        if v.kind == UNSTABLE_BELOW
    ]
    if not crit:
        raise ValueError("no unstable band: no vehicle has a finite critical frequency")
    hi = max(crit) if full_band else min(crit)
    return hi / 1000.0, hi


def band_grid(band: tuple[float, float], points: int = 512) -> np.ndarray:
    lo, hi = band
    if not (0 < lo < hi):
        raise ValueError(f"invalid frequency band {band!r}")
    return np.geomspace(lo, hi, points)


def crossing_counts(head_logs: np.ndarray, tail_logs: np.ndarray, threshold: float = 0.0) -> np.ndarray:
    """Per-frequency stabilizable counts from log-magnitude arrays.

    ``head_logs`` has one entry per frequency; ``tail_logs`` one row per
    vehicle.  Returns, per frequency, the largest n whose cumulative sum is
    at or below the threshold while the (n+1)-th exceeds it; ``N + 1`` marks
    "no crossing up to the population size" (unbounded), and a head term
    already above the threshold with no later crossing yields 0.
    """
    head = np.atleast_1d(np.asarray(head_logs, dtype=float))
    tail = np.asarray(tail_logs, dtype=float)
    if tail.ndim != 2 or tail.shape[1] != head.shape[0]:
        raise ValueError("tail_logs must be (n_vehicles, n_frequencies)")
    n = tail.shape[0]
    cum = np.vstack([head[None, :], head[None, :] + np.cumsum(tail, axis=0)])
    below = cum <= threshold
    mask = below[:-1] & ~below[1:]
    any_cross = mask.any(axis=0)
    last = (n - 1) - np.argmax(mask[::-1, :], axis=0)
    counts = np.where(any_cross, last, n + 1)
    counts = np.where(~any_cross & (cum[0] > threshold), 0, counts)
    return counts


class BandEvaluator:
    """Caches per-vehicle log magnitudes on a frequency grid for repeated gain queries.

    The gain grid search asks the same population thousands of questions;
    the human-driver side of the product never changes, so it is computed
    once.  Instances are read-only after construction and safe to share
    across worker threads.
    """

    def __init__(self, models, band=None, points: int = 512, full_band: bool = False, refine: bool = True):
        self.models = list(models)
        if not self.models:
            raise ValueError("empty population")
        if band is None:
            band = stability_band(self.models, full_band=full_band)
        self.band = band
        self.omegas = band_grid(band, points)
        self.tail_logs = hdv_log_magnitudes(self.models, self.omegas)
        self.refine = refine

    # -- internals ---------------------------------------------------------

    def _head_logs(self, cav: CavGains, omegas, safe: bool) -> np.ndarray:
        t = cav_transfer(omegas, cav)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(1.0 - t)) if safe else np.log(np.abs(t))

    def _search(self, cav: CavGains, threshold: float, safe: bool) -> StabilizableResult:
        head = self._head_logs(cav, self.omegas, safe)
        nonbinding = int(np.sum(np.isneginf(head)))
        counts = crossing_counts(head, self.tail_logs, threshold)
        result = self._summarize(counts, head, self.tail_logs, self.omegas, threshold, nonbinding)
        if not self.refine or result.n_star is None:
            return result
        refined = self._refine_once(cav, threshold, safe, counts, nonbinding)
        return refined if refined is not None and refined.n_star < result.n_star else result

    def _refine_once(self, cav, threshold, safe, counts, nonbinding):
        """One local refinement pass around the coarse argmin frequency."""
        j = int(np.argmin(counts))
        lo = self.omegas[max(j - 1, 0)]
        hi = self.omegas[min(j + 1, len(self.omegas) - 1)]
        if not lo < hi:
            return None
        local = np.geomspace(lo, hi, _REFINE_POINTS)
        tail = hdv_log_magnitudes(self.models, local)
        head = self._head_logs(cav, local, safe)
        local_counts = crossing_counts(head, tail, threshold)
        return self._summarize(local_counts, head, tail, local, threshold, nonbinding)

    @staticmethod
    def _summarize(counts, head, tail, omegas, threshold, nonbinding) -> StabilizableResult:
        n_pop = tail.shape[0]
        j = int(np.argmin(counts))
        n = int(counts[j])
        if n > n_pop:
            return StabilizableResult(None, None, None, nonbinding)
        sums = np.concatenate([[head[j]], head[j] + np.cumsum(tail[:, j])])
        return StabilizableResult(
            n_star=n,
            binding_omega=float(omegas[j]),
            log_margin=float(sums[n] - threshold),
            nonbinding_omegas=nonbinding,
        )

    # -- public queries ----------------------------------------------------

    def stable_count(self, cav: CavGains) -> StabilizableResult:
        return self._search(cav, threshold=0.0, safe=False)

    def safe_count(self, cav: CavGains, env: SafetyEnvelope) -> StabilizableResult:
        return self._search(cav, threshold=float(np.log(env.eta)), safe=True)


def max_stabilizable(
    cav: CavGains,
    models,
    band=None,
    points: int = 512,
    refine: bool = True,
    full_band: bool = False,
) -> StabilizableResult:
    """Maximum number of humans the autonomous vehicle keeps head-to-tail attenuating."""
    ev = BandEvaluator(models, band=band, points=points, full_band=full_band, refine=refine)
    return ev.stable_count(cav)


def max_safe_stabilizable(
    cav: CavGains,
    models,
    env: SafetyEnvelope,
    band=None,
    points: int = 512,
    refine: bool = True,
    full_band: bool = False,
) -> StabilizableResult:
    """Maximum count under the headway-deviation budget of the safety envelope."""
    ev = BandEvaluator(models, band=band, points=points, full_band=full_band, refine=refine)
    return ev.safe_count(cav, env)


def overall_objective(
    cav: CavGains,
    models,
    env: SafetyEnvelope,
    band=None,
    points: int = 512,
    refine: bool = True,
    full_band: bool = False,
) -> tuple[StabilizableResult, StabilizableResult]:
    """Both counts (plain and safety-constrained) for one controller setting."""
    ev = BandEvaluator(models, band=band, points=points, full_band=full_band, refine=refine)
    return ev.stable_count(cav), ev.safe_count(cav, env)
