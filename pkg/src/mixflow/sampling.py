"""Seeded sampling of heterogeneous driver populations, and unit conversion.

Driver parameters are drawn independently from truncated normals with a
single pseudo-random stream per population, so identical (seed, spec) pairs
reproduce element-wise identical populations.  The reaction delay is tied to
the sensitivity through tau = coefficient / alpha: less attentive drivers
react later.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .models import METERS_PER_MILE, MPS_PER_MPH, HdvParams

# tau = 0.01 s at alpha = 0.04 1/s; a coefficient of 0.04 instead gives the
# 1.0 s human perception-reaction scale.
DEFAULT_DELAY_COEFFICIENT = 1.0 / 2500.0

_MAX_CONSECUTIVE_REJECTS = 1000

_UNIT_FACTORS = {
    ("mph", "m/s"): MPS_PER_MPH,
    ("m/s", "mph"): 1.0 / MPS_PER_MPH,
    ("mi", "m"): METERS_PER_MILE,
    ("m", "mi"): 1.0 / METERS_PER_MILE,
}


def unit_convert(value: float, src: str, dst: str) -> float:
    """Convert between the supported unit pairs (mph <-> m/s, mi <-> m)."""
    if src == dst:
        return float(value)
    try:
        return float(value) * _UNIT_FACTORS[(src, dst)]
    except KeyError:
        raise ValueError(f"unsupported unit conversion {src!r} -> {dst!r}") from None


def delay_from_sensitivity(alpha: float, coefficient: float = DEFAULT_DELAY_COEFFICIENT) -> float:
    """Reaction delay tau = coefficient / alpha (inverse proportionality)."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    return coefficient / alpha


@dataclass(frozen=True)
class TruncatedNormal:
    """Normal(mean, sd) restricted to [lo, hi] by rejection."""

    mean: float
    sd: float
    lo: float
    hi: float

    def __post_init__(self):
        if self.sd < 0:
            raise ValueError("sd must be nonnegative")
        if not self.lo < self.hi:
            raise ValueError("empty truncation interval")

    def draw(self, rng: np.random.Generator) -> float:
        for _ in range(_MAX_CONSECUTIVE_REJECTS):
            x = rng.normal(self.mean, self.sd)
            if self.lo <= x <= self.hi:
                return float(x)
        raise ValueError(
            f"degenerate truncation: rejection rate above 99% for "
            f"N({self.mean}, {self.sd}) on [{self.lo}, {self.hi}]"
        )


@dataclass(frozen=True)
class PopulationSpec:
    """Distributional description of a driver population plus the RNG seed."""

    count: int
    alpha: TruncatedNormal = field(
        default_factory=lambda: TruncatedNormal(0.04, 0.004, 0.005, 0.2)
    )
    beta: TruncatedNormal = field(
        default_factory=lambda: TruncatedNormal(0.185, 0.018, 0.0, 0.5)
    )
    desired_headway: TruncatedNormal = field(
        default_factory=lambda: TruncatedNormal(30.125, 3.0, 10.0, 60.0)
    )
    delay_coefficient: float = DEFAULT_DELAY_COEFFICIENT
    lambda2: float = 1.125
    seed: int = 0

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be nonnegative")
        if self.delay_coefficient < 0:
            raise ValueError("delay_coefficient must be nonnegative")


def sample_population(spec: PopulationSpec, v_star: float) -> list[HdvParams]:
    """Draw a population of drivers; the headway-policy intercept is anchored at v_star.

    Each driver's lambda3 is set so its constant-time-headway policy passes
    through the sampled desired headway at the equilibrium speed:
    lambda3 = desired_headway - lambda2 * v_star.
    """
    rng = np.random.default_rng(spec.seed)
    out = []
    for _ in range(spec.count):
        alpha = spec.alpha.draw(rng)
        beta = spec.beta.draw(rng)
        headway = spec.desired_headway.draw(rng)
        out.append(
            HdvParams(
                alpha=alpha,
                beta=beta,
                tau=delay_from_sensitivity(alpha, spec.delay_coefficient),
                desired_headway=headway,
                lambda2=spec.lambda2,
                lambda3=headway - spec.lambda2 * v_star,
            )
        )
    return out


def collapse_to_mean(population, zero_delay: bool = True) -> list[HdvParams]:
    """Homogeneous population at the empirical means of a sampled one.

    The comparison baseline: every driver gets the mean sensitivity,
    relative-speed weight and desired headway; delays are zeroed by default.
    """
    population = list(population)
    if not population:
        return []
    alpha = float(np.mean([p.alpha for p in population]))
    beta = float(np.mean([p.beta for p in population]))
    headway = float(np.mean([p.desired_headway for p in population]))
    lambda2 = float(np.mean([p.lambda2 for p in population]))
    lambda3 = float(np.mean([p.lambda3 for p in population]))
    tau = 0.0 if zero_delay else float(np.mean([p.tau for p in population]))
    proto = HdvParams(
        alpha=alpha, beta=beta, tau=tau,
        desired_headway=headway, lambda2=lambda2, lambda3=lambda3,
    )
    return [proto] * len(population)
