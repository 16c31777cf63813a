"""Vehicle parameter types, the desired-speed curve, and equilibrium references.

All quantities are SI internally (metres, seconds); miles-per-hour values are
converted at the I/O boundary only.  The desired-speed ("optimal velocity")
curve is the tanh shape

    V(gap) = amplitude * (tanh(slope * (gap - offset)) + shift)

whose slope at the equilibrium headway sets the linearized gap gain of a
human driver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MPS_PER_MPH = 0.44704
METERS_PER_MILE = 1609.344


@dataclass(frozen=True)
class OptimalVelocityFn:
    """Tanh-shaped desired-speed curve and its constants.

    Defaults are the Bando motorway calibration with a 5 m vehicle:
    amplitude 16.8 m/s, slope 0.0860 1/m, offset 20 m + vehicle length,
    shift 0.913.
    """

    amplitude: float = 16.8
    slope: float = 0.0860
    offset: float = 25.0
    shift: float = 0.913
    vehicle_length: float = 5.0

    def __post_init__(self):
        if not (self.amplitude > 0 and self.slope > 0 and self.vehicle_length > 0):
            raise ValueError("amplitude, slope and vehicle_length must all be positive")

    @classmethod
    def bando(cls, vehicle_length: float = 5.0, clearance: float = 20.0) -> "OptimalVelocityFn":
        """Standard calibration with the offset rebuilt as clearance + vehicle length."""
        return cls(offset=clearance + vehicle_length, vehicle_length=vehicle_length)

    @property
    def speed_range(self) -> tuple[float, float]:
        """Open interval of speeds the curve can attain over all real gaps."""
        return (self.amplitude * (self.shift - 1.0), self.amplitude * (self.shift + 1.0))


@dataclass(frozen=True)
class HdvParams:
    """One human driver: sensitivity, relative-speed weight, reaction delay and headway policy.

    ``lambda2``/``lambda3`` define the constant-time-headway policy
    ``desired gap = lambda2 * speed + lambda3``.
    """

    alpha: float
    beta: float
    tau: float
    desired_headway: float
    lambda2: float
    lambda3: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if self.beta < 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta!r}")
        if self.tau < 0:
            raise ValueError(f"tau must be nonnegative, got {self.tau!r}")
        if not self.desired_headway > 0:
            raise ValueError(f"desired_headway must be positive, got {self.desired_headway!r}")
        if self.lambda2 < 0:
            raise ValueError(f"lambda2 must be nonnegative, got {self.lambda2!r}")


@dataclass(frozen=True)
class LinearGains:
    """Linearized feedback gains: gap gain k1 (1/s^2), speed gain k2 (1/s), relative-speed gain k3 (1/s)."""

    k1: float
    k2: float
    k3: float

    def __post_init__(self):
        if self.k1 < 0 or self.k2 < 0 or self.k3 < 0:
            raise ValueError("linearized gains must be nonnegative")


@dataclass(frozen=True)
class CavGains:
    """Autonomous-vehicle controller gains and headway policy.

    Negative gains are representable so that the optimizer's feasibility
    check can reject them; use :func:`mixflow.optimizer.feasible` before
    treating a triple as a valid controller.  ``lambda3`` anchors the
    desired gap at a given speed and does not enter the transfer function.
    """

    k1: float
    k2: float
    k3: float
    lambda2: float = 1.125
    lambda3: float = 0.0

    def __post_init__(self):
        if self.lambda2 < 0:
            raise ValueError(f"lambda2 must be nonnegative, got {self.lambda2!r}")

    @property
    def aggregate_gain(self) -> float:
        return self.k2 + self.k3 + self.k1 * self.lambda2


@dataclass(frozen=True)
class PlatoonSpec:
    """Ordered platoon: uncontrolled leader, then (optionally) the CAV, then HDVs.

    ``hdvs`` is ordered nearest-to-CAV first, i.e. in the direction the
    disturbance propagates upstream.  ``cav=None`` describes the reference
    scenario in which the humans follow the leader directly.
    """

    v_star: float
    cav: CavGains | None
    hdvs: tuple[HdvParams, ...]
    headway_min: float = 10.0
    headway_max: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "hdvs", tuple(self.hdvs))
        if not self.v_star > 0:
            raise ValueError(f"v_star must be positive, got {self.v_star!r}")
        if not self.headway_min > 0:
            raise ValueError("headway_min must be positive")
        if not self.headway_max > self.headway_min:
            raise ValueError("headway_max must exceed headway_min")

    @property
    def n_vehicles(self) -> int:
        """Total vehicle count including the leader."""
        return 1 + (0 if self.cav is None else 1) + len(self.hdvs)

    def desired_headways(self) -> np.ndarray:
        """Desired gap of each follower at the equilibrium speed, in platoon order."""
        out = []
        if self.cav is not None:
            out.append(self.cav.lambda2 * self.v_star + self.cav.lambda3)
        out.extend(p.lambda2 * self.v_star + p.lambda3 for p in self.hdvs)
        return np.asarray(out, dtype=float)


def _as_float_array(gap, name: str) -> np.ndarray:
    g = np.asarray(gap, dtype=float)
    if not np.all(np.isfinite(g)):
        raise ValueError(f"{name} must be finite")
    return g


def optimal_velocity(gap, ovf: OptimalVelocityFn):
    """Desired speed for a given bumper-to-bumper-plus-length gap (m/s).

    The raw curve is returned; it is negative for very small gaps, and the
    time-domain simulator is responsible for clamping commanded speeds at
    zero.
    """
    g = _as_float_array(gap, "gap")
    if np.any(g < 0):
        raise ValueError("gap must be nonnegative")
    v = ovf.amplitude * (np.tanh(ovf.slope * (g - ovf.offset)) + ovf.shift)
    return float(v) if np.ndim(gap) == 0 else v


def optimal_velocity_slope(gap, ovf: OptimalVelocityFn):
    """Derivative of the desired-speed curve with respect to the gap (1/s)."""
    g = _as_float_array(gap, "gap")
    t = np.tanh(ovf.slope * (g - ovf.offset))
    dv = ovf.amplitude * ovf.slope * (1.0 - t * t)
    return float(dv) if np.ndim(gap) == 0 else dv


def invert_optimal_velocity(speed: float, ovf: OptimalVelocityFn) -> float:
    """Gap at which the desired-speed curve attains ``speed``.

    Bracketing bisection on [0, 10*offset]; the curve is strictly increasing
    so the root is unique.  Raises ValueError when no nonnegative gap attains
    the speed (the curve's range is an open interval and its value at gap 0
    bounds attainable speeds from below).
    """
    if not math.isfinite(speed):
        raise ValueError("speed must be finite")
    range_lo, range_hi = ovf.speed_range
    # The range is open; near the bounds the inverse gap diverges and double
    # precision cannot tell the supremum from its neighbourhood, so a few-ulp
    # guard band is treated as outside.
    guard = 4 * np.finfo(float).eps * ovf.amplitude
    if not (range_lo + guard < speed < range_hi - guard):
        raise ValueError(
            f"speed {speed!r} m/s is outside the open attainable range "
            f"({range_lo:.6g}, {range_hi:.6g}) m/s"
        )
    lo, hi = 0.0, 10.0 * ovf.offset
    v_lo = optimal_velocity(lo, ovf)
    v_hi = optimal_velocity(hi, ovf)
    if not (v_lo <= speed <= v_hi):
        raise ValueError(
            f"no nonnegative gap attains speed {speed!r} m/s "
            f"(curve spans [{v_lo:.6g}, {v_hi:.6g}] m/s over the bracket)"
        )
    # Bisect to the floating-point limit; the guaranteed tolerance is 1e-10 m
    # but the extra iterations are cheap and make equilibrium initialization
    # exact to machine precision.
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if optimal_velocity(mid, ovf) < speed:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


def linearize_hdv(p: HdvParams, ovf: OptimalVelocityFn) -> LinearGains:
    """Linearized gains of a human driver around its desired headway."""
    return LinearGains(
        k1=p.alpha * optimal_velocity_slope(p.desired_headway, ovf),
        k2=p.alpha,
        k3=p.beta,
    )


def equilibrium_offsets(spec: PlatoonSpec) -> np.ndarray:
    """Initial reference positions: leader at 0, each follower behind by its desired gap."""
    gaps = spec.desired_headways()
    return np.concatenate([[0.0], -np.cumsum(gaps)])


def equilibrium_trajectory(spec: PlatoonSpec, horizon: float, step: float = 1.0):
    """Uniform-flow reference positions for every vehicle.

    Returns ``(times, positions)`` with ``positions[k, j]`` the reference of
    vehicle j at ``times[k]``; every reference moves at the equilibrium speed
    and consecutive references are spaced by the desired headways.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if step <= 0:
        raise ValueError("step must be positive")
    times = np.arange(0.0, horizon + step / 2, step)
    if times.size == 0:
        times = np.array([0.0])
    x0 = equilibrium_offsets(spec)
    return times, x0[None, :] + spec.v_star * times[:, None]
