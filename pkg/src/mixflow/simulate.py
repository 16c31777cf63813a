"""Fixed-step time-domain integration of the platoon's delay differential equations.

The integrator is Heun's method (explicit trapezoidal) with a fixed step;
delayed states are read from the stored step history by linear interpolation,
which keeps delay lookups reproducible and consistent with the scheme's
second-order accuracy.  The leader is kinematically prescribed (equilibrium
speed plus an injected perturbation), never controlled.

Sign conventions: every controller error term is oriented as
(predecessor - self) with positive gains, the negative-feedback direction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SimulationFault
from .models import (
    CavGains,
    HdvParams,
    OptimalVelocityFn,
    PlatoonSpec,
    invert_optimal_velocity,
    linearize_hdv,
)
from .platoon import SafetyEnvelope

CONTROLLER_KINDS = ("cav", "acc", "cacc", "multi_pred")


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration settings.

    ``record_every`` thins the stored trajectory (None records every step);
    integration always runs at ``step``.  ``collision_margin`` is the gap at
    or below which a collision is declared; None uses the vehicle length.
    History before t=0 is the equilibrium and delay lookups interpolate
    linearly.
    """

    step: float = 0.01
    horizon: float = 100.0
    record_every: float | None = None
    collision_margin: float | None = None

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.record_every is not None and self.record_every < self.step:
            raise ValueError("record_every must be at least the integration step")


@dataclass(frozen=True)
class Perturbation:
    """Leader disturbance: none, a speed sinusoid, or a brake pulse.

    The brake pulse applies ``decel`` for ``duration`` seconds starting at
    ``start``, then recovers at the opposite rate back to the equilibrium
    speed, so the disturbance is transient.
    """

    kind: str = "none"
    amplitude: float = 0.0
    omega: float = 0.0
    decel: float = 0.0
    duration: float = 0.0
    start: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "sinusoid", "brake_pulse"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.kind == "sinusoid":
            if self.amplitude < 0:
                raise ValueError("amplitude must be nonnegative")
            if not self.omega > 0:
                raise ValueError("sinusoid needs a positive omega")
        if self.kind == "brake_pulse":
            if not self.decel < 0:
                raise ValueError("brake pulse decel must be negative")
            if not self.duration > 0:
                raise ValueError("brake pulse needs a positive duration")
            if self.start < 0:
                raise ValueError("brake pulse start must be nonnegative")

    @classmethod
    def none(cls) -> "Perturbation":
        return cls()

    @classmethod
    def sinusoid(cls, amplitude: float, omega: float) -> "Perturbation":
        return cls(kind="sinusoid", amplitude=amplitude, omega=omega)

    @classmethod
    def brake_pulse(cls, decel: float, duration: float, start: float) -> "Perturbation":
        return cls(kind="brake_pulse", decel=decel, duration=duration, start=start)

    # Leader kinematics are closed-form so delayed lookups of the leader are
    # exact rather than interpolated.

    def leader_speed(self, t, v_star: float):
        t = np.asarray(t, dtype=float)
        if self.kind == "sinusoid":
            v = v_star + self.amplitude * np.sin(self.omega * t)
        elif self.kind == "brake_pulse":
            t1 = self.start
            t2 = t1 + self.duration
            t3 = t2 + self.duration
            down = np.clip(t, t1, t2) - t1
            up = np.clip(t, t2, t3) - t2
            v = v_star + self.decel * down - self.decel * up
        else:
            v = np.broadcast_to(np.asarray(v_star, dtype=float), t.shape).copy()
        return float(v) if np.ndim(t) == 0 else v

    def leader_position(self, t, v_star: float, x0: float = 0.0):
        t = np.asarray(t, dtype=float)
        if self.kind == "sinusoid":
            x = x0 + v_star * t + self.amplitude * (1.0 - np.cos(self.omega * t)) / self.omega
        elif self.kind == "brake_pulse":
            t1 = self.start
            t2 = t1 + self.duration
            t3 = t2 + self.duration
            down = np.clip(t, t1, t2) - t1
            up = np.clip(t, t2, t3) - t2
            after2 = np.clip(t - t2, 0.0, None)
            after3 = np.clip(t - t3, 0.0, None)
            x = (
                x0
                + v_star * t
                + self.decel * (0.5 * down * down + self.duration * after2 - 0.5 * up * up)
                - self.decel * self.duration * after3
            )
        else:
            x = x0 + v_star * t
        return float(x) if np.ndim(t) == 0 else x

    def leader_accel(self, t, v_star: float):
        t = np.asarray(t, dtype=float)
        if self.kind == "sinusoid":
            a = self.amplitude * self.omega * np.cos(self.omega * t)
        elif self.kind == "brake_pulse":
            t1 = self.start
            t2 = t1 + self.duration
            t3 = t2 + self.duration
            a = np.where((t >= t1) & (t < t2), self.decel, 0.0) + np.where(
                (t >= t2) & (t < t3), -self.decel, 0.0
            )
        else:
            a = np.zeros_like(t)
        return float(a) if np.ndim(t) == 0 else a

    def min_leader_speed(self, v_star: float) -> float:
        if self.kind == "sinusoid":
            return v_star - self.amplitude
        if self.kind == "brake_pulse":
            return v_star + self.decel * self.duration
        return v_star

    def period(self) -> float | None:
        return 2.0 * math.pi / self.omega if self.kind == "sinusoid" else None


@dataclass(frozen=True)
class ReferenceControllerParams:
    """Gains, headway policy and acceleration limits for the reference controllers."""

    kv: float = 0.6
    kp: float = 0.2
    ka: float = 0.3
    lambda1: float = 0.0
    lambda2: float = 1.125
    lambda3: float = 0.0
    a_min: float = -6.0
    a_max: float = 3.0
    window: int = 2

    def __post_init__(self):
        if not self.a_min < 0 <= self.a_max:
            raise ValueError("need a_min < 0 <= a_max")
        if self.window < 2:
            raise ValueError("multi-predecessor window must be at least 2")


@dataclass
class Trajectory:
    """Recorded platoon state: one column per vehicle, leader first.

    ``gap[:, j]`` is the raw spacing to the predecessor (NaN for the
    leader).  ``collision`` is (time, vehicle) when the run was truncated.
    """

    times: np.ndarray
    position: np.ndarray
    speed: np.ndarray
    accel: np.ndarray
    gap: np.ndarray
    vehicle_length: float
    model: str
    controller: str
    collision: tuple[float, int] | None = None

    @property
    def n_vehicles(self) -> int:
        return self.position.shape[1]


@dataclass
class SafetyReport:
    """Surrogate safety measures per vehicle (leader entries are NaN/0)."""

    min_ttc: np.ndarray
    tet: np.ndarray
    tit: np.ndarray
    headway_violations: np.ndarray
    ttc_threshold: float
    collision: tuple[float, int] | None = None


def hdv_accel_nonlinear(gap, speed, speed_diff, p: HdvParams, ovf: OptimalVelocityFn):
    """Human-driver acceleration from delayed gap, own speed and speed difference.

    The caller supplies the state already evaluated at t - tau.  The
    commanded desired speed is clamped at zero so tiny gaps never command
    reversing.
    """
    g = np.asarray(gap, dtype=float)
    v_cmd = ovf.amplitude * (np.tanh(ovf.slope * (g - ovf.offset)) + ovf.shift)
    v_cmd = np.maximum(v_cmd, 0.0)
    a = p.alpha * (v_cmd - np.asarray(speed, dtype=float)) + p.beta * np.asarray(speed_diff, dtype=float)
    return float(a) if np.ndim(gap) == 0 else a


def hdv_accel_linear(dev_pos_pred, dev_pos_self, dev_vel_pred, dev_vel_self, gains, lambda2: float):
    """Linearized human-driver acceleration on delayed deviation coordinates."""
    return (
        gains.k1 * (dev_pos_pred - dev_pos_self - lambda2 * dev_vel_self)
        - gains.k2 * dev_vel_self
        + gains.k3 * (dev_vel_pred - dev_vel_self)
    )


def cav_accel(gap, speed, speed_diff, g: CavGains, v_star: float):
    """Undelayed autonomous-vehicle acceleration in absolute coordinates.

    Negative-feedback form: gap error against the speed-dependent desired
    headway, speed error against the equilibrium speed, plus relative speed.
    """
    desired = g.lambda2 * np.asarray(speed, dtype=float) + g.lambda3
    return g.k1 * (np.asarray(gap, dtype=float) - desired) - g.k2 * (
        np.asarray(speed, dtype=float) - v_star
    ) + g.k3 * np.asarray(speed_diff, dtype=float)


def reference_controller_accel(
    kind: str,
    gap: float,
    speed: float,
    pred_speed: float,
    pred_accel: float,
    params: ReferenceControllerParams,
    upstream_speed_diffs=(),
) -> float:
    """Error-based cruise controllers: plain, with predecessor-acceleration
    feedforward, or with multi-predecessor anticipation.

    ``upstream_speed_diffs`` holds (predecessor-of-k minus k) speed
    differences for the anticipation window, already oriented as negative
    feedback; the caller truncates it to the vehicles that exist.  Output is
    clamped to the configured acceleration limits.
    """
    if kind not in ("acc", "cacc", "multi_pred"):
        raise ValueError(f"unknown reference controller kind {kind!r}")
    desired = (
        params.lambda1 * (speed * speed - pred_speed * pred_speed)
        + params.lambda2 * speed
        + params.lambda3
    )
    a = params.kv * (pred_speed - speed) + params.kp * (gap - desired)
    if kind == "cacc":
        a += params.ka * pred_accel
    elif kind == "multi_pred":
        diffs = list(upstream_speed_diffs)
        if diffs:
            a += params.kv / (params.window - 1) * float(np.sum(diffs))
    return float(np.clip(a, params.a_min, params.a_max))


class _Platoon:
    """Resolved per-follower arrays used by the stepping loop."""

    def __init__(self, spec: PlatoonSpec, ovf: OptimalVelocityFn, model: str):
        self.has_cav = spec.cav is not None
        self.hdvs = list(spec.hdvs)
        n_h = len(self.hdvs)
        offset = 1 if self.has_cav else 0
        self.n_followers = n_h + offset
        if self.n_followers == 0:
            raise ValueError("platoon needs at least one follower")

        self.h_slice = slice(offset, self.n_followers)
        self.alpha = np.array([p.alpha for p in self.hdvs])
        self.beta = np.array([p.beta for p in self.hdvs])
        self.tau = np.concatenate([[0.0] * offset, [p.tau for p in self.hdvs]])
        gains = [linearize_hdv(p, ovf) for p in self.hdvs]
        self.k1 = np.array([g.k1 for g in gains])
        self.k2 = np.array([g.k2 for g in gains])
        self.k3 = np.array([g.k3 for g in gains])
        self.lambda2 = np.array([p.lambda2 for p in self.hdvs])

        # Equilibrium spacing differs by model: the nonlinear car-following
        # law is at rest where the desired-speed curve meets v*, the linear
        # one where the deviation coordinates vanish.
        if model == "nonlinear":
            gap_h = invert_optimal_velocity(spec.v_star, ovf)
            gaps = [spec.cav.lambda2 * spec.v_star + spec.cav.lambda3] if self.has_cav else []
            gaps.extend([gap_h] * n_h)
        else:
            gaps = list(spec.desired_headways())
        self.eq_gaps = np.asarray(gaps, dtype=float)
        self.x0 = -np.cumsum(self.eq_gaps)  # leader starts at 0
        self.ref0 = -np.cumsum(spec.desired_headways())


def _interp_history(X, V, idx, cols):
    i0 = np.floor(idx).astype(int)
    w = idx - i0
    x = X[i0, cols] * (1.0 - w) + X[i0 + 1, cols] * w
    v = V[i0, cols] * (1.0 - w) + V[i0 + 1, cols] * w
    return x, v


def simulate(
    spec: PlatoonSpec,
    ovf: OptimalVelocityFn,
    pert: Perturbation,
    cfg: IntegratorConfig,
    model: str = "nonlinear",
    controller: str = "cav",
    ref_params: ReferenceControllerParams | None = None,
) -> Trajectory:
    """Integrate the platoon and return its recorded trajectory.

    ``model`` selects the nonlinear car-following law or its linearization
    around the uniform-flow equilibrium.  ``controller`` picks the CAV's
    law; the reference controllers require the nonlinear model.  The run is
    truncated (not failed) when a gap closes to the collision margin.
    """
    if model not in ("nonlinear", "linear"):
        raise ValueError(f"unknown model {model!r}")
    if controller not in CONTROLLER_KINDS:
        raise ValueError(f"unknown controller {controller!r}")
    if controller != "cav" and model != "nonlinear":
        raise ValueError("reference controllers are only defined for the nonlinear model")
    if controller != "cav" and ref_params is None:
        ref_params = ReferenceControllerParams()

    plat = _Platoon(spec, ovf, model)
    dt = cfg.step
    v_star = spec.v_star

    pos_tau = plat.tau[plat.tau > 0]
    if pos_tau.size and dt > pos_tau.min() / 4.0 + 1e-15:
        raise ValueError(
            f"step {dt} s cannot resolve the smallest delay {pos_tau.min():.6g} s; "
            "use step <= delay/4"
        )
    period = pert.period()
    if period is not None and cfg.horizon < 10.0 * period:
        raise ValueError("horizon must cover at least 10 perturbation periods")
    if pert.min_leader_speed(v_star) < 0:
        raise ValueError("perturbation would drive the leader speed below zero")
    if spec.headway_min < ovf.vehicle_length:
        raise ValueError("headway_min must be at least the vehicle length")

    n_steps = int(round(cfg.horizon / dt))
    n_f = plat.n_followers
    n_veh = n_f + 1
    margin = cfg.collision_margin if cfg.collision_margin is not None else ovf.vehicle_length

    if controller == "multi_pred" and ref_params.window > 2:
        warnings.warn(
            "multi-predecessor window exceeds the vehicles ahead of the CAV; truncated",
            stacklevel=2,
        )

    # Full-resolution state history (leader in column 0) for delay lookups.
    X = np.empty((n_steps + 1, n_veh))
    V = np.empty((n_steps + 1, n_veh))
    X[0, 0] = 0.0
    X[0, 1:] = plat.x0
    V[0, :] = v_star

    stride = 1 if cfg.record_every is None else max(1, int(round(cfg.record_every / dt)))
    rec_rows: list[int] = []

    cols = np.arange(1, n_veh)
    ref0_lead = 0.0

    # Static platoon topology, hoisted out of the per-step closure.
    h_cols = cols[plat.h_slice]
    tau_h = plat.tau[plat.h_slice]
    max_tau = float(tau_h.max()) if tau_h.size else 0.0
    pred_cols = h_cols - 1
    lead_pred = pred_cols == 0
    follow_pred = ~lead_pred
    zero_tau = tau_h == 0.0
    pos_tau_mask = ~zero_tau
    has_zero_tau = bool(zero_tau.any())
    fp_zero_static = zero_tau & follow_pred
    fp_hist_static = pos_tau_mask & follow_pred
    has_lead_pred = bool(lead_pred.any())
    has_fp_zero = bool(fp_zero_static.any())
    has_fp_hist = bool(fp_hist_static.any())
    ref_pred0 = np.where(lead_pred, ref0_lead, plat.ref0[np.maximum(pred_cols - 1, 0)])
    ref_self0 = plat.ref0[h_cols - 1]
    nonlinear = model == "nonlinear"

    def follower_accels(t, x_stage, v_stage):
        """Stage accelerations; delayed lookups only ever hit committed history rows
        because the step is at most a quarter of the smallest positive delay."""
        a = np.empty(n_f)
        # Delayed state per HDV follower; the CAV (if present) is undelayed.
        tq = t - tau_h
        self_x = np.empty(n_f - (1 if plat.has_cav else 0))
        self_v = np.empty_like(self_x)
        pred_x = np.empty_like(self_x)
        pred_v = np.empty_like(self_x)

        warmup = t < max_tau
        if warmup:
            past = tq < 0
            zero = zero_tau & ~past
            hist = pos_tau_mask & ~past
            if past.any():
                # Equilibrium history extension for t <= 0.
                self_x[past] = X[0, h_cols[past]] + v_star * tq[past]
                self_v[past] = v_star
            fp_past = past & follow_pred
            if fp_past.any():
                pred_x[fp_past] = X[0, pred_cols[fp_past]] + v_star * tq[fp_past]
                pred_v[fp_past] = v_star
            fp_zero = zero & follow_pred
            fp_hist = hist & follow_pred
        else:
            zero, hist = zero_tau, pos_tau_mask
            fp_zero, fp_hist = fp_zero_static, fp_hist_static

        if has_zero_tau and zero.any():
            zc = h_cols[zero] - 1
            self_x[zero] = x_stage[zc]
            self_v[zero] = v_stage[zc]
        if hist.any():
            sx, sv = _interp_history(X, V, tq[hist] / dt, h_cols[hist])
            self_x[hist] = sx
            self_v[hist] = sv

        if has_lead_pred:
            pred_x[lead_pred] = pert.leader_position(tq[lead_pred], v_star)
            pred_v[lead_pred] = pert.leader_speed(tq[lead_pred], v_star)
        if has_fp_zero and fp_zero.any():
            zc = pred_cols[fp_zero] - 1
            pred_x[fp_zero] = x_stage[zc]
            pred_v[fp_zero] = v_stage[zc]
        if has_fp_hist and fp_hist.any():
            px, pv = _interp_history(X, V, tq[fp_hist] / dt, pred_cols[fp_hist])
            pred_x[fp_hist] = px
            pred_v[fp_hist] = pv

        if nonlinear:
            gap_d = pred_x - self_x
            v_cmd = np.maximum(
                ovf.amplitude * (np.tanh(ovf.slope * (gap_d - ovf.offset)) + ovf.shift), 0.0
            )
            a[plat.h_slice] = plat.alpha * (v_cmd - self_v) + plat.beta * (pred_v - self_v)
        else:
            # Deviation coordinates relative to the uniform-flow references.
            ref_pred = ref_pred0 + v_star * tq
            ref_self = ref_self0 + v_star * tq
            a[plat.h_slice] = (
                plat.k1 * ((pred_x - ref_pred) - (self_x - ref_self) - plat.lambda2 * (self_v - v_star))
                - plat.k2 * (self_v - v_star)
                + plat.k3 * ((pred_v - v_star) - (self_v - v_star))
            )

        if plat.has_cav:
            lead_x = pert.leader_position(t, v_star)
            lead_v = pert.leader_speed(t, v_star)
            x_c, v_c = x_stage[0], v_stage[0]
            if controller == "cav":
                if model == "nonlinear":
                    a[0] = cav_accel(lead_x - x_c, v_c, lead_v - v_c, spec.cav, v_star)
                else:
                    g = spec.cav
                    dev_p = lead_x - (ref0_lead + v_star * t)
                    dev_s = x_c - (plat.ref0[0] + v_star * t)
                    a[0] = (
                        g.k1 * (dev_p - dev_s - g.lambda2 * (v_c - v_star))
                        - g.k2 * (v_c - v_star)
                        + g.k3 * ((lead_v - v_star) - (v_c - v_star))
                    )
            else:
                a[0] = reference_controller_accel(
                    controller,
                    gap=lead_x - x_c,
                    speed=v_c,
                    pred_speed=lead_v,
                    pred_accel=pert.leader_accel(t, v_star),
                    params=ref_params,
                    upstream_speed_diffs=(),  # nothing ahead of the leader
                )
        return a

    collision = None
    last_row = n_steps
    accel_at: dict[int, np.ndarray] = {}

    for k in range(n_steps):
        t = k * dt
        x_now = X[k, 1:]
        v_now = V[k, 1:]
        a1 = follower_accels(t, x_now, v_now)
        if k % stride == 0:
            rec_rows.append(k)
            accel_at[k] = a1.copy()

        x_pred = x_now + dt * v_now
        v_pred = v_now + dt * a1
        if model == "nonlinear":
            v_pred = np.maximum(v_pred, 0.0)
        a2 = follower_accels(t + dt, x_pred, v_pred)

        X[k + 1, 1:] = x_now + 0.5 * dt * (v_now + v_pred)
        v_next = v_now + 0.5 * dt * (a1 + a2)
        if model == "nonlinear":
            v_next = np.maximum(v_next, 0.0)
        V[k + 1, 1:] = v_next
        X[k + 1, 0] = pert.leader_position(t + dt, v_star)
        V[k + 1, 0] = pert.leader_speed(t + dt, v_star)

        row = X[k + 1]
        if not (np.all(np.isfinite(row)) and np.all(np.isfinite(V[k + 1]))):
            bad = int(np.argmax(~(np.isfinite(row) & np.isfinite(V[k + 1]))))
            raise SimulationFault(t + dt, bad)
        gaps = row[:-1] - row[1:]
        if np.any(gaps <= margin):
            veh = int(np.argmax(gaps <= margin)) + 1
            collision = (t + dt, veh)
            last_row = k + 1
            break

    rec_rows = [r for r in rec_rows if r < last_row]
    rec_rows.append(last_row)

    times = np.array([r * dt for r in rec_rows])
    pos = X[rec_rows]
    spd = V[rec_rows]
    acc = np.zeros((len(rec_rows), n_veh))
    acc[:, 0] = pert.leader_accel(times, v_star)
    for i, r in enumerate(rec_rows):
        if r in accel_at:
            acc[i, 1:] = accel_at[r]
        else:
            acc[i, 1:] = follower_accels(r * dt, X[r, 1:], V[r, 1:])
    gap = np.full((len(rec_rows), n_veh), np.nan)
    gap[:, 1:] = pos[:, :-1] - pos[:, 1:]

    return Trajectory(
        times=times,
        position=pos,
        speed=spd,
        accel=acc,
        gap=gap,
        vehicle_length=ovf.vehicle_length,
        model=model,
        controller=controller,
        collision=collision,
    )


def safety_metrics(
    traj: Trajectory, ttc_threshold: float, env: SafetyEnvelope
) -> SafetyReport:
    """Time-to-collision exposure metrics and headway-band violations.

    TTC uses the collidable distance (gap minus vehicle length) over the
    closing speed, infinite when the gap is opening; exposure integrates the
    recorded sampling grid.
    """
    if not ttc_threshold > 0:
        raise ValueError("ttc_threshold must be positive")
    n_veh = traj.n_vehicles
    closing = traj.speed[:, 1:] - traj.speed[:, :-1]
    dist = traj.gap[:, 1:] - traj.vehicle_length
    with np.errstate(divide="ignore", invalid="ignore"):
        ttc = np.where(closing > 0, dist / closing, np.inf)
    ttc = np.where(dist <= 0, 0.0, ttc)

    if traj.times.size > 1:
        dt = float(traj.times[1] - traj.times[0])
    else:
        dt = 0.0
    viol = ttc < ttc_threshold
    tet = viol.sum(axis=0) * dt
    tit = np.where(viol, ttc_threshold - ttc, 0.0).sum(axis=0) * dt
    min_ttc = ttc.min(axis=0) if ttc.size else np.array([])

    out_of_band = (traj.gap[:, 1:] < env.headway_min) | (traj.gap[:, 1:] > env.headway_max)
    head_viol = out_of_band.sum(axis=0)

    pad = lambda a, fill: np.concatenate([[fill], a])
    return SafetyReport(
        min_ttc=pad(min_ttc, np.nan),
        tet=pad(tet, 0.0),
        tit=pad(tit, 0.0),
        headway_violations=pad(head_viol, 0).astype(int),
        ttc_threshold=float(ttc_threshold),
        collision=traj.collision,
    )


def steady_state_gain(traj: Trajectory, omega: float, window_fraction: float = 0.2) -> np.ndarray:
    """Measured vehicle-to-vehicle amplitude ratios at the forcing frequency.

    Projects the recorded speeds onto exp(-i*omega*t) over the trailing
    window, trimmed to whole periods; entry j is the amplitude of vehicle
    j+1 relative to vehicle j.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    period = 2.0 * math.pi / omega
    total = float(traj.times[-1] - traj.times[0])
    n_periods = int(window_fraction * total / period)
    if n_periods < 1:
        raise ValueError("window does not cover a full forcing period")
    window = n_periods * period
    mask = traj.times >= traj.times[-1] - window
    t = traj.times[mask]
    v = traj.speed[mask] - traj.speed[mask].mean(axis=0, keepdims=True)
    phase = np.exp(-1j * omega * t)
    proj = np.abs(phase @ v)
    with np.errstate(divide="ignore", invalid="ignore"):
        return proj[1:] / proj[:-1]
