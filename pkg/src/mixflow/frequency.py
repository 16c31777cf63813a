"""Frequency-domain transfer functions and vehicular string-stability conditions.

Two independent evaluation routes are kept on purpose: direct complex
arithmetic on the transfer functions, and the closed-form magnitude-squared
expressions.  They must agree to 1e-10 relative error and the test suite
enforces that; analysis code uses whichever is cheaper.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SingularFrequencyError
from .models import CavGains, HdvParams, LinearGains, OptimalVelocityFn, linearize_hdv

# A vanishing delayed denominator signals a characteristic root on the
# imaginary axis; it is reported, never replaced.
_SINGULAR = 1e-300

STABLE_ALL = "stable_all_frequencies"
UNSTABLE_BELOW = "unstable_below_critical"
UNSTABLE_ALL = "unstable_all_frequencies"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class HdvFrequencyModel:
    """Linearized human-driver model as seen in the frequency domain."""

    gains: LinearGains
    lambda2: float
    tau: float

    @property
    def aggregate_gain(self) -> float:
        """Combined first-order feedback K = k2 + k3 + k1*lambda2."""
        return self.gains.k2 + self.gains.k3 + self.gains.k1 * self.lambda2

    @classmethod
    def from_params(cls, p: HdvParams, ovf: OptimalVelocityFn) -> "HdvFrequencyModel":
        return cls(gains=linearize_hdv(p, ovf), lambda2=p.lambda2, tau=p.tau)


@dataclass(frozen=True)
class StabilityVerdict:
    """Sufficient-condition verdict for one vehicle.

    ``unstable_below_critical`` carries the critical frequency above which
    disturbance attenuation is guaranteed; behaviour below it is not asserted
    and must be probed numerically.
    """

    kind: str
    critical_frequency: float | None = None

    @property
    def stable_everywhere(self) -> bool:
        return self.kind == STABLE_ALL


def _check_omega(omega) -> np.ndarray:
    w = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("omega must be finite")
    if np.any(w < 0):
        raise ValueError("omega must be nonnegative")
    return w


def check_grid(lo: float = 1e-4, hi: float = 1e2, points: int = 2048) -> np.ndarray:
    """Default logarithmic frequency grid for numerical magnitude checks."""
    return np.geomspace(lo, hi, points)


def hdv_transfer(omega, m: HdvFrequencyModel):
    """Delayed position-deviation transfer function of one human driver at s = j*omega."""
    w = _check_omega(omega)
    k1, k3 = m.gains.k1, m.gains.k3
    K = m.aggregate_gain
    lag = np.exp(-1j * w * m.tau)
    num = (k1 + 1j * w * k3) * lag
    den = -(w * w) + (1j * w * K + k1) * lag
    bad = np.abs(den) < _SINGULAR
    if np.any(bad):
        raise SingularFrequencyError(np.atleast_1d(w)[np.atleast_1d(bad)][0])
    t = num / den
    return complex(t) if np.ndim(omega) == 0 else t


def hdv_gain_sq(omega, m: HdvFrequencyModel):
    """Closed-form squared magnitude of the human-driver transfer function."""
    w = _check_omega(omega)
    k1, k3 = m.gains.k1, m.gains.k3
    K = m.aggregate_gain
    f = -2.0 * w**3 * K * np.sin(w * m.tau) - 2.0 * w**2 * k1 * np.cos(w * m.tau)
    num = k1 * k1 + w * w * k3 * k3
    den = w * w * K * K + w**4 + k1 * k1 + f
    bad = np.abs(den) < _SINGULAR
    if np.any(bad):
        raise SingularFrequencyError(np.atleast_1d(w)[np.atleast_1d(bad)][0])
    g = num / den
    return float(g) if np.ndim(omega) == 0 else g


def cav_transfer(omega, g: CavGains):
    """Undelayed transfer function of the autonomous vehicle at s = j*omega.

    With zero gap gain the function degenerates to a first-order lag; its
    zero-frequency value is then defined by the continuous limit
    k3 / (k2 + k3) and marked in report metadata by callers.
    """
    w = _check_omega(omega)
    k1, k3 = g.k1, g.k3
    K = g.aggregate_gain
    if k1 == 0.0:
        # Reduced first-order form is exact for all omega and finite at 0.
        den = 1j * w + K
        if k3 == 0.0:
            t = np.zeros_like(w, dtype=complex)
        else:
            bad = np.abs(den) < _SINGULAR
            if np.any(bad):
                raise SingularFrequencyError(np.atleast_1d(w)[np.atleast_1d(bad)][0])
            t = k3 / den
    else:
        num = k1 + 1j * w * k3
        den = (k1 - w * w) + 1j * w * K
        bad = np.abs(den) < _SINGULAR
        if np.any(bad):
            raise SingularFrequencyError(np.atleast_1d(w)[np.atleast_1d(bad)][0])
        t = num / den
    return complex(t) if np.ndim(omega) == 0 else t


def cav_gain_sq(omega, g: CavGains):
    """Closed-form squared magnitude of the autonomous vehicle's transfer function."""
    w = _check_omega(omega)
    k1, k3 = g.k1, g.k3
    K = g.aggregate_gain
    num = k1 * k1 + w * w * k3 * k3
    den = (k1 - w * w) ** 2 + w * w * K * K
    if k1 == 0.0:
        # Remove the common w**2 factor so omega = 0 stays finite.
        num = np.broadcast_to(np.asarray(k3 * k3, dtype=float), w.shape).copy()
        den = w * w + K * K
        if k3 == 0.0:
            out = np.zeros_like(w)
            return float(out) if np.ndim(omega) == 0 else out
    bad = np.abs(den) < _SINGULAR
    if np.any(bad):
        raise SingularFrequencyError(np.atleast_1d(w)[np.atleast_1d(bad)][0])
    s = num / den
    return float(s) if np.ndim(omega) == 0 else s


def cav_stability_margin(g: CavGains) -> float:
    """Left-hand side of the all-frequency attenuation condition for the CAV.

    Nonnegative exactly when sup over omega of the transfer magnitude is at
    most one.
    """
    k1, k2, k3, l2 = g.k1, g.k2, g.k3, g.lambda2
    return (
        k2 * k2
        + k1 * k1 * l2 * l2
        + 2.0 * k2 * k3
        + 2.0 * k1 * k2 * l2
        + 2.0 * k1 * k3 * l2
        - 2.0 * k1
    )


def cav_string_stable(g: CavGains) -> bool:
    """True when the CAV attenuates disturbances at every frequency."""
    if g.k1 < 0 or g.k2 < 0 or g.k3 < 0:
        raise ValueError("cav_string_stable requires nonnegative gains")
    return cav_stability_margin(g) >= 0.0


def hdv_stability_excess(m: HdvFrequencyModel) -> float:
    """Attenuation-condition excess k3^2 + 2*k1 - K^2.

    Nonpositive means the sufficient condition certifies every frequency;
    with zero delay and zero policy slope it reduces exactly to the classic
    no-delay threshold 2*k1 - k2^2 - 2*k2*k3.
    """
    K = m.aggregate_gain
    return m.gains.k3**2 + 2.0 * m.gains.k1 - K * K


def hdv_stability_verdict(m: HdvFrequencyModel) -> StabilityVerdict:
    """Sufficient-condition classification of one human driver.

    - Delay at least 1/(2K): no frequency can be certified and small
      perturbations are amplified; ``unstable_all_frequencies``.
    - Otherwise, if the stability excess is nonpositive the sufficient
      condition holds for every frequency; ``stable_all_frequencies``.
    - Otherwise attenuation is guaranteed only above the critical frequency
      sqrt(excess / (1 - 2*K*tau)).
    """
    K = m.aggregate_gain
    if K <= 0:
        return StabilityVerdict(INCONCLUSIVE)
    if m.tau >= 1.0 / (2.0 * K):
        return StabilityVerdict(UNSTABLE_ALL)
    excess = hdv_stability_excess(m)
    if excess <= 0.0:
        return StabilityVerdict(STABLE_ALL)
    omega0 = float(np.sqrt(excess / (1.0 - 2.0 * K * m.tau)))
    return StabilityVerdict(UNSTABLE_BELOW, critical_frequency=omega0)


def platoon_critical_frequency(models) -> float:
    """Smallest per-vehicle critical frequency across a platoon.

    Vehicles without a finite critical frequency (certified stable everywhere,
    or uncertifiable at any frequency) are excluded with a warning.
    """
    models = list(models)
    if not models:
        raise ValueError("platoon_critical_frequency needs at least one model")
    finite = []
    skipped = 0
    for m in models:
        v = hdv_stability_verdict(m)
        if v.kind == UNSTABLE_BELOW:
            finite.append(v.critical_frequency)
        else:
            skipped += 1
    if skipped:
        warnings.warn(
            f"{skipped} of {len(models)} vehicles have no finite critical frequency "
            "and were excluded",
            stacklevel=2,
        )
    if not finite:
        raise ValueError("no unstable band: no vehicle has a finite critical frequency")
    return min(finite)


def hdv_log_magnitudes(models, omegas: np.ndarray) -> np.ndarray:
    """Log transfer magnitudes, one row per vehicle, one column per frequency."""
    w = _check_omega(omegas)
    k1 = np.array([m.gains.k1 for m in models])[:, None]
    k3 = np.array([m.gains.k3 for m in models])[:, None]
    K = np.array([m.aggregate_gain for m in models])[:, None]
    tau = np.array([m.tau for m in models])[:, None]
    f = -2.0 * w**3 * K * np.sin(w * tau) - 2.0 * w**2 * k1 * np.cos(w * tau)
    num = k1 * k1 + w * w * k3 * k3
    den = w * w * K * K + w**4 + k1 * k1 + f
    bad = np.abs(den) < _SINGULAR
    if np.any(bad):
        raise SingularFrequencyError(np.broadcast_to(w, den.shape)[bad][0])
    return 0.5 * np.log(num / den)
