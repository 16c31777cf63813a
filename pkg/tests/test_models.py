"""Desired-speed curve, inversion, linearization and equilibrium references."""

import math

import numpy as np
import pytest

from mixflow.models import (
    CavGains,
    HdvParams,
    OptimalVelocityFn,
    PlatoonSpec,
    equilibrium_offsets,
    equilibrium_trajectory,
    invert_optimal_velocity,
    linearize_hdv,
    optimal_velocity,
    optimal_velocity_slope,
)
from mixflow.simulate import hdv_accel_nonlinear

V_STAR = 13.4112


class TestOptimalVelocity:
    def test_midpoint(self, ovf):
        # tanh(0) = 0 at gap = offset
        assert optimal_velocity(25.0, ovf) == pytest.approx(16.8 * 0.913, abs=1e-12)

    def test_saturation(self, ovf):
        assert optimal_velocity(1e6, ovf) == pytest.approx(16.8 * 1.913, abs=1e-9)

    def test_zero_gap(self, ovf):
        # frozen from a 40-digit evaluation of the curve at gap 0
        assert optimal_velocity(0.0, ovf) == pytest.approx(-1.0117995609904635, abs=1e-12)

    def test_rejects_nonfinite_and_negative(self, ovf):
        with pytest.raises(ValueError):
            optimal_velocity(float("nan"), ovf)
        with pytest.raises(ValueError):
            optimal_velocity(-1.0, ovf)

    def test_strictly_increasing_on_grid(self, ovf):
        gaps = np.linspace(0.0, 200.0, 1000)
        v = optimal_velocity(gaps, ovf)
        assert np.all(np.diff(v) > 0)


class TestSlope:
    def test_peak_value(self, ovf):
        assert optimal_velocity_slope(25.0, ovf) == pytest.approx(1.4448, abs=1e-12)

    def test_paper_headway(self, ovf):
        # frozen from direct evaluation; spec quotes ~1.1969
        assert optimal_velocity_slope(30.125, ovf) == pytest.approx(1.1968488348673311, abs=1e-12)

    def test_vanishes_at_extremes(self, ovf):
        assert optimal_velocity_slope(1e5, ovf) == pytest.approx(0.0, abs=1e-12)

    def test_matches_finite_differences(self, ovf):
        rng = np.random.default_rng(7)
        gaps = rng.uniform(5.0, 100.0, 100)
        # step large enough that roundoff in the difference stays below the
        # 1e-6 relative budget even where the slope decays to ~1e-5
        h = 1e-3
        fd = (optimal_velocity(gaps + h, ovf) - optimal_velocity(gaps - h, ovf)) / (2 * h)
        an = optimal_velocity_slope(gaps, ovf)
        assert np.max(np.abs(fd - an) / np.abs(an)) < 1e-6

    def test_matches_finite_difference_at_paper_headway(self, ovf):
        h = 1e-4
        fd = (optimal_velocity(30.125 + h, ovf) - optimal_velocity(30.125 - h, ovf)) / (2 * h)
        assert abs(fd - optimal_velocity_slope(30.125, ovf)) <= 1e-6


class TestInversion:
    def test_midpoint_round_trip(self, ovf):
        assert invert_optimal_velocity(16.8 * 0.913, ovf) == pytest.approx(25.0, abs=1e-9)

    def test_supremum_not_attained(self, ovf):
        with pytest.raises(ValueError):
            invert_optimal_velocity(32.1384, ovf)

    def test_thirty_mph(self, ovf):
        # frozen from the closed-form atanh inverse
        g = invert_optimal_velocity(13.4112, ovf)
        assert g == pytest.approx(23.660215283984571, abs=1e-9)
        assert optimal_velocity(g, ovf) == pytest.approx(13.4112, abs=1e-9)

    def test_round_trip_sweep(self, ovf):
        for speed in np.linspace(0.5, 31.0, 23):
            g = invert_optimal_velocity(speed, ovf)
            assert abs(optimal_velocity(g, ovf) - speed) <= 1e-9

    def test_below_range(self, ovf):
        with pytest.raises(ValueError):
            invert_optimal_velocity(-2.0, ovf)


class TestLinearize:
    def test_paper_constants(self, ovf):
        p = HdvParams(alpha=0.04, beta=0.185, tau=0.0, desired_headway=25.0, lambda2=1.125)
        g = linearize_hdv(p, ovf)
        assert g.k1 == pytest.approx(0.057792, abs=1e-12)
        assert g.k2 == 0.04
        assert g.k3 == 0.185

    def test_zero_alpha_rejected(self):
        with pytest.raises(ValueError):
            HdvParams(alpha=0.0, beta=0.1, tau=0.0, desired_headway=25.0, lambda2=1.125)

    def test_pure_gap_feedback_limit(self, ovf):
        p = HdvParams(alpha=0.05, beta=0.0, tau=0.1, desired_headway=28.0, lambda2=1.125)
        assert linearize_hdv(p, ovf).k3 == 0.0

    def test_matches_definition_on_random_params(self, ovf):
        rng = np.random.default_rng(11)
        for _ in range(100):
            p = HdvParams(
                alpha=rng.uniform(0.01, 0.2),
                beta=rng.uniform(0.0, 0.5),
                tau=rng.uniform(0.0, 2.0),
                desired_headway=rng.uniform(10.0, 60.0),
                lambda2=rng.uniform(0.0, 3.0),
            )
            g = linearize_hdv(p, ovf)
            assert g.k1 == p.alpha * optimal_velocity_slope(p.desired_headway, ovf)
            assert g.k2 == p.alpha
            assert g.k3 == p.beta


def _two_vehicle_spec(lambda3=0.0):
    hdv = HdvParams(
        alpha=0.04, beta=0.185, tau=0.0, desired_headway=1.125 * V_STAR + lambda3,
        lambda2=1.125, lambda3=lambda3,
    )
    return PlatoonSpec(v_star=V_STAR, cav=None, hdvs=(hdv,))


class TestEquilibriumTrajectory:
    def test_constant_time_headway_spacing(self):
        spec = _two_vehicle_spec()
        times, pos = equilibrium_trajectory(spec, horizon=10.0, step=1.0)
        assert pos.shape == (11, 2)
        np.testing.assert_allclose(pos[:, 0] - pos[:, 1], 15.0876, atol=1e-9)
        np.testing.assert_allclose(np.diff(pos[:, 0]), V_STAR, atol=1e-12)

    def test_zero_horizon(self):
        times, pos = equilibrium_trajectory(_two_vehicle_spec(), horizon=0.0)
        assert times.shape == (1,)
        assert pos[0, 0] == 0.0

    def test_homogeneous_platoon_equal_gaps(self):
        hdv = HdvParams(alpha=0.04, beta=0.185, tau=0.0, desired_headway=30.0,
                        lambda2=1.125, lambda3=30.0 - 1.125 * V_STAR)
        spec = PlatoonSpec(v_star=V_STAR, cav=None, hdvs=(hdv, hdv, hdv))
        offs = equilibrium_offsets(spec)
        gaps = offs[:-1] - offs[1:]
        np.testing.assert_allclose(gaps, 30.0, atol=1e-12)

    def test_nonlinear_fixed_point(self, ovf):
        # plugging the equilibrium state into the car-following law is quiescent
        gap = invert_optimal_velocity(V_STAR, ovf)
        p = HdvParams(alpha=0.04, beta=0.185, tau=0.0, desired_headway=30.125, lambda2=1.125)
        a = hdv_accel_nonlinear(gap, V_STAR, 0.0, p, ovf)
        assert abs(a) <= 1e-12


class TestTypes:
    def test_ovf_invariants(self):
        with pytest.raises(ValueError):
            OptimalVelocityFn(amplitude=-1.0)
        with pytest.raises(ValueError):
            OptimalVelocityFn(slope=0.0)

    def test_bando_offset(self):
        assert OptimalVelocityFn.bando(vehicle_length=5.0).offset == 25.0

    def test_platoon_spec_invariants(self):
        with pytest.raises(ValueError):
            PlatoonSpec(v_star=-1.0, cav=None, hdvs=(_two_vehicle_spec().hdvs[0],))
        with pytest.raises(ValueError):
            PlatoonSpec(v_star=10.0, cav=None, hdvs=(_two_vehicle_spec().hdvs[0],),
                        headway_min=50.0, headway_max=40.0)

    def test_cav_gains_allow_negative_for_feasibility_checks(self):
        # negative gains must be representable so the optimizer can reject them
        g = CavGains(k1=-0.1, k2=1.0, k3=1.0)
        assert g.k1 == -0.1
