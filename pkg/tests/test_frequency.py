"""Transfer functions, closed-form magnitudes and stability verdicts."""

import math
import warnings

import numpy as np
import pytest

from conftest import random_cav_gains, random_hdv_params
from mixflow.errors import SingularFrequencyError
from mixflow.frequency import (
    STABLE_ALL,
    UNSTABLE_ALL,
    UNSTABLE_BELOW,
    HdvFrequencyModel,
    cav_gain_sq,
    cav_stability_margin,
    cav_string_stable,
    cav_transfer,
    check_grid,
    hdv_gain_sq,
    hdv_log_magnitudes,
    hdv_stability_verdict,
    hdv_transfer,
    platoon_critical_frequency,
)
from mixflow.models import CavGains, LinearGains


def model(k1, k2, k3, lam2=1.125, tau=0.0):
    return HdvFrequencyModel(gains=LinearGains(k1, k2, k3), lambda2=lam2, tau=tau)


PAPER = model(0.057792, 0.04, 0.185, 1.125, 0.5)


class TestHdvTransfer:
    def test_dc_gain_unity(self):
        t = hdv_transfer(1e-9, PAPER)
        assert abs(t - 1.0) < 1e-6
        assert abs(abs(hdv_transfer(1e-12, PAPER)) - 1.0) < 1e-9

    def test_zero_delay_equals_cav_form(self):
        m = model(0.3, 0.8, 0.4, lam2=0.7, tau=0.0)
        g = CavGains(0.3, 0.8, 0.4, lambda2=0.7)
        for w in (0.01, 0.3, 1.7, 9.0):
            assert hdv_transfer(w, m) == pytest.approx(cav_transfer(w, g), abs=1e-14)

    def test_closed_form_cross_oracle(self):
        w = np.linspace(1e-3, 5.0, 1000)
        direct = np.abs(hdv_transfer(w, PAPER)) ** 2
        closed = hdv_gain_sq(w, PAPER)
        assert np.max(np.abs(direct - closed) / closed) < 1e-10

    def test_closed_form_cross_oracle_random(self):
        rng = np.random.default_rng(3)
        w = np.geomspace(1e-3, 5.0, 1000)
        for _ in range(50):
            m = model(
                rng.uniform(0.01, 0.3),
                rng.uniform(0.01, 0.3),
                rng.uniform(0.0, 0.5),
                rng.uniform(0.0, 2.0),
                rng.uniform(0.0, 1.5),
            )
            direct = np.abs(hdv_transfer(w, m)) ** 2
            closed = hdv_gain_sq(w, m)
            assert np.max(np.abs(direct - closed) / closed) < 1e-10

    def test_zero_delay_closed_form_reduction(self):
        m = model(0.1, 0.2, 0.3, lam2=0.5, tau=0.0)
        K = m.aggregate_gain
        w = 0.7
        expected = (m.gains.k1**2 + w**2 * m.gains.k3**2) / (
            (m.gains.k1 - w**2) ** 2 + w**2 * K**2
        )
        assert hdv_gain_sq(w, m) == pytest.approx(expected, rel=1e-12)

    def test_rejects_negative_omega(self):
        with pytest.raises(ValueError):
            hdv_transfer(-0.1, PAPER)

    def test_log_magnitudes_match_scalar_path(self):
        ms = [PAPER, model(0.1, 0.2, 0.3, 0.5, 0.2)]
        w = np.geomspace(1e-2, 2.0, 17)
        table = hdv_log_magnitudes(ms, w)
        for i, m in enumerate(ms):
            np.testing.assert_allclose(table[i], 0.5 * np.log(hdv_gain_sq(w, m)), rtol=1e-12)


class TestCavTransfer:
    def test_dc_gain(self):
        g = CavGains(0.3, 0.5, 0.2)
        assert cav_transfer(0.0, g) == pytest.approx(1.0 + 0.0j, abs=1e-15)

    def test_hand_computed_point(self):
        # (1 + 0j) / (-1 + 1j + 1) = 1/j = -j
        g = CavGains(1.0, 1.0, 0.0, lambda2=0.0)
        t = cav_transfer(1.0, g)
        assert t == pytest.approx(-1j, abs=1e-15)
        assert abs(t) == pytest.approx(1.0, abs=1e-15)

    def test_high_frequency_rolloff(self):
        g = CavGains(0.3, 0.5, 0.2)
        w = 1e4
        assert abs(cav_transfer(w, g)) == pytest.approx(g.k3 / w, rel=1e-3)

    def test_zero_gap_gain_limit(self):
        # first-order lag: value at omega=0 is the continuous limit k3/(k2+k3)
        g = CavGains(0.0, 1.0, 0.5)
        assert cav_transfer(0.0, g) == pytest.approx(0.5 / 1.5, abs=1e-15)
        assert cav_gain_sq(0.0, g) == pytest.approx((0.5 / 1.5) ** 2, abs=1e-15)
        # and the all-zero controller is identically zero
        assert cav_transfer(0.0, CavGains(0.0, 0.0, 0.0)) == 0.0

    def test_closed_form_cross_oracle(self):
        rng = np.random.default_rng(5)
        w = np.geomspace(1e-3, 10.0, 1000)
        for _ in range(50):
            g = random_cav_gains(rng)
            direct = np.abs(cav_transfer(w, g)) ** 2
            closed = cav_gain_sq(w, g)
            ok = closed > 0
            assert np.max(np.abs(direct[ok] - closed[ok]) / closed[ok]) < 1e-10

    def test_true_imaginary_axis_pole_reported(self):
        g = CavGains(1.0, 0.0, 0.0, lambda2=0.0)
        with pytest.raises(SingularFrequencyError):
            cav_transfer(1.0, g)


class TestCavStringStable:
    def test_zero_gap_gain_always_stable(self):
        assert cav_string_stable(CavGains(0.0, 0.7, 1.3))

    def test_known_unstable_triple(self):
        g = CavGains(1.0, 1.0, 0.0, lambda2=0.0)
        assert cav_stability_margin(g) == pytest.approx(-1.0)
        assert not cav_string_stable(g)
        w = check_grid()
        assert np.max(np.abs(cav_transfer(w, g))) > 1.0

    def test_equality_boundary(self):
        # k2^2 = 2*k1 with k3 = lambda2 = 0 sits exactly on the boundary
        g = CavGains(0.5, 1.0, 0.0, lambda2=0.0)
        assert cav_stability_margin(g) == pytest.approx(0.0, abs=1e-15)
        assert cav_string_stable(g)
        sup = np.max(np.abs(cav_transfer(check_grid(), g)))
        assert sup <= 1.0 + 1e-9
        assert sup == pytest.approx(1.0, abs=1e-6)

    def test_rejects_negative_gains(self):
        with pytest.raises(ValueError):
            cav_string_stable(CavGains(-0.1, 1.0, 1.0))

    def test_matches_grid_supremum_both_directions(self):
        rng = np.random.default_rng(17)
        w = check_grid()
        for _ in range(200):
            g = random_cav_gains(rng)
            # near-boundary triples make the grid supremum numerically
            # indistinguishable from 1; resample those
            while abs(cav_stability_margin(g)) < 1e-3:
                g = random_cav_gains(rng)
            sup = np.max(np.abs(cav_transfer(w, g)))
            assert cav_string_stable(g) == (sup <= 1.0 + 1e-6)


class TestVerdicts:
    def test_no_delay_stable_condition(self):
        # with tau = 0, lambda2 = 0 the threshold is 2k1 - k2^2 - 2k2k3
        m = model(0.1, 0.8, 0.3, lam2=0.0, tau=0.0)
        assert 2 * 0.1 - 0.8**2 - 2 * 0.8 * 0.3 <= 0
        assert hdv_stability_verdict(m).kind == STABLE_ALL

    def test_reduction_matches_no_delay_threshold_exactly(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            k1, k2, k3 = rng.uniform(0.01, 1.0, 3)
            m = model(k1, k2, k3, lam2=0.0, tau=0.0)
            internal = m.gains.k3**2 + 2 * m.gains.k1 - m.aggregate_gain**2
            reference = 2 * k1 - k2**2 - 2 * k2 * k3
            assert internal == pytest.approx(reference, abs=1e-15)

    def test_large_delay_uncertifiable(self):
        m = model(0.05, 0.04, 0.185, lam2=1.125, tau=2.0)
        assert m.aggregate_gain == pytest.approx(0.28125)
        assert 2 * m.aggregate_gain * m.tau > 1
        assert hdv_stability_verdict(m).kind == UNSTABLE_ALL

    def test_critical_frequency_value_and_guarantee(self):
        m = model(0.057792, 0.04, 0.185, lam2=1.125, tau=0.01)
        v = hdv_stability_verdict(m)
        assert v.kind == UNSTABLE_BELOW
        K = 0.04 + 0.185 + 0.057792 * 1.125
        expected = math.sqrt((0.185**2 + 2 * 0.057792 - K * K) / (1 - 2 * K * 0.01))
        assert v.critical_frequency == pytest.approx(expected, rel=1e-12)
        w = np.linspace(v.critical_frequency, 10 * v.critical_frequency, 100)
        assert np.all(np.abs(hdv_transfer(w, m)) <= 1.0 + 1e-9)

    def test_verdicts_on_random_sets_are_sound(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            m = model(
                rng.uniform(0.01, 0.3),
                rng.uniform(0.01, 0.3),
                rng.uniform(0.0, 0.4),
                rng.uniform(0.0, 2.0),
                rng.uniform(0.0, 1.0),
            )
            v = hdv_stability_verdict(m)
            if v.kind == UNSTABLE_BELOW:
                w = np.linspace(v.critical_frequency, 10 * v.critical_frequency, 100)
                assert np.all(np.abs(hdv_transfer(w, m)) <= 1.0 + 1e-9)
            elif v.kind == STABLE_ALL:
                w = check_grid(points=512)
                assert np.all(np.abs(hdv_transfer(w, m)) <= 1.0 + 1e-9)


class TestPlatoonCriticalFrequency:
    def test_identical_models(self):
        m = model(0.057792, 0.04, 0.185, 1.125, 0.01)
        w0 = hdv_stability_verdict(m).critical_frequency
        assert platoon_critical_frequency([m, m, m]) == w0

    def test_min_of_two(self):
        a = model(0.0478, 0.04, 0.185, 1.125, 0.01)
        b = model(0.0578, 0.04, 0.185, 1.125, 0.01)
        wa = hdv_stability_verdict(a).critical_frequency
        wb = hdv_stability_verdict(b).critical_frequency
        assert platoon_critical_frequency([a, b]) == min(wa, wb)

    def test_heterogeneous_matches_brute_force(self, paper_models):
        per_vehicle = [
            hdv_stability_verdict(m).critical_frequency for m in paper_models
            if hdv_stability_verdict(m).kind == UNSTABLE_BELOW
        ]
        assert platoon_critical_frequency(paper_models) == min(per_vehicle)

    def test_excluded_models_warn(self):
        stable = model(0.1, 0.8, 0.3, lam2=0.0, tau=0.0)
        unstable = model(0.057792, 0.04, 0.185, 1.125, 0.01)
        with pytest.warns(UserWarning, match="excluded"):
            w0 = platoon_critical_frequency([stable, unstable])
        assert w0 == hdv_stability_verdict(unstable).critical_frequency

    def test_no_unstable_band_is_an_error(self):
        stable = model(0.1, 0.8, 0.3, lam2=0.0, tau=0.0)
        with pytest.raises(ValueError, match="no unstable band"):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                platoon_critical_frequency([stable])

    def test_empty_list_is_an_error(self):
        with pytest.raises(ValueError):
            platoon_critical_frequency([])
