"""Population sampling determinism, truncation and unit conversion."""

import math

import numpy as np
import pytest

from mixflow.sampling import (
    PopulationSpec,
    TruncatedNormal,
    collapse_to_mean,
    delay_from_sensitivity,
    sample_population,
    unit_convert,
)

V_STAR = 13.4112


class TestDelayFromSensitivity:
    def test_paper_point(self):
        assert delay_from_sensitivity(0.04) == pytest.approx(0.01, abs=1e-15)

    def test_human_scale_coefficient(self):
        assert delay_from_sensitivity(0.04, coefficient=0.04) == pytest.approx(1.0)

    def test_inverse_proportionality_exact(self):
        a = 0.0371
        assert delay_from_sensitivity(2 * a) == delay_from_sensitivity(a) / 2

    def test_rejects_nonpositive_alpha(self):
        with pytest.raises(ValueError):
            delay_from_sensitivity(0.0)


class TestUnitConvert:
    def test_thirty_mph(self):
        assert unit_convert(30.0, "mph", "m/s") == pytest.approx(13.4112, abs=1e-12)

    def test_forty_five_mph(self):
        assert unit_convert(45.0, "mph", "m/s") == pytest.approx(20.1168, abs=1e-12)

    def test_round_trip(self):
        v = unit_convert(unit_convert(30.0, "mph", "m/s"), "m/s", "mph")
        assert v == pytest.approx(30.0, abs=1e-12)
        d = unit_convert(unit_convert(2.0, "mi", "m"), "m", "mi")
        assert d == pytest.approx(2.0, abs=1e-12)

    def test_unsupported_pair(self):
        with pytest.raises(ValueError):
            unit_convert(1.0, "mph", "km/h")


class TestSamplePopulation:
    def test_empty(self):
        assert sample_population(PopulationSpec(count=0, seed=1), V_STAR) == []

    def test_deterministic(self):
        a = sample_population(PopulationSpec(count=50, seed=42), V_STAR)
        b = sample_population(PopulationSpec(count=50, seed=42), V_STAR)
        assert a == b
        c = sample_population(PopulationSpec(count=50, seed=43), V_STAR)
        assert a != c

    def test_sample_means_within_standard_error(self):
        pop = sample_population(PopulationSpec(count=1000, seed=42), V_STAR)
        for attr, mean, sd in (("alpha", 0.04, 0.004), ("beta", 0.185, 0.018),
                               ("desired_headway", 30.125, 3.0)):
            values = np.array([getattr(p, attr) for p in pop])
            assert abs(values.mean() - mean) <= 3 * sd / math.sqrt(1000), attr

    def test_distribution_fidelity(self):
        pop = sample_population(PopulationSpec(count=10_000, seed=7), V_STAR)
        for attr, mean, sd in (("alpha", 0.04, 0.004), ("beta", 0.185, 0.018),
                               ("desired_headway", 30.125, 3.0)):
            values = np.array([getattr(p, attr) for p in pop])
            assert abs(values.mean() - mean) <= 5 * sd / math.sqrt(10_000)
            assert abs(values.std(ddof=1) - sd) <= 5 * sd / math.sqrt(2 * 10_000)

    def test_truncation_respected_and_invariants_hold(self):
        spec = PopulationSpec(
            count=2000,
            alpha=TruncatedNormal(0.04, 0.02, 0.005, 0.2),
            beta=TruncatedNormal(0.185, 0.1, 0.0, 0.5),
            desired_headway=TruncatedNormal(30.125, 10.0, 10.0, 60.0),
            seed=5,
        )
        for p in sample_population(spec, V_STAR):
            assert 0.005 <= p.alpha <= 0.2
            assert 0.0 <= p.beta <= 0.5
            assert 10.0 <= p.desired_headway <= 60.0
            assert p.tau == delay_from_sensitivity(p.alpha)

    def test_policy_anchored_at_equilibrium(self):
        for p in sample_population(PopulationSpec(count=20, seed=3), V_STAR):
            assert p.lambda2 * V_STAR + p.lambda3 == pytest.approx(p.desired_headway, abs=1e-12)

    def test_degenerate_truncation_raises(self):
        spec = PopulationSpec(
            count=1,
            alpha=TruncatedNormal(0.04, 1e-9, 0.1, 0.2),  # mass nowhere near the window
            seed=1,
        )
        with pytest.raises(ValueError, match="rejection rate"):
            sample_population(spec, V_STAR)

    def test_lambda2_override(self):
        spec = PopulationSpec(count=5, lambda2=0.9, seed=2)
        assert all(p.lambda2 == 0.9 for p in sample_population(spec, V_STAR))


class TestCollapseToMean:
    def test_homogeneous_zero_delay(self):
        pop = sample_population(PopulationSpec(count=30, seed=9), V_STAR)
        base = collapse_to_mean(pop)
        assert len(base) == len(pop)
        assert len({p for p in base}) == 1
        p = base[0]
        assert p.tau == 0.0
        assert p.alpha == pytest.approx(np.mean([q.alpha for q in pop]))
        assert p.desired_headway == pytest.approx(np.mean([q.desired_headway for q in pop]))

    def test_empty(self):
        assert collapse_to_mean([]) == []
