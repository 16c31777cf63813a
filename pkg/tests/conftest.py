import numpy as np
import pytest

from mixflow.frequency import HdvFrequencyModel
from mixflow.models import CavGains, HdvParams, OptimalVelocityFn
from mixflow.sampling import PopulationSpec, sample_population

V_STAR = 30 * 0.44704  # 13.4112 m/s


@pytest.fixture(scope="session")
def ovf():
    return OptimalVelocityFn()


@pytest.fixture(scope="session")
def paper_population(ovf):
    """20 drivers drawn from the default distributions, seed 42."""
    return sample_population(PopulationSpec(count=20, seed=42), v_star=V_STAR)


@pytest.fixture(scope="session")
def paper_models(paper_population, ovf):
    return [HdvFrequencyModel.from_params(p, ovf) for p in paper_population]


def random_hdv_params(rng, lambda2=1.125):
    """One plausible driver with a moderate reaction delay."""
    alpha = rng.uniform(0.03, 0.09)
    return HdvParams(
        alpha=alpha,
        beta=rng.uniform(0.1, 0.3),
        tau=rng.uniform(0.2, 0.5),
        desired_headway=rng.uniform(26.0, 34.0),
        lambda2=lambda2,
        lambda3=0.0,
    )


def random_cav_gains(rng, lambda2=1.125):
    return CavGains(
        k1=rng.uniform(0.0, 0.5),
        k2=rng.uniform(0.0, 2.0),
        k3=rng.uniform(0.0, 2.0),
        lambda2=lambda2,
    )
