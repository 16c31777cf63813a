"""Mixed-platoon string stability: frequency-domain analysis, gain
optimization and delayed car-following simulation for one autonomous
vehicle heading a string of heterogeneous human drivers."""

__version__ = "0.1.0"

from .models import (
    CavGains,
    HdvParams,
    LinearGains,
    OptimalVelocityFn,
    PlatoonSpec,
    equilibrium_trajectory,
    invert_optimal_velocity,
    linearize_hdv,
    optimal_velocity,
    optimal_velocity_slope,
)
from .frequency import (
    HdvFrequencyModel,
    StabilityVerdict,
    cav_gain_sq,
    cav_string_stable,
    cav_transfer,
    hdv_gain_sq,
    hdv_stability_verdict,
    hdv_transfer,
    platoon_critical_frequency,
)
from .platoon import (
    SafetyEnvelope,
    StabilizableResult,
    head_to_tail_gain,
    max_safe_stabilizable,
    max_stabilizable,
    overall_objective,
)
from .optimizer import GainAxis, GainGrid, OptimizationReport, feasible, frequency_sweep, grid_search
from .sampling import PopulationSpec, delay_from_sensitivity, sample_population, unit_convert
from .simulate import (
    IntegratorConfig,
    Perturbation,
    SafetyReport,
    Trajectory,
    safety_metrics,
    simulate,
    steady_state_gain,
)

__all__ = [
    "CavGains",
    "GainAxis",
    "GainGrid",
    "HdvFrequencyModel",
    "HdvParams",
    "IntegratorConfig",
    "LinearGains",
    "OptimalVelocityFn",
    "OptimizationReport",
    "Perturbation",
    "PlatoonSpec",
    "PopulationSpec",
    "SafetyEnvelope",
    "SafetyReport",
    "StabilityVerdict",
    "StabilizableResult",
    "Trajectory",
    "cav_gain_sq",
    "cav_string_stable",
    "cav_transfer",
    "delay_from_sensitivity",
    "equilibrium_trajectory",
    "feasible",
    "frequency_sweep",
    "grid_search",
    "hdv_gain_sq",
    "hdv_stability_verdict",
    "hdv_transfer",
    "head_to_tail_gain",
    "invert_optimal_velocity",
    "linearize_hdv",
    "max_safe_stabilizable",
    "max_stabilizable",
    "optimal_velocity",
    "optimal_velocity_slope",
    "overall_objective",
    "platoon_critical_frequency",
    "safety_metrics",
    "sample_population",
    "simulate",
    "steady_state_gain",
    "unit_convert",
]
