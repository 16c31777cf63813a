"""Experiment configuration: strict JSON parsing, validation and assembly.

A configuration is a single JSON document with explicit unit tags on speeds.
Unknown keys are rejected (with the offending key path in the message) so a
typo never silently falls back to a default.  ``to_dict``/``from_dict``
round-trip losslessly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .models import CavGains, OptimalVelocityFn
from .optimizer import GainAxis, GainGrid
from .platoon import SafetyEnvelope
from .sampling import PopulationSpec, TruncatedNormal, unit_convert
from .simulate import IntegratorConfig, Perturbation


def _require(d: dict, key: str, path: str):
    if key not in d:
        raise ConfigError(f"{path}: missing key {key!r}")
    return d[key]


def _no_extras(d: dict, allowed, path: str):
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"{path}: unknown key {sorted(extra)[0]!r}")


def _number(value, path: str, minimum=None, maximum=None, strict_min=False):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    v = float(value)
    if minimum is not None and (v <= minimum if strict_min else v < minimum):
        op = ">" if strict_min else ">="
        raise ConfigError(f"{path}: must be {op} {minimum}")
    if maximum is not None and v > maximum:
        raise ConfigError(f"{path}: must be <= {maximum}")
    return v


def _integer(value, path: str, minimum=None):
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}")
    return value


@dataclass(frozen=True)
class Quantity:
    value: float
    unit: str

    @classmethod
    def parse(cls, d, path: str) -> "Quantity":
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: expected {{value, unit}}, got {d!r}")
        _no_extras(d, ("value", "unit"), path)
        value = _number(_require(d, "value", path), f"{path}.value")
        unit = _require(d, "unit", path)
        if unit not in ("m/s", "mph"):
            raise ConfigError(f"{path}.unit: unsupported unit {unit!r}")
        return cls(value, unit)

    def mps(self) -> float:
        return unit_convert(self.value, self.unit, "m/s")


@dataclass(frozen=True)
class DistSection:
    mean: float
    sd: float
    min: float
    max: float

    @classmethod
    def parse(cls, d, path: str) -> "DistSection":
        _no_extras(d, ("mean", "sd", "min", "max"), path)
        return cls(
            mean=_number(_require(d, "mean", path), f"{path}.mean"),
            sd=_number(_require(d, "sd", path), f"{path}.sd", minimum=0.0),
            min=_number(_require(d, "min", path), f"{path}.min"),
            max=_number(_require(d, "max", path), f"{path}.max"),
        )

    def truncated_normal(self) -> TruncatedNormal:
        return TruncatedNormal(self.mean, self.sd, self.min, self.max)


@dataclass(frozen=True)
class OvfSection:
    amplitude: float = 16.8
    slope: float = 0.0860
    shift: float = 0.913
    clearance: float = 20.0
    vehicle_length: float = 5.0

    @classmethod
    def parse(cls, d, path: str) -> "OvfSection":
        _no_extras(d, ("amplitude", "slope", "shift", "clearance", "vehicle_length"), path)
        return cls(
            amplitude=_number(_require(d, "amplitude", path), f"{path}.amplitude", 0.0, strict_min=True),
            slope=_number(_require(d, "slope", path), f"{path}.slope", 0.0, strict_min=True),
            shift=_number(_require(d, "shift", path), f"{path}.shift"),
            clearance=_number(_require(d, "clearance", path), f"{path}.clearance", 0.0),
            vehicle_length=_number(
                _require(d, "vehicle_length", path), f"{path}.vehicle_length", 0.0, strict_min=True
            ),
        )

    def build(self) -> OptimalVelocityFn:
        return OptimalVelocityFn(
            amplitude=self.amplitude,
            slope=self.slope,
            offset=self.clearance + self.vehicle_length,
            shift=self.shift,
            vehicle_length=self.vehicle_length,
        )


@dataclass(frozen=True)
class PopulationSection:
    count: int
    alpha: DistSection
    beta: DistSection
    desired_headway: DistSection
    delay_coefficient: float
    lambda2: float

    @classmethod
    def parse(cls, d, path: str) -> "PopulationSection":
        _no_extras(
            d, ("count", "alpha", "beta", "desired_headway", "delay_coefficient", "lambda2"), path
        )
        return cls(
            count=_integer(_require(d, "count", path), f"{path}.count", minimum=0),
            alpha=DistSection.parse(_require(d, "alpha", path), f"{path}.alpha"),
            beta=DistSection.parse(_require(d, "beta", path), f"{path}.beta"),
            desired_headway=DistSection.parse(
                _require(d, "desired_headway", path), f"{path}.desired_headway"
            ),
            delay_coefficient=_number(
                _require(d, "delay_coefficient", path), f"{path}.delay_coefficient", 0.0
            ),
            lambda2=_number(_require(d, "lambda2", path), f"{path}.lambda2", 0.0),
        )

    def spec(self, seed: int) -> PopulationSpec:
        return PopulationSpec(
            count=self.count,
            alpha=self.alpha.truncated_normal(),
            beta=self.beta.truncated_normal(),
            desired_headway=self.desired_headway.truncated_normal(),
            delay_coefficient=self.delay_coefficient,
            lambda2=self.lambda2,
            seed=seed,
        )


@dataclass(frozen=True)
class CavSection:
    k1: float
    k2: float
    k3: float
    lambda2: float
    lambda3: float | None

    @classmethod
    def parse(cls, d, path: str) -> "CavSection":
        _no_extras(d, ("k1", "k2", "k3", "lambda2", "lambda3"), path)
        gains = {}
        for key in ("k1", "k2", "k3"):
            v = _number(_require(d, key, path), f"{path}.{key}")
            if v < 0:
                raise ConfigError(f"{path}.{key}: must be nonnegative (gain sign constraint)")
            gains[key] = v
        lam3 = d.get("lambda3")
        if lam3 is not None:
            lam3 = _number(lam3, f"{path}.lambda3")
        return cls(
            lambda2=_number(_require(d, "lambda2", path), f"{path}.lambda2", 0.0),
            lambda3=lam3,
            **gains,
        )

    def gains(self, anchor_headway: float, v_star: float) -> CavGains:
        """Resolve the policy intercept: an absent lambda3 anchors the desired
        gap at the given headway at the equilibrium speed."""
        lam3 = self.lambda3
        if lam3 is None:
            lam3 = anchor_headway - self.lambda2 * v_star
        return CavGains(self.k1, self.k2, self.k3, self.lambda2, lam3)


@dataclass(frozen=True)
class GainAxisSection:
    min: float
    max: float
    steps: int

    @classmethod
    def parse(cls, d, path: str) -> "GainAxisSection":
        _no_extras(d, ("min", "max", "steps"), path)
        lo = _number(_require(d, "min", path), f"{path}.min")
        if lo < 0:
            raise ConfigError(f"{path}.min: must be nonnegative (gain sign constraint)")
        return cls(
            min=lo,
            max=_number(_require(d, "max", path), f"{path}.max", lo),
            steps=_integer(_require(d, "steps", path), f"{path}.steps", minimum=1),
        )


@dataclass(frozen=True)
class GainGridSection:
    k1: GainAxisSection
    k2: GainAxisSection
    k3: GainAxisSection

    @classmethod
    def parse(cls, d, path: str) -> "GainGridSection":
        _no_extras(d, ("k1", "k2", "k3"), path)
        return cls(
            k1=GainAxisSection.parse(_require(d, "k1", path), f"{path}.k1"),
            k2=GainAxisSection.parse(_require(d, "k2", path), f"{path}.k2"),
            k3=GainAxisSection.parse(_require(d, "k3", path), f"{path}.k3"),
        )

    def grid(self, lambda2: float, lambda3: float) -> GainGrid:
        def axis(a: GainAxisSection) -> GainAxis:
            return GainAxis(a.min, a.max, a.steps)

        return GainGrid(axis(self.k1), axis(self.k2), axis(self.k3), lambda2, lambda3)


@dataclass(frozen=True)
class SafetySection:
    headway_min: float
    headway_max: float
    disturbance: float
    ttc_threshold: float

    @classmethod
    def parse(cls, d, path: str) -> "SafetySection":
        _no_extras(d, ("headway_min", "headway_max", "disturbance", "ttc_threshold"), path)
        lo = _number(_require(d, "headway_min", path), f"{path}.headway_min", 0.0, strict_min=True)
        hi = _number(_require(d, "headway_max", path), f"{path}.headway_max", lo, strict_min=True)
        return cls(
            headway_min=lo,
            headway_max=hi,
            disturbance=_number(
                _require(d, "disturbance", path), f"{path}.disturbance", 0.0, strict_min=True
            ),
            ttc_threshold=_number(
                _require(d, "ttc_threshold", path), f"{path}.ttc_threshold", 0.0, strict_min=True
            ),
        )

    def envelope(self, mean_headway: float) -> SafetyEnvelope:
        return SafetyEnvelope.from_headway_band(
            self.headway_min, self.headway_max, self.disturbance, mean_headway
        )


@dataclass(frozen=True)
class FrequencyBandSection:
    points: int = 512
    refine: bool = True
    full_band: bool = False

    @classmethod
    def parse(cls, d, path: str) -> "FrequencyBandSection":
        _no_extras(d, ("points", "refine", "full_band"), path)
        refine = d.get("refine", True)
        full_band = d.get("full_band", False)
        if not isinstance(refine, bool):
            raise ConfigError(f"{path}.refine: expected a boolean")
        if not isinstance(full_band, bool):
            raise ConfigError(f"{path}.full_band: expected a boolean")
        return cls(
            points=_integer(_require(d, "points", path), f"{path}.points", minimum=2),
            refine=refine,
            full_band=full_band,
        )


@dataclass(frozen=True)
class IntegratorSection:
    step: float
    horizon: float
    record_every: float | None

    @classmethod
    def parse(cls, d, path: str) -> "IntegratorSection":
        _no_extras(d, ("step", "horizon", "record_every"), path)
        rec = d.get("record_every")
        if rec is not None:
            rec = _number(rec, f"{path}.record_every", 0.0, strict_min=True)
        return cls(
            step=_number(_require(d, "step", path), f"{path}.step", 0.0, strict_min=True),
            horizon=_number(_require(d, "horizon", path), f"{path}.horizon", 0.0, strict_min=True),
            record_every=rec,
        )

    def build(self) -> IntegratorConfig:
        return IntegratorConfig(step=self.step, horizon=self.horizon, record_every=self.record_every)


@dataclass(frozen=True)
class PerturbationSection:
    kind: str
    amplitude: float = 0.0
    omega: float = 0.0
    decel: float = 0.0
    duration: float = 0.0
    start: float = 0.0

    @classmethod
    def parse(cls, d, path: str) -> "PerturbationSection":
        kind = _require(d, "kind", path)
        if kind == "none":
            _no_extras(d, ("kind",), path)
            return cls(kind="none")
        if kind == "sinusoid":
            _no_extras(d, ("kind", "amplitude", "omega"), path)
            return cls(
                kind="sinusoid",
                amplitude=_number(_require(d, "amplitude", path), f"{path}.amplitude", 0.0),
                omega=_number(_require(d, "omega", path), f"{path}.omega", 0.0, strict_min=True),
            )
        if kind == "brake_pulse":
            _no_extras(d, ("kind", "decel", "duration", "start"), path)
            decel = _number(_require(d, "decel", path), f"{path}.decel")
            if decel >= 0:
                raise ConfigError(f"{path}.decel: must be negative")
            return cls(
                kind="brake_pulse",
                decel=decel,
                duration=_number(_require(d, "duration", path), f"{path}.duration", 0.0, strict_min=True),
                start=_number(_require(d, "start", path), f"{path}.start", 0.0),
            )
        raise ConfigError(f"{path}.kind: unknown perturbation kind {kind!r}")

    def build(self) -> Perturbation:
        if self.kind == "sinusoid":
            return Perturbation.sinusoid(self.amplitude, self.omega)
        if self.kind == "brake_pulse":
            return Perturbation.brake_pulse(self.decel, self.duration, self.start)
        return Perturbation.none()


@dataclass(frozen=True)
class SimulationSection:
    model: str
    controller: str
    hdv_count: int
    a_min: float
    a_max: float

    @classmethod
    def parse(cls, d, path: str) -> "SimulationSection":
        _no_extras(d, ("model", "controller", "hdv_count", "a_min", "a_max"), path)
        model = _require(d, "model", path)
        if model not in ("nonlinear", "linear"):
            raise ConfigError(f"{path}.model: unknown model {model!r}")
        controller = _require(d, "controller", path)
        if controller not in ("cav", "acc", "cacc", "multi_pred"):
            raise ConfigError(f"{path}.controller: unknown controller {controller!r}")
        a_min = _number(_require(d, "a_min", path), f"{path}.a_min")
        if a_min >= 0:
            raise ConfigError(f"{path}.a_min: must be negative")
        return cls(
            model=model,
            controller=controller,
            hdv_count=_integer(_require(d, "hdv_count", path), f"{path}.hdv_count", minimum=1),
            a_min=a_min,
            a_max=_number(_require(d, "a_max", path), f"{path}.a_max", 0.0),
        )


@dataclass(frozen=True)
class WeightsSection:
    stable: float = 0.5
    safe: float = 0.5

    @classmethod
    def parse(cls, d, path: str) -> "WeightsSection":
        _no_extras(d, ("stable", "safe"), path)
        return cls(
            stable=_number(_require(d, "stable", path), f"{path}.stable", 0.0),
            safe=_number(_require(d, "safe", path), f"{path}.safe", 0.0),
        )


_TOP_KEYS = (
    "scenario",
    "seed",
    "v_star",
    "leader_speed",
    "optimal_velocity",
    "population",
    "cav",
    "gain_grid",
    "safety",
    "frequency_band",
    "objective_weights",
    "integrator",
    "perturbation",
    "simulation",
    "output_dir",
)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    seed: int
    v_star: Quantity
    leader_speed: Quantity
    optimal_velocity: OvfSection
    population: PopulationSection
    cav: CavSection
    gain_grid: GainGridSection
    safety: SafetySection
    frequency_band: FrequencyBandSection
    objective_weights: WeightsSection
    integrator: IntegratorSection
    perturbation: PerturbationSection
    simulation: SimulationSection
    output_dir: str

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError(f"config: expected an object, got {type(d).__name__}")
        _no_extras(d, _TOP_KEYS, "config")
        scenario = _require(d, "scenario", "config")
        if not isinstance(scenario, str):
            raise ConfigError("config.scenario: expected a string")
        output_dir = _require(d, "output_dir", "config")
        if not isinstance(output_dir, str):
            raise ConfigError("config.output_dir: expected a string")
        return cls(
            scenario=scenario,
            seed=_integer(_require(d, "seed", "config"), "config.seed"),
            v_star=Quantity.parse(_require(d, "v_star", "config"), "config.v_star"),
            leader_speed=Quantity.parse(_require(d, "leader_speed", "config"), "config.leader_speed"),
            optimal_velocity=OvfSection.parse(
                _require(d, "optimal_velocity", "config"), "config.optimal_velocity"
            ),
            population=PopulationSection.parse(_require(d, "population", "config"), "config.population"),
            cav=CavSection.parse(_require(d, "cav", "config"), "config.cav"),
            gain_grid=GainGridSection.parse(_require(d, "gain_grid", "config"), "config.gain_grid"),
            safety=SafetySection.parse(_require(d, "safety", "config"), "config.safety"),
            frequency_band=FrequencyBandSection.parse(
                _require(d, "frequency_band", "config"), "config.frequency_band"
            ),
            objective_weights=WeightsSection.parse(
                _require(d, "objective_weights", "config"), "config.objective_weights"
            ),
            integrator=IntegratorSection.parse(_require(d, "integrator", "config"), "config.integrator"),
            perturbation=PerturbationSection.parse(
                _require(d, "perturbation", "config"), "config.perturbation"
            ),
            simulation=SimulationSection.parse(_require(d, "simulation", "config"), "config.simulation"),
            output_dir=output_dir,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        # the perturbation keys are kind-dependent and strict parsing rejects
        # the inapplicable ones, so emit only the relevant subset
        pert = {"kind": self.perturbation.kind}
        if self.perturbation.kind == "sinusoid":
            pert["amplitude"] = self.perturbation.amplitude
            pert["omega"] = self.perturbation.omega
        elif self.perturbation.kind == "brake_pulse":
            pert["decel"] = self.perturbation.decel
            pert["duration"] = self.perturbation.duration
            pert["start"] = self.perturbation.start
        d["perturbation"] = pert
        return d

    def canonical_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    # -- assembly ------------------------------------------------------------

    def v_star_mps(self) -> float:
        return self.v_star.mps()

    def ovf(self) -> OptimalVelocityFn:
        return self.optimal_velocity.build()

    def population_spec(self, seed: int | None = None) -> PopulationSpec:
        return self.population.spec(self.seed if seed is None else seed)

    def cav_gains(self, anchor_headway: float | None = None) -> CavGains:
        anchor = self.population.desired_headway.mean if anchor_headway is None else anchor_headway
        return self.cav.gains(anchor, self.v_star_mps())


def preset_names() -> list[str]:
    root = resources.files("mixflow") / "presets"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(path: str) -> ExperimentConfig:
    """Load a config from a file path, falling back to a bundled preset name.

    ``paper_s5`` or ``paper_s5.json`` resolve to the bundled preset when no
    file of that name exists.
    """
    p = Path(path)
    if p.exists():
        text = p.read_text()
    else:
        stem = p.name[: -len(".json")] if p.name.endswith(".json") else p.name
        candidate = resources.files("mixflow") / "presets" / f"{stem}.json"
        if p.parent == Path(".") and candidate.is_file():
            text = candidate.read_text()
        else:
            raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from None
    return ExperimentConfig.from_dict(raw)
