"""Scenario documents: defaults, strict validation, and dotted overrides.

A scenario is a JSON object; every key is optional and unknown keys are
rejected with their field path. The default document reproduces the study
setup: a six-vehicle highway string at 30 m/s with a 0.5 s time gap and
one ramp vehicle discharged at 5 m/s onto a 267 m on-ramp.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from typing import Any

from .control import (
    AGGRESSIVE_VARIANTS,
    CAUTIOUS_VARIANTS,
    ConsensusGains,
    ControllerConfig,
    DriverModel,
    FallbackParams,
)
from .dynamics import ActuationLimits
from .errors import ScenarioParseError, ScenarioValidationError
from .sequencing import SequencingParams

MODES = ("coop", "cautious", "aggressive", "human")

DEFAULT_DOCUMENT: dict[str, Any] = {
    "mode": "coop",
    "seed": 1,
    "dt": 0.02,
    "duration": 60.0,
    "measurement_distance": 600.0,
    "highway_count": 6,
    "ramp_count": 1,
    "ramp_initial_speed": 5.0,
    "ramp_spawn_delay": 19.7,
    "highway_desired_speed": 30.0,
    "cacc_time_gap": 0.5,
    "geometry": {"source": "generated", "path": None},
    "spawn": {
        "leader_station": -972.0,
        "spacing_min": 20.0,
        "spacing_max": 35.0,
        "speed_min": 27.0,
        "speed_max": 30.0,
    },
    "v2i": {
        "range": 400.0,
        "infra_position": [0.0, -8.0],
        "entry_window": 60.0,
    },
    "sequencing": {
        "v_lim": 30.0,
        "a_max": 2.5,
        "t_head_safe": 1.0,
        "sort_period": 5.0,
        "tie_epsilon": 0.05,
        # reserved V2V connection headway: carried so configs can state
        # it, never read by any logic
        "t_head_v2v": 0.0,
    },
    "gains": {
        "delta": 0.4,
        "gamma": 5.0,
        "t_head_safe": 0.6,
        "s_head_safe": 25.0,
        "s_standstill": 3.0,
    },
    "limits": {"a_max": 2.5, "a_min": -4.0, "a_emergency": -6.0},
    "control": {
        "period": 0.1,
        "ttc_bound": 2.0,
        "ttc_hysteresis": 0.5,
        "leader_speed_gain": 0.4,
        "radar_range": 150.0,
        "merge_overlap": 60.0,
    },
    "fallback": {"a_f": 1.5, "b": 2.0, "s0": 2.0, "t_gap": 1.0},
    "vehicle": {"length": 4.5, "mass_t": 1.5},
    "driver": {"variant": None},
    "pedals": {"drive_max": 2.5, "brake_max": 4.0},
}


def _merge_validate(defaults: Any, given: Any, path: str) -> Any:
    """Overlay `given` onto `defaults`, rejecting unknown keys."""
    if isinstance(defaults, dict):
        if not isinstance(given, dict):
            raise ScenarioValidationError(path or "<root>", f"expected object, got {type(given).__name__}")
        out = {}
        for key, default_value in defaults.items():
            sub_path = f"{path}.{key}" if path else key
            if key in given:
                out[key] = _merge_validate(default_value, given[key], sub_path)
            else:
                out[key] = copy.deepcopy(default_value)
        unknown = set(given) - set(defaults)
        if unknown:
            key = sorted(unknown)[0]
            raise ScenarioValidationError(f"{path}.{key}" if path else key, "unknown key")
        return out
    return given


def _require(condition: bool, field_path: str, message: str) -> None:
    if not condition:
        raise ScenarioValidationError(field_path, message)


def _check_number(doc: dict, path: str, low=None, high=None, strict_low=False):
    node = doc
    for part in path.split("."):
        node = node[part]
    _require(isinstance(node, (int, float)) and not isinstance(node, bool),
             path, "expected a number")
    if low is not None:
        if strict_low:
            _require(node > low, path, f"must be > {low}")
        else:
            _require(node >= low, path, f"must be >= {low}")
    if high is not None:
        _require(node <= high, path, f"must be <= {high}")


@dataclass(frozen=True)
class Scenario:
    """Fully resolved run configuration."""

    doc: dict[str, Any] = field(default_factory=lambda: copy.deepcopy(DEFAULT_DOCUMENT))

    @property
    def mode(self) -> str:
        return self.doc["mode"]

    @property
    def seed(self) -> int:
        return self.doc["seed"]

    @property
    def dt(self) -> float:
        return self.doc["dt"]

    @property
    def duration(self) -> float:
        return self.doc["duration"]

    @property
    def measurement_distance(self) -> float:
        return self.doc["measurement_distance"]

    def sequencing_params(self) -> SequencingParams:
        s = self.doc["sequencing"]
        return SequencingParams(
            v_lim=s["v_lim"],
            a_max=s["a_max"],
            t_head_safe=s["t_head_safe"],
            sort_period=s["sort_period"],
            horizon=self.doc["v2i"]["entry_window"],
            tie_epsilon=s["tie_epsilon"],
            default_highway_speed=self.doc["highway_desired_speed"],
            default_ramp_speed=self.doc["ramp_initial_speed"],
        )

    def gains(self) -> ConsensusGains:
        g = self.doc["gains"]
        return ConsensusGains(
            delta=g["delta"],
            gamma=g["gamma"],
            t_head_safe=g["t_head_safe"],
            s_head_safe=g["s_head_safe"],
            s_standstill=g["s_standstill"],
        )

    def limits(self) -> ActuationLimits:
        return ActuationLimits(
            a_max=self.doc["limits"]["a_max"],
            a_min=self.doc["limits"]["a_min"],
            a_emergency=self.doc["limits"]["a_emergency"],
        )

    def controller_config(self) -> ControllerConfig:
        c = self.doc["control"]
        f = self.doc["fallback"]
        return ControllerConfig(
            desired_speed=self.doc["highway_desired_speed"],
            cacc_time_gap=self.doc["cacc_time_gap"],
            leader_speed_gain=c["leader_speed_gain"],
            ttc_bound=c["ttc_bound"],
            ttc_hysteresis=c["ttc_hysteresis"],
            radar_range=c["radar_range"],
            merge_overlap=c["merge_overlap"],
            limits=self.limits(),
            fallback=FallbackParams(
                a_f=f["a_f"],
                b=f["b"],
                s0=f["s0"],
                t_gap=f["t_gap"],
                v0=self.doc["highway_desired_speed"],
            ),
        )

    def driver_model(self) -> DriverModel | None:
        """Scripted/live driver for the ramp vehicle in baseline modes."""
        if self.mode == "coop":
            return None
        if self.mode == "human":
            return DriverModel(kind="human")
        variant = self.doc["driver"]["variant"]
        if variant is None:
            variant = (self.seed - 1) % 4
        table = AGGRESSIVE_VARIANTS if self.mode == "aggressive" else CAUTIOUS_VARIANTS
        return table[variant % len(table)]

    def control_every(self) -> int:
        """Physics steps per control tick."""
        return round(self.doc["control"]["period"] / self.dt)

    def to_json(self) -> str:
        return json.dumps(self.doc, indent=2, sort_keys=True) + "\n"


def load_scenario(document: dict[str, Any]) -> Scenario:
    """Resolve a scenario document against the defaults and validate it."""
    doc = _merge_validate(DEFAULT_DOCUMENT, document, "")
    _require(doc["mode"] in MODES, "mode", f"must be one of {MODES}")
    _require(isinstance(doc["seed"], int) and not isinstance(doc["seed"], bool),
             "seed", "expected an integer")
    _check_number(doc, "dt", low=0.0, strict_low=True)
    _check_number(doc, "duration", low=0.0, strict_low=True)
    _check_number(doc, "measurement_distance", low=0.0, strict_low=True)
    _require(isinstance(doc["highway_count"], int) and doc["highway_count"] >= 0,
             "highway_count", "expected a non-negative integer")
    _require(isinstance(doc["ramp_count"], int) and doc["ramp_count"] in (0, 1),
             "ramp_count", "expected 0 or 1 (single merging vehicle)")
    _check_number(doc, "ramp_initial_speed", low=0.0)
    _check_number(doc, "ramp_spawn_delay", low=0.0)
    _check_number(doc, "highway_desired_speed", low=0.0, strict_low=True)
    _check_number(doc, "cacc_time_gap", low=0.0, strict_low=True)
    _require(doc["geometry"]["source"] in ("generated", "file"),
             "geometry.source", "must be 'generated' or 'file'")
    if doc["geometry"]["source"] == "file":
        _require(isinstance(doc["geometry"]["path"], str) and doc["geometry"]["path"],
                 "geometry.path", "required when source is 'file'")
    _check_number(doc, "spawn.spacing_min", low=0.0, strict_low=True)
    _check_number(doc, "spawn.spacing_max", low=doc["spawn"]["spacing_min"])
    _check_number(doc, "spawn.speed_min", low=0.0)
    _check_number(doc, "spawn.speed_max", low=doc["spawn"]["speed_min"])
    _check_number(doc, "v2i.range", low=0.0, strict_low=True)
    _require(isinstance(doc["v2i"]["infra_position"], list)
             and len(doc["v2i"]["infra_position"]) == 2,
             "v2i.infra_position", "expected [x, y]")
    _check_number(doc, "v2i.entry_window", low=0.0, strict_low=True)
    _check_number(doc, "sequencing.v_lim", low=0.0, strict_low=True)
    _check_number(doc, "sequencing.a_max", low=0.0, strict_low=True)
    _check_number(doc, "sequencing.t_head_safe", low=0.0, strict_low=True)
    _check_number(doc, "sequencing.sort_period", low=doc["control"]["period"])
    _check_number(doc, "gains.delta", low=0.0, strict_low=True)
    _check_number(doc, "gains.gamma", low=0.0, strict_low=True)
    _check_number(doc, "gains.s_head_safe", low=0.0, strict_low=True)
    _check_number(doc, "gains.s_standstill", low=0.0)
    _check_number(doc, "limits.a_max", low=0.0, strict_low=True)
    _check_number(doc, "limits.a_min", high=0.0)
    _require(doc["limits"]["a_min"] < 0.0, "limits.a_min", "must be negative")
    _check_number(doc, "limits.a_emergency", high=doc["limits"]["a_min"])
    _check_number(doc, "control.period", low=doc["dt"])
    _check_number(doc, "control.ttc_bound", low=0.0, strict_low=True)
    _check_number(doc, "control.ttc_hysteresis", low=0.0)
    _check_number(doc, "control.radar_range", low=0.0, strict_low=True)
    _check_number(doc, "control.merge_overlap", low=0.0)
    _check_number(doc, "vehicle.length", low=0.0, strict_low=True)
    _check_number(doc, "vehicle.mass_t", low=0.0, strict_low=True)
    variant = doc["driver"]["variant"]
    _require(variant is None or (isinstance(variant, int) and 0 <= variant <= 3),
             "driver.variant", "expected null or an integer in [0, 3]")
    _check_number(doc, "pedals.drive_max", low=0.0, strict_low=True)
    _check_number(doc, "pedals.brake_max", low=0.0, strict_low=True)
    period_steps = doc["control"]["period"] / doc["dt"]
    _require(abs(period_steps - round(period_steps)) < 1e-9,
             "control.period", "must be an integer multiple of dt")
    sort_steps = doc["sequencing"]["sort_period"] / doc["control"]["period"]
    _require(abs(sort_steps - round(sort_steps)) < 1e-9,
             "sequencing.sort_period", "must be an integer multiple of control.period")
    return Scenario(doc=doc)


def read_scenario(filename: str) -> Scenario:
    try:
        with open(filename, encoding="utf-8") as fh:
            document = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{filename}: {exc}") from exc
    if not isinstance(document, dict):
        raise ScenarioParseError(f"{filename}: top level must be an object")
    return load_scenario(document)


def parse_override(text: str) -> tuple[list[str], Any]:
    """Parse a 'dotted.path=value' override; value is a JSON literal when
    possible, else a bare string."""
    if "=" not in text:
        raise ScenarioParseError(f"override {text!r}: expected key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.split("."), value


def apply_overrides(document: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """Apply dotted-path overrides onto a raw scenario document."""
    doc = copy.deepcopy(document)
    for text in overrides:
        parts, value = parse_override(text)
        node = doc
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ScenarioParseError(f"override {text!r}: {part} is not an object")
        node[parts[-1]] = value
    return doc
