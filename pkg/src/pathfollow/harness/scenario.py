"""Scenario definitions and their YAML file format.

A scenario file looks like::

    format_version: 1
    name: hairpin_car
    path:
      generator: hairpin        # or  waypoints: [[x, y, z], ...]
      radius: 8.0
    corridor_half_width: 3.0
    vehicle:
      preset: car               # optional; remaining keys override it
    follower:
      variant: Proposed
      target_speed: {a_lat: 0.4}
    env:
      walls: [{a: [30, -2], b: [30, 2]}]
      slopes: [{center: [40, 0], radius: 15, grade: 0.2, uphill_heading: 0.0}]
    time_limit: 120
    goal_radius: 2.0

All quantities are SI. Omitted follower gains are derived from the vehicle
and speed limits.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Any

import yaml

from ..follower import FollowerConfig, Variant
from ..geometry import Path, PathError
from ..sim import PRESETS, Environment, ModelKind, SlopeRegion, VehicleModelParams, WallSegment
from ..speed_control import PiParams, default_gains
from ..steering import PurePursuitParams, k_steer_for_steer_angle, k_steer_for_turn_rate
from ..stuck import StuckParams
from ..target_speed import TargetSpeedParams
from .paths import GENERATORS

FORMAT_VERSION = 1


class ScenarioError(ValueError):
    """Malformed scenario; ``field`` is the dotted path of the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field or '<root>'}: {message}")


@dataclass(frozen=True)
class Scenario:
    name: str
    path_spec: dict
    path: Path
    vehicle: VehicleModelParams
    follower: FollowerConfig
    env: Environment = field(default_factory=Environment)
    time_limit: float = 120.0
    goal_radius: float = 2.0
    vehicle_preset: str | None = None

    @property
    def corridor_half_width(self) -> float:
        return self.path.corridor_half_width

    def with_variant(self, variant) -> "Scenario":
        return dataclasses.replace(self, follower=self.follower.with_variant(variant))


def _join(prefix: str, key: str) -> str:
    return f"{prefix}.{key}" if prefix else key


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(where, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ScenarioError(where, f"expected a finite number, got {value!r}")
    return float(value)


def _mapping(value: Any, where: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ScenarioError(where, f"expected a mapping, got {type(value).__name__}")
    return value


def _build(cls, data: dict, where: str, **extra):
    """Instantiate dataclass ``cls`` from ``data``, type-checking against field defaults."""
    known = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = dict(extra)
    for key, value in data.items():
        here = _join(where, str(key))
        if key not in known:
            raise ScenarioError(here, "unknown field")
        default = known[key].default
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ScenarioError(here, f"expected true/false, got {value!r}")
        elif isinstance(default, enum.Enum):
            try:
                value = type(default)(value)
            except ValueError:
                options = ", ".join(m.value for m in type(default))
                raise ScenarioError(here, f"expected one of {options}, got {value!r}") from None
        elif isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ScenarioError(here, f"expected an integer, got {value!r}")
        elif isinstance(default, float):
            value = _number(value, here)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        msg = str(exc)
        name = msg.split(" ", 1)[0]
        raise ScenarioError(_join(where, name) if name in known else where, msg) from None


def _parse_path(data: Any, corridor: float) -> tuple[dict, Path]:
    spec = _mapping(data, "path")
    if "waypoints" in spec:
        extra = set(spec) - {"waypoints"}
        if extra:
            raise ScenarioError(_join("path", sorted(extra)[0]), "unknown field next to waypoints")
        wps = spec["waypoints"]
        if not isinstance(wps, list):
            raise ScenarioError("path.waypoints", "expected a list of points")
        for i, p in enumerate(wps):
            if not isinstance(p, list) or len(p) not in (2, 3):
                raise ScenarioError(f"path.waypoints[{i}]", "expected [x, y] or [x, y, z]")
            for k, c in enumerate(p):
                _number(c, f"path.waypoints[{i}][{k}]")
        pts = wps
    elif "generator" in spec:
        kind = spec["generator"]
        if kind not in GENERATORS:
            raise ScenarioError("path.generator", f"expected one of {', '.join(GENERATORS)}, got {kind!r}")
        kwargs = {}
        for key, value in spec.items():
            if key == "generator":
                continue
            here = _join("path", key)
            kwargs[key] = int(value) if key in ("seed", "n_ctrl", "legs") else _number(value, here)
        try:
            pts = GENERATORS[kind](**kwargs)
        except TypeError as exc:
            raise ScenarioError("path", str(exc)) from None
    else:
        raise ScenarioError("path", "needs either 'waypoints' or 'generator'")
    try:
        return dict(spec), Path(pts, corridor)
    except PathError as exc:
        raise ScenarioError("path", str(exc)) from None


def _parse_vehicle(data: Any) -> tuple[VehicleModelParams, str | None]:
    spec = dict(_mapping(data, "vehicle"))
    preset = spec.pop("preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise ScenarioError("vehicle.preset", f"expected one of {', '.join(PRESETS)}, got {preset!r}")
        base = dataclasses.asdict(PRESETS[preset])
        base.update(spec)
        spec = base
    return _build(VehicleModelParams, spec, "vehicle"), preset


def default_pursuit(vehicle: VehicleModelParams) -> dict:
    if vehicle.kind is ModelKind.TRACKED:
        k = k_steer_for_turn_rate(vehicle.max_yaw_rate)
    else:
        k = k_steer_for_steer_angle(vehicle.max_steer_angle)
    return {"wheelbase_l": vehicle.wheelbase_l, "k_steer": k, "min_lookahead_l0": max(3.0, vehicle.wheelbase_l)}


def _parse_follower(data: Any, vehicle: VehicleModelParams) -> FollowerConfig:
    spec = _mapping(data, "follower")
    unknown = set(spec) - {"variant", "target_speed", "pi", "pursuit", "stuck"}
    if unknown:
        raise ScenarioError(_join("follower", sorted(unknown)[0]), "unknown field")
    target = _build(TargetSpeedParams, _mapping(spec.get("target_speed"), "follower.target_speed"),
                    "follower.target_speed")

    pi_spec = dict(_mapping(spec.get("pi"), "follower.pi"))
    u_min = pi_spec.get("u_min", PiParams.u_min)
    u_max = pi_spec.get("u_max", PiParams.u_max)
    if "kp" not in pi_spec or "ki" not in pi_spec:
        try:
            kp, ki = default_gains(_number(u_min, "follower.pi.u_min"), _number(u_max, "follower.pi.u_max"),
                                   target.v_max)
        except ValueError as exc:
            raise ScenarioError("follower.pi", str(exc)) from None
        pi_spec.setdefault("kp", kp)
        pi_spec.setdefault("ki", ki)
    pi = _build(PiParams, pi_spec, "follower.pi")

    pursuit_spec = default_pursuit(vehicle)
    pursuit_spec.update(_mapping(spec.get("pursuit"), "follower.pursuit"))
    pursuit = _build(PurePursuitParams, pursuit_spec, "follower.pursuit")
    stuck = _build(StuckParams, _mapping(spec.get("stuck"), "follower.stuck"), "follower.stuck")

    variant = spec.get("variant", Variant.PROPOSED.value)
    try:
        variant = Variant(variant)
    except ValueError:
        raise ScenarioError("follower.variant", f"expected Proposed or Baseline, got {variant!r}") from None
    return FollowerConfig(target, pi, pursuit, stuck, variant)


def _xy(value: Any, where: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ScenarioError(where, "expected [x, y]")
    return (_number(value[0], f"{where}[0]"), _number(value[1], f"{where}[1]"))


def _parse_env(data: Any) -> Environment:
    spec = _mapping(data, "env")
    unknown = set(spec) - {"walls", "slopes"}
    if unknown:
        raise ScenarioError(_join("env", sorted(unknown)[0]), "unknown field")
    walls = []
    for i, w in enumerate(spec.get("walls") or []):
        here = f"env.walls[{i}]"
        w = _mapping(w, here)
        if set(w) != {"a", "b"}:
            raise ScenarioError(here, "expected keys a and b")
        walls.append(WallSegment(_xy(w["a"], f"{here}.a"), _xy(w["b"], f"{here}.b")))
    slopes = []
    for i, r in enumerate(spec.get("slopes") or []):
        here = f"env.slopes[{i}]"
        r = _mapping(r, here)
        missing = {"center", "radius", "grade", "uphill_heading"} - set(r)
        if missing:
            raise ScenarioError(_join(here, sorted(missing)[0]), "missing field")
        radius = _number(r["radius"], f"{here}.radius")
        if radius <= 0:
            raise ScenarioError(f"{here}.radius", "must be > 0")
        slopes.append(SlopeRegion(_xy(r["center"], f"{here}.center"), radius,
                                  _number(r["grade"], f"{here}.grade"),
                                  _number(r["uphill_heading"], f"{here}.uphill_heading")))
    return Environment(tuple(walls), tuple(slopes))


TOP_LEVEL = {"format_version", "name", "path", "corridor_half_width", "vehicle", "follower", "env",
             "time_limit", "goal_radius"}


def scenario_from_dict(data: Any) -> Scenario:
    data = _mapping(data, "")
    unknown = set(data) - TOP_LEVEL
    if unknown:
        raise ScenarioError(sorted(unknown)[0], "unknown field")
    version = data.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ScenarioError("format_version", f"unsupported version {version!r}")
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioError("name", "expected a non-empty string")
    corridor = _number(data.get("corridor_half_width", 3.0), "corridor_half_width")
    if corridor <= 0:
        raise ScenarioError("corridor_half_width", "must be > 0")
    path_spec, path = _parse_path(data.get("path"), corridor)
    vehicle, preset = _parse_vehicle(data.get("vehicle"))
    follower = _parse_follower(data.get("follower"), vehicle)
    env = _parse_env(data.get("env"))
    time_limit = _number(data.get("time_limit", 120.0), "time_limit")
    if time_limit <= 0:
        raise ScenarioError("time_limit", "must be > 0")
    goal_radius = _number(data.get("goal_radius", 2.0), "goal_radius")
    if goal_radius <= 0:
        raise ScenarioError("goal_radius", "must be > 0")
    return Scenario(name, path_spec, path, vehicle, follower, env, time_limit, goal_radius, preset)


def load_scenario(filename) -> Scenario:
    text = FsPath(filename).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError("", f"invalid YAML: {exc}") from None
    return scenario_from_dict(data)


def _plain(obj):
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def scenario_to_dict(scenario: Scenario) -> dict:
    f = scenario.follower
    return {
        "format_version": FORMAT_VERSION,
        "name": scenario.name,
        "path": _plain(scenario.path_spec),
        "corridor_half_width": scenario.corridor_half_width,
        "vehicle": _plain(dataclasses.asdict(scenario.vehicle)),
        "follower": {
            "variant": f.controller_variant.value,
            "target_speed": dataclasses.asdict(f.target_speed),
            "pi": dataclasses.asdict(f.pi),
            "pursuit": dataclasses.asdict(f.pursuit),
            "stuck": dataclasses.asdict(f.stuck),
        },
        "env": {
            "walls": [{"a": list(w.a), "b": list(w.b)} for w in scenario.env.walls],
            "slopes": [
                {"center": list(r.center), "radius": r.radius, "grade": r.grade, "uphill_heading": r.uphill_heading}
                for r in scenario.env.slopes
            ],
        },
        "time_limit": scenario.time_limit,
        "goal_radius": scenario.goal_radius,
    }


def save_scenario(scenario_or_dict, filename) -> None:
    data = scenario_or_dict if isinstance(scenario_or_dict, dict) else scenario_to_dict(scenario_or_dict)
    FsPath(filename).write_text(yaml.safe_dump(data, sort_keys=False))
