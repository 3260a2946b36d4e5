"""Fixed-step kinematic vehicle models and the scenario environment.

Three plants are provided:

``Bicycle``      kinematic bicycle, steering angle slewed toward
                 ``steer * max_steer_angle`` at ``steer_rate_limit``.
``Tracked``      differential drive, yaw rate ``steer * max_yaw_rate``
                 regardless of speed.
``LowTraction``  bicycle whose yaw rate and acceleration are scaled by
                 ``traction_factor`` (hovercraft-like).

All share the longitudinal law ``dv/dt = accel_gain * throttle - drag * v
- slope_decel``. Each step updates speed first and then the pose from the
new state. Speed is advanced with the exact solution of the linear law over
the step; displacement uses the mean of old and new speed along the
mid-step heading, and the yaw rate uses the step-averaged steering angle
of the slew. Dynamics are planar; z is carried along unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple

from .geometry import Point3

GRAVITY = 9.81
MAX_DT = 0.1


def wrap_angle(a: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


class ModelKind(str, Enum):
    BICYCLE = "Bicycle"
    TRACKED = "Tracked"
    LOW_TRACTION = "LowTraction"


@dataclass(frozen=True)
class VehicleModelParams:
    kind: ModelKind = ModelKind.BICYCLE
    wheelbase_l: float = 2.5
    max_steer_angle: float = 0.6
    steer_rate_limit: float = 2.0
    accel_gain: float = 4.0
    drag: float = 0.1
    max_yaw_rate: float = 1.0
    traction_factor: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        for name in ("wheelbase_l", "max_steer_angle", "steer_rate_limit", "accel_gain", "max_yaw_rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive number, got {value}")
        if not (math.isfinite(self.drag) and self.drag >= 0):
            raise ValueError(f"drag must be >= 0, got {self.drag}")
        if not 0 < self.traction_factor <= 1:
            raise ValueError(f"traction_factor must lie in (0, 1], got {self.traction_factor}")


PRESETS = {
    "car": VehicleModelParams(ModelKind.BICYCLE, wheelbase_l=2.5, max_steer_angle=0.6,
                              steer_rate_limit=2.0, accel_gain=4.0, drag=0.1),
    "tank": VehicleModelParams(ModelKind.TRACKED, wheelbase_l=3.5, max_steer_angle=0.6,
                               accel_gain=2.5, drag=0.12, max_yaw_rate=0.7),
    "hover": VehicleModelParams(ModelKind.LOW_TRACTION, wheelbase_l=3.0, max_steer_angle=0.5,
                                steer_rate_limit=1.5, accel_gain=3.0, drag=0.05, traction_factor=0.55),
}


class ControlCommand(NamedTuple):
    throttle: float
    steer: float

    @classmethod
    def clamped(cls, throttle: float, steer: float, u_min: float = -1.0, u_max: float = 1.0,
                steer_max: float = 1.0) -> "ControlCommand":
        return cls(min(max(throttle, u_min), u_max), min(max(steer, -steer_max), steer_max))


@dataclass(frozen=True, slots=True)
class VehicleState:
    position: Point3
    heading: float
    v: float = 0.0
    wheelbase_l: float = 2.5
    steer_angle: float = 0.0

    def __post_init__(self):
        if type(self.position) is not Point3:
            object.__setattr__(self, "position", Point3(*self.position))
        if not (all(math.isfinite(c) for c in self.position) and math.isfinite(self.heading)
                and math.isfinite(self.v)):
            raise ValueError(f"non-finite vehicle state: {self}")
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    @property
    def forward(self) -> Point3:
        return Point3(math.cos(self.heading), math.sin(self.heading), 0.0)


@dataclass(frozen=True)
class WallSegment:
    a: tuple[float, float]
    b: tuple[float, float]


@dataclass(frozen=True)
class SlopeRegion:
    """Circular patch of incline; ``grade`` is the sine of the slope angle."""

    center: tuple[float, float]
    radius: float
    grade: float
    uphill_heading: float

    def contains(self, x: float, y: float) -> bool:
        return (x - self.center[0]) ** 2 + (y - self.center[1]) ** 2 <= self.radius**2


@dataclass(frozen=True)
class Environment:
    walls: tuple[WallSegment, ...] = field(default_factory=tuple)
    slopes: tuple[SlopeRegion, ...] = field(default_factory=tuple)
    g: float = GRAVITY

    def slope_decel(self, x: float, y: float, heading: float) -> float:
        total = 0.0
        for region in self.slopes:
            if region.contains(x, y):
                total += self.g * region.grade * math.cos(heading - region.uphill_heading)
        return total

    def blocks(self, x0: float, y0: float, x1: float, y1: float) -> bool:
        return any(_segments_intersect(x0, y0, x1, y1, *w.a, *w.b) for w in self.walls)


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _segments_intersect(px, py, qx, qy, ax, ay, bx, by) -> bool:
    d1 = _orient(ax, ay, bx, by, px, py)
    d2 = _orient(ax, ay, bx, by, qx, qy)
    d3 = _orient(px, py, qx, qy, ax, ay)
    d4 = _orient(px, py, qx, qy, bx, by)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    # touching the wall from the approach side counts as contact, leaving it does not
    if d2 == 0 and d1 != 0:
        lo_x, hi_x = sorted((ax, bx))
        lo_y, hi_y = sorted((ay, by))
        return lo_x <= qx <= hi_x and lo_y <= qy <= hi_y
    return False


NO_ENV = Environment()


def step(model: VehicleModelParams, state: VehicleState, cmd: ControlCommand,
         env: Environment = NO_ENV, dt: float = 1.0 / 60.0) -> VehicleState:
    if not 0.0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, {MAX_DT}], got {dt}")
    throttle = min(max(cmd.throttle, -1.0), 1.0)
    steer = min(max(cmd.steer, -1.0), 1.0)
    x, y, z = state.position
    heading = state.heading
    v = state.v
    traction = model.traction_factor if model.kind is ModelKind.LOW_TRACTION else 1.0

    accel = traction * (model.accel_gain * throttle - env.slope_decel(x, y, heading))
    drag = traction * model.drag
    # exact solution of dv/dt = accel - drag * v with accel held over the step
    if drag * dt > 1e-12:
        v_new = accel / drag + (v - accel / drag) * math.exp(-drag * dt)
    else:
        v_new = v + accel * dt
    v_avg = 0.5 * (v + v_new)

    delta = state.steer_angle
    if model.kind is ModelKind.TRACKED:
        yaw_rate = steer * model.max_yaw_rate
    else:
        goal = steer * model.max_steer_angle
        gap = goal - delta
        slew = model.steer_rate_limit * dt
        if abs(gap) <= slew:
            # reaches the goal after a fraction f of the step, then holds it
            f = abs(gap) / slew
            delta_avg = goal - 0.5 * f * gap
            delta = goal
        else:
            move = slew if gap > 0 else -slew
            delta_avg = delta + 0.5 * move
            delta += move
        yaw_rate = traction * v_avg * math.tan(delta_avg) / model.wheelbase_l

    heading_new = heading + yaw_rate * dt
    mid = 0.5 * (heading + heading_new)
    ds = v_avg * dt
    x_new = x + ds * math.cos(mid)
    y_new = y + ds * math.sin(mid)

    if env.walls and env.blocks(x, y, x_new, y_new):
        x_new, y_new, v_new = x, y, 0.0

    return VehicleState(Point3(x_new, y_new, z), heading_new, v_new, model.wheelbase_l, delta)


def teleport(state: VehicleState, position, heading: float) -> VehicleState:
    """Place the vehicle at rest at a new pose."""
    return replace(state, position=Point3(*position), heading=heading, v=0.0, steer_angle=0.0)
