"""Per-tick path follower: target speed, PI throttle, pure-pursuit steering
and stuck recovery, composed in that order.

Two variants share everything except the speed pipeline:

* ``Proposed`` uses the Bezier curvature target speed and the PI controller.
* ``Baseline`` reconstructs the heuristic it is compared against: target
  speed falls linearly with the largest angle between the vehicle's
  forward vector and any path segment within the lookahead, and speed is
  held with a P-only controller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple

from .geometry import Path, Point3, Projection, point_at_arclength, project
from .sim import ControlCommand, VehicleState
from .speed_control import PiParams, PiSpeedController
from .steering import (
    PurePursuitParams,
    lookahead_distance,
    pure_pursuit_from_rear_axle,
    rear_axle_position,
)
from .stuck import StuckManager, StuckMode, StuckParams
from .target_speed import TargetSpeedParams, compute_target_speed


class Variant(str, Enum):
    PROPOSED = "Proposed"
    BASELINE = "Baseline"


@dataclass(frozen=True)
class FollowerConfig:
    target_speed: TargetSpeedParams = field(default_factory=TargetSpeedParams)
    pi: PiParams = field(default_factory=PiParams)
    pursuit: PurePursuitParams = field(default_factory=PurePursuitParams)
    stuck: StuckParams = field(default_factory=StuckParams)
    controller_variant: Variant = Variant.PROPOSED

    def __post_init__(self):
        object.__setattr__(self, "controller_variant", Variant(self.controller_variant))

    def with_variant(self, variant) -> "FollowerConfig":
        return replace(self, controller_variant=Variant(variant))


class TeleportDirective(NamedTuple):
    position: Point3
    heading: float


class TickTelemetry(NamedTuple):
    v_target: float
    kappa_max: float
    cte: float
    inside_corridor: bool
    lookahead_ld: float
    alpha: float
    stuck_mode: StuckMode
    command: ControlCommand
    s_progress: float
    teleport: TeleportDirective | None = None


def baseline_target_speed(
    vehicle: VehicleState,
    path: Path,
    params: TargetSpeedParams,
    projection: Projection | None = None,
) -> float:
    """Target speed from the largest heading-to-segment angle ahead.

    theta_max is taken over path segments overlapping the arc-length window
    [s, s + spacing_dh * count_n] ahead of the vehicle's projection, and
    ``v = v_max * (1 - theta_max / pi)`` clamped to [v_min, v_max].
    """
    if projection is None:
        projection = project(path, vehicle.position)
    fx = math.cos(vehicle.heading)
    fy = math.sin(vehicle.heading)
    cum = path.cumulative_arclength
    wp = path.waypoints
    s_end = projection.arclength_s + params.spacing_dh * params.count_n
    theta_max = 0.0
    j = projection.segment_index
    while j < len(wp) - 1 and cum[j] < s_end:
        dx = wp[j + 1][0] - wp[j][0]
        dy = wp[j + 1][1] - wp[j][1]
        n = math.hypot(dx, dy)
        if n > 1e-9:
            c = min(max((fx * dx + fy * dy) / n, -1.0), 1.0)
            theta_max = max(theta_max, math.acos(c))
        j += 1
    v = params.v_max * (1.0 - theta_max / math.pi)
    return min(max(v, params.v_min), params.v_max)


class PathFollower:
    """Owns the controller state for one vehicle."""

    def __init__(self, config: FollowerConfig | None = None):
        self.config = config = config or FollowerConfig()
        pi = config.pi
        if config.controller_variant is Variant.BASELINE:
            pi = replace(pi, ki=0.0)
        self.speed = PiSpeedController(pi)
        self.stuck = StuckManager(config.stuck)
        self.time = 0.0
        self._path: Path | None = None

    def tick(
        self,
        vehicle: VehicleState,
        path: Path,
        dt: float,
        speed_limit: float | None = None,
    ) -> tuple[ControlCommand, TickTelemetry]:
        """One control step. ``speed_limit`` caps the target speed (arrival taper)."""
        if not dt > 0:
            raise ValueError(f"dt must be > 0, got {dt}")
        cfg = self.config
        if path is not self._path:
            # keep the PI state across path swaps, but progress on the old path means nothing
            if self._path is not None:
                self.stuck.reset_history()
            self._path = path
        self.time += dt

        pos = vehicle.position
        proj = project(path, pos)
        inside = proj.cross_track_error <= path.corridor_half_width

        if cfg.controller_variant is Variant.PROPOSED:
            ts = compute_target_speed(pos, path, cfg.target_speed, proj)
            v_target, kappa = ts.v_target, ts.kappa_max_used
        else:
            v_target = baseline_target_speed(vehicle, path, cfg.target_speed, proj)
            kappa = math.nan
        if speed_limit is not None and speed_limit < v_target:
            v_target = speed_limit

        throttle = self.speed.update(v_target, vehicle.v, dt)

        pursuit = cfg.pursuit
        rear = rear_axle_position(pos, vehicle.heading, vehicle.wheelbase_l)
        ld = lookahead_distance(vehicle.v, inside, pursuit)
        rear_s = project(path, rear).arclength_s
        target = point_at_arclength(path, rear_s + ld)
        steer = pure_pursuit_from_rear_axle(rear, vehicle.heading, target, pursuit)

        base = ControlCommand(throttle, steer.command)
        status = self.stuck.observe(proj.arclength_s, throttle, self.time)
        cmd = self.stuck.recovery_override(
            base, dt, self.speed.params.u_min, self.speed.params.u_max, pursuit.u_steer_max
        )

        teleport = None
        if self.stuck.teleport_pending:
            tangent = path.tangent_at(proj.arclength_s)
            teleport = TeleportDirective(proj.closest_point, math.atan2(tangent.y, tangent.x))

        telemetry = TickTelemetry(
            v_target, kappa, proj.cross_track_error, inside, steer.lookahead_ld, steer.alpha,
            status.mode, cmd, proj.arclength_s, teleport,
        )
        return cmd, telemetry
