"""Pure-pursuit steering.

Positive steering turns left (counter-clockwise seen from above). The
heading error ``alpha`` is measured in the ground plane between the
vehicle's forward vector and the rear-axle-to-target vector, and the
steering angle follows the bicycle-model arc through the target:

    delta = atan(2 L sin(alpha) / l_d)

The lookahead grows linearly with forward speed but falls back to its
minimum whenever the vehicle leaves the corridor, so it turns back
towards the path more aggressively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .geometry import Path, Point3, Projection, point_at_arclength, project

EPS_TARGET = 1e-6
_new = tuple.__new__


@dataclass(frozen=True)
class PurePursuitParams:
    min_lookahead_l0: float = 3.0
    speed_gain_gamma: float = 0.5
    wheelbase_l: float = 2.5
    k_steer: float = 1.0 / 0.6
    u_steer_max: float = 1.0

    def __post_init__(self):
        if not self.wheelbase_l > 0:
            raise ValueError(f"wheelbase_l must be > 0, got {self.wheelbase_l}")
        if not self.min_lookahead_l0 >= self.wheelbase_l:
            raise ValueError(
                f"min_lookahead_l0 ({self.min_lookahead_l0}) must be >= wheelbase_l ({self.wheelbase_l})"
            )
        if not self.speed_gain_gamma >= 0:
            raise ValueError(f"speed_gain_gamma must be >= 0, got {self.speed_gain_gamma}")
        if not self.k_steer > 0:
            raise ValueError(f"k_steer must be > 0, got {self.k_steer}")
        if not self.u_steer_max > 0:
            raise ValueError(f"u_steer_max must be > 0, got {self.u_steer_max}")


class SteerComputation(NamedTuple):
    lookahead_ld: float
    target_point: Point3
    alpha: float
    steer_angle_delta: float
    command: float
    degenerate: bool = False


def k_steer_for_steer_angle(max_steer_angle: float, u_steer_max: float = 1.0) -> float:
    """Gain that saturates the command exactly at the vehicle's steering lock."""
    if not max_steer_angle > 0:
        raise ValueError(f"max_steer_angle must be > 0, got {max_steer_angle}")
    return u_steer_max / max_steer_angle


def k_steer_for_turn_rate(max_yaw_rate: float, scale: float = 2.0) -> float:
    """Gain for differential-steer (tracked) vehicles, inversely proportional to turn rate.

    ``scale`` is the yaw rate per radian of pursuit angle the vehicle should
    achieve; about v / L for the speeds it is driven at.
    """
    if not max_yaw_rate > 0:
        raise ValueError(f"max_yaw_rate must be > 0, got {max_yaw_rate}")
    return scale / max_yaw_rate


def rear_axle_position(position, heading: float, wheelbase: float) -> Point3:
    """Rear axle sits half a wheelbase behind the centre of mass."""
    h = 0.5 * wheelbase
    return _new(Point3, (position[0] - h * math.cos(heading), position[1] - h * math.sin(heading), position[2]))


def lookahead_distance(v: float, inside_corridor: bool, params: PurePursuitParams) -> float:
    if not inside_corridor or v <= 0.0:
        return params.min_lookahead_l0
    return params.min_lookahead_l0 + params.speed_gain_gamma * v


def compute_target_point(
    path: Path, rear_axle, lookahead: float, projection: Projection | None = None
) -> Point3:
    if not lookahead > 0:
        raise ValueError(f"lookahead must be > 0, got {lookahead}")
    if projection is None:
        projection = project(path, rear_axle)
    return point_at_arclength(path, projection.arclength_s + lookahead)


def pure_pursuit_command(state, target, params: PurePursuitParams) -> SteerComputation:
    """Steering for a vehicle ``state`` (anything with position, heading, wheelbase_l)."""
    rear = rear_axle_position(state.position, state.heading, state.wheelbase_l)
    return pure_pursuit_from_rear_axle(rear, state.heading, target, params)


def pure_pursuit_from_rear_axle(rear, heading: float, target, params: PurePursuitParams) -> SteerComputation:
    dx = target[0] - rear[0]
    dy = target[1] - rear[1]
    dz = target[2] - rear[2]
    ld = math.sqrt(dx * dx + dy * dy + dz * dz)
    if type(target) is not Point3:
        target = Point3(*target)
    if ld < EPS_TARGET or dx * dx + dy * dy < EPS_TARGET * EPS_TARGET:
        return SteerComputation(ld, target, 0.0, 0.0, 0.0, True)
    fx = math.cos(heading)
    fy = math.sin(heading)
    alpha = math.atan2(fx * dy - fy * dx, fx * dx + fy * dy)
    delta = math.atan(2.0 * params.wheelbase_l * math.sin(alpha) / ld)
    limit = params.u_steer_max
    command = params.k_steer * delta
    if command > limit:
        command = limit
    elif command < -limit:
        command = -limit
    return _new(SteerComputation, (ld, target, alpha, delta, command, False))
