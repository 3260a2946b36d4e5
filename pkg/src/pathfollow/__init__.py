"""Ground-vehicle path following: curvature-limited target speed, PI throttle,
pure-pursuit steering and stuck recovery, plus a kinematic simulator and a
benchmark harness."""

from .bezier import CurvatureAnalysis, CurvatureCase, QuadBezier, max_curvature, max_curvature_of
from .follower import FollowerConfig, PathFollower, TickTelemetry, Variant
from .geometry import Path, PathError, Point3, Projection, project
from .sim import PRESETS, ControlCommand, Environment, ModelKind, VehicleModelParams, VehicleState, step
from .speed_control import PiParams, PiSpeedController, default_gains
from .steering import PurePursuitParams, pure_pursuit_command
from .stuck import StuckManager, StuckMode, StuckParams
from .target_speed import TargetSpeedParams, compute_target_speed, critical_speed

__version__ = "0.1.0"
