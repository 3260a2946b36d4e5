"""Curvature-limited target speed.

Resample the path ahead of the vehicle at fixed arc-length spacing, treat
every three consecutive samples as a quadratic Bezier, take the largest
closed-form maximum curvature and convert it to the speed that keeps
lateral acceleration at ``a_lat * g``. The first sample is the vehicle
position itself, so a vehicle far from the path sees a sharp first curve
and slows down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import bezier
from .geometry import Path, Point3, Projection, resample_from

EPS_KAPPA = 1e-9


@dataclass(frozen=True)
class TargetSpeedParams:
    a_lat: float = 0.4
    g: float = 9.81
    spacing_dh: float = 6.0
    count_n: int = 5
    v_min: float = 1.0
    v_max: float = 10.0
    kappa_cap: float = bezier.DEFAULT_KAPPA_CAP

    def __post_init__(self):
        if not self.a_lat > 0:
            raise ValueError(f"a_lat must be > 0, got {self.a_lat}")
        if not self.g > 0:
            raise ValueError(f"g must be > 0, got {self.g}")
        if not self.spacing_dh > 0:
            raise ValueError(f"spacing_dh must be > 0, got {self.spacing_dh}")
        if int(self.count_n) != self.count_n or self.count_n < 3:
            raise ValueError(f"count_n must be an integer >= 3, got {self.count_n}")
        if not self.v_min > 0:
            raise ValueError(f"v_min must be > 0, got {self.v_min}")
        if not self.v_max >= self.v_min:
            raise ValueError(f"v_max ({self.v_max}) must be >= v_min ({self.v_min})")
        if not self.kappa_cap > 0:
            raise ValueError(f"kappa_cap must be > 0, got {self.kappa_cap}")


@dataclass(frozen=True)
class TargetSpeedOutput:
    v_target: float
    kappa_max_used: float
    lookahead_points: list[Point3] = field(default_factory=list)


def critical_speed(kappa: float, params: TargetSpeedParams) -> float:
    """Unclamped sqrt(a_lat * g / kappa); ``inf`` for a straight path."""
    if not kappa >= 0:
        raise ValueError(f"curvature must be >= 0, got {kappa}")
    if kappa < EPS_KAPPA:
        return math.inf
    return math.sqrt(params.a_lat * params.g / kappa)


def compute_target_speed(
    r,
    path: Path,
    params: TargetSpeedParams,
    projection: Projection | None = None,
) -> TargetSpeedOutput:
    pts = resample_from(path, r, params.spacing_dh, params.count_n, projection)
    kappa_max = 0.0
    # fewer than three points means nothing left to curve; arrival is handled elsewhere
    for i in range(len(pts) - 2):
        kappa, _ = bezier.max_curvature_of(pts[i], pts[i + 1], pts[i + 2], params.kappa_cap)
        if kappa > kappa_max:
            kappa_max = kappa
    v = critical_speed(kappa_max, params)
    v = min(max(v, params.v_min), params.v_max)
    return TargetSpeedOutput(v, kappa_max, pts)
