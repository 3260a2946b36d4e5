"""Quadratic Bezier curves and their maximum curvature.

The maximum curvature of a quadratic Bezier has a closed form. Draw the
two spheres of radius r = |p1 - m| / 2 centred at (p1 + m)/2 and
(p3 + m)/2, where m is the midpoint of p1p3. When the middle control
point lies outside both, curvature peaks inside the curve at

    kappa_max = |p2 - m|**3 / A**2

with A the area of the control triangle. Otherwise curvature is monotone
along the curve and the maximum is at an endpoint:

    kappa_max = max(A / |p1 - p2|**3, A / |p3 - p2|**3)

``max_curvature_sampled`` is a brute-force check of the same quantity and
is only meant for tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import Point3, as_point

DEFAULT_KAPPA_CAP = 10.0
EPS_AREA = 1e-9
EPS_VELOCITY = 1e-9
EPS_ENDPOINTS = 1e-6


class CurvatureCase(str, Enum):
    INTERIOR_MAX = "InteriorMax"
    ENDPOINT_MONOTONE = "EndpointMonotone"
    DEGENERATE_LINE = "DegenerateLine"
    DEGENERATE_CUSP = "DegenerateCusp"


@dataclass(frozen=True)
class QuadBezier:
    p1: Point3
    p2: Point3
    p3: Point3

    def __post_init__(self):
        for name in ("p1", "p2", "p3"):
            object.__setattr__(self, name, as_point(getattr(self, name)))

    def reversed(self) -> "QuadBezier":
        return QuadBezier(self.p3, self.p2, self.p1)


@dataclass(frozen=True)
class CurvatureAnalysis:
    kappa_max: float
    case_tag: CurvatureCase
    midpoint_m: Point3
    sphere_radius: float
    triangle_area_A: float


def _check_t(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"curve parameter must lie in [0, 1], got {t}")


def evaluate(curve: QuadBezier, t: float) -> Point3:
    _check_t(t)
    u = 1.0 - t
    a, b, c = u * u, 2.0 * u * t, t * t
    p1, p2, p3 = curve.p1, curve.p2, curve.p3
    return Point3(
        a * p1.x + b * p2.x + c * p3.x,
        a * p1.y + b * p2.y + c * p3.y,
        a * p1.z + b * p2.z + c * p3.z,
    )


def _cross(ax, ay, az, bx, by, bz):
    return ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx


def curvature_at(curve: QuadBezier, t: float, kappa_cap: float = DEFAULT_KAPPA_CAP) -> float:
    """|B' x B''| / |B'|**3, or ``kappa_cap`` where the velocity vanishes."""
    _check_t(t)
    p1, p2, p3 = curve.p1, curve.p2, curve.p3
    u = 1.0 - t
    # B'(t) = 2[(1 - t)(p2 - p1) + t(p3 - p2)],  B'' = 2(p3 - 2 p2 + p1)
    d1 = (
        2.0 * (u * (p2.x - p1.x) + t * (p3.x - p2.x)),
        2.0 * (u * (p2.y - p1.y) + t * (p3.y - p2.y)),
        2.0 * (u * (p2.z - p1.z) + t * (p3.z - p2.z)),
    )
    d2 = (
        2.0 * (p3.x - 2.0 * p2.x + p1.x),
        2.0 * (p3.y - 2.0 * p2.y + p1.y),
        2.0 * (p3.z - 2.0 * p2.z + p1.z),
    )
    speed = math.sqrt(d1[0] ** 2 + d1[1] ** 2 + d1[2] ** 2)
    if speed < EPS_VELOCITY:
        return kappa_cap
    cx, cy, cz = _cross(*d1, *d2)
    return math.sqrt(cx * cx + cy * cy + cz * cz) / speed**3


def max_curvature_of(p1, p2, p3, kappa_cap: float = DEFAULT_KAPPA_CAP) -> tuple[float, CurvatureCase]:
    """Closed-form maximum curvature for bare control points.

    Hot-path form used by the target-speed computation: no validation,
    returns only ``(kappa_max, case)``. Written in the edge vectors
    a = p2 - p1 and b = p3 - p2, so that

        p2 - m = (a - b) / 2,   A = |a x b| / 2,

    and p2 lies strictly outside the sphere on diameter p1m exactly when its
    power (p2 - p1).(p2 - m) is positive, i.e. |a|**2 > a.b (likewise
    |b|**2 > a.b for the sphere on diameter m p3).
    """
    x1, y1, z1 = p1
    x2, y2, z2 = p2
    x3, y3, z3 = p3
    ax = x2 - x1
    ay = y2 - y1
    az = z2 - z1
    bx = x3 - x2
    by = y3 - y2
    bz = z3 - z2
    ex = ax + bx
    ey = ay + by
    ez = az + bz
    chord2 = ex * ex + ey * ey + ez * ez
    if chord2 < EPS_ENDPOINTS * EPS_ENDPOINTS:
        return kappa_cap, CurvatureCase.DEGENERATE_CUSP

    cx = ay * bz - az * by
    cy = az * bx - ax * bz
    cz = ax * by - ay * bx
    cross2 = cx * cx + cy * cy + cz * cz  # (2A)**2
    if cross2 < 4.0 * EPS_AREA * EPS_AREA:
        # collinear: a straight segment if p2 projects inside p1p3, a cusp otherwise
        u = (ax * ex + ay * ey + az * ez) / chord2
        if 0.0 <= u <= 1.0:
            return 0.0, CurvatureCase.DEGENERATE_LINE
        return kappa_cap, CurvatureCase.DEGENERATE_CUSP

    aa = ax * ax + ay * ay + az * az
    bb = bx * bx + by * by + bz * bz
    ab = ax * bx + ay * by + az * bz
    if aa > ab and bb > ab:
        # |p2 - m|**3 / A**2 = |a - b|**3 / (2 |a x b|**2)
        dd = aa - 2.0 * ab + bb
        return dd * math.sqrt(dd) / (2.0 * cross2), CurvatureCase.INTERIOR_MAX
    # max(A / |a|**3, A / |b|**3): the shorter leg wins
    short2 = aa if aa < bb else bb
    return math.sqrt(cross2) / (2.0 * short2 * math.sqrt(short2)), CurvatureCase.ENDPOINT_MONOTONE


def max_curvature(curve: QuadBezier, kappa_cap: float = DEFAULT_KAPPA_CAP) -> CurvatureAnalysis:
    p1, p2, p3 = curve.p1, curve.p2, curve.p3
    kappa, case = max_curvature_of(p1, p2, p3, kappa_cap)
    m = Point3(0.5 * (p1.x + p3.x), 0.5 * (p1.y + p3.y), 0.5 * (p1.z + p3.z))
    cx, cy, cz = _cross(p1.x - p2.x, p1.y - p2.y, p1.z - p2.z, p1.x - p3.x, p1.y - p3.y, p1.z - p3.z)
    return CurvatureAnalysis(
        kappa_max=kappa,
        case_tag=case,
        midpoint_m=m,
        sphere_radius=0.5 * math.dist(p1, m),
        triangle_area_A=0.5 * math.sqrt(cx * cx + cy * cy + cz * cz),
    )


def _curvature_grid(curve: QuadBezier, t: np.ndarray, kappa_cap: float) -> np.ndarray:
    p1, p2, p3 = (np.asarray(p, dtype=float) for p in (curve.p1, curve.p2, curve.p3))
    d1 = 2.0 * ((1.0 - t)[:, None] * (p2 - p1) + t[:, None] * (p3 - p2))
    d2 = 2.0 * (p3 - 2.0 * p2 + p1)
    speed = np.linalg.norm(d1, axis=1)
    cross = np.linalg.norm(np.cross(d1, d2), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = cross / speed**3
    return np.where(speed < EPS_VELOCITY, kappa_cap, kappa)


def sampled_curvature_peak(
    curve: QuadBezier, samples: int = 16385, kappa_cap: float = DEFAULT_KAPPA_CAP
) -> tuple[float, float]:
    """Brute-force ``(kappa_max, t_argmax)`` by dense sampling plus golden-section refinement."""
    if samples < 3:
        raise ValueError("need at least 3 samples")
    t = np.linspace(0.0, 1.0, samples)
    kappa = _curvature_grid(curve, t, kappa_cap)
    i = int(np.argmax(kappa))
    lo = t[max(i - 1, 0)]
    hi = t[min(i + 1, samples - 1)]

    def f(x):
        return curvature_at(curve, x, kappa_cap)

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > 1e-12:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
    t_ref = 0.5 * (lo + hi)
    candidates = [(float(kappa[i]), float(t[i])), (f(t_ref), t_ref)]
    return max(candidates)


def max_curvature_sampled(curve: QuadBezier, samples: int = 16385, kappa_cap: float = DEFAULT_KAPPA_CAP) -> float:
    return sampled_curvature_peak(curve, samples, kappa_cap)[0]
