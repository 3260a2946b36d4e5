"""Waypoint generators for test scenarios. All return (n, 3) arrays."""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicSpline


def _resample_polyline(pts: np.ndarray, spacing: float) -> np.ndarray:
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    keep = np.concatenate(([True], seg > 1e-9))
    pts = pts[keep]
    cum = np.concatenate(([0.0], np.cumsum(seg[seg > 1e-9])))
    n = max(int(math.ceil(cum[-1] / spacing)), 1)
    s = np.linspace(0.0, cum[-1], n + 1)
    return np.column_stack([np.interp(s, cum, pts[:, k]) for k in range(pts.shape[1])])


def _with_z(xy: np.ndarray) -> np.ndarray:
    return np.column_stack([xy, np.zeros(len(xy))])


def straight(length: float = 100.0, spacing: float = 2.0) -> np.ndarray:
    n = max(int(math.ceil(length / spacing)), 1)
    x = np.linspace(0.0, length, n + 1)
    return _with_z(np.column_stack([x, np.zeros_like(x)]))


def circle(radius: float = 20.0, sweep_deg: float = 330.0, spacing: float = 2.0) -> np.ndarray:
    """Counter-clockwise arc starting at the origin heading +x."""
    sweep = math.radians(sweep_deg)
    n = max(int(math.ceil(radius * sweep / spacing)), 2)
    a = np.linspace(0.0, sweep, n + 1)
    return _with_z(np.column_stack([radius * np.sin(a), radius * (1.0 - np.cos(a))]))


def s_curve(length: float = 150.0, amplitude: float = 10.0, wavelength: float = 60.0,
            spacing: float = 2.0) -> np.ndarray:
    x = np.linspace(0.0, length, 4 * max(int(length / spacing), 1) + 1)
    y = amplitude * np.sin(2.0 * math.pi * x / wavelength)
    return _with_z(_resample_polyline(np.column_stack([x, y]), spacing))


def hairpin(radius: float = 8.0, leg_length: float = 50.0, spacing: float = 2.0) -> np.ndarray:
    """Straight leg, 180 degree left turn, straight leg back."""
    leg = np.column_stack([np.linspace(0.0, leg_length, 50), np.zeros(50)])
    a = np.linspace(-0.5 * math.pi, 0.5 * math.pi, 60)
    turn = np.column_stack([leg_length + radius * np.cos(a), radius + radius * np.sin(a)])
    back = np.column_stack([np.linspace(leg_length, 0.0, 50), np.full(50, 2.0 * radius)])
    return _with_z(_resample_polyline(np.vstack([leg, turn, back]), spacing))


def zigzag(leg_length: float = 20.0, legs: int = 6) -> np.ndarray:
    """Alternating right-angle corners, waypoints only at the corners and every 5 m."""
    pts = [(0.0, 0.0)]
    direction = np.array([1.0, 0.0])
    turn_left = True
    for _ in range(legs):
        end = np.asarray(pts[-1]) + leg_length * direction
        pts.append(tuple(end))
        c, s = (0.0, 1.0) if turn_left else (0.0, -1.0)
        direction = np.array([c * direction[0] - s * direction[1], s * direction[0] + c * direction[1]])
        turn_left = not turn_left
    return _with_z(_resample_polyline(np.asarray(pts), 5.0))


def random_spline(seed: int, n_ctrl: int = 8, step: float = 25.0, max_turn_deg: float = 70.0,
                  spacing: float = 2.0) -> np.ndarray:
    """Smooth random route through a heading-limited random walk of control points."""
    rng = np.random.default_rng(seed)
    heading = 0.0
    ctrl = [np.zeros(2)]
    for _ in range(n_ctrl - 1):
        heading += math.radians(rng.uniform(-max_turn_deg, max_turn_deg))
        length = step * rng.uniform(0.7, 1.3)
        ctrl.append(ctrl[-1] + length * np.array([math.cos(heading), math.sin(heading)]))
    ctrl = np.asarray(ctrl)
    chord = np.concatenate(([0.0], np.cumsum(np.linalg.norm(np.diff(ctrl, axis=0), axis=1))))
    spline = CubicSpline(chord, ctrl, bc_type="natural")
    dense = spline(np.linspace(0.0, chord[-1], 40 * n_ctrl))
    return _with_z(_resample_polyline(dense, spacing))


GENERATORS = {
    "straight": straight,
    "circle": circle,
    "s_curve": s_curve,
    "hairpin": hairpin,
    "zigzag": zigzag,
    "random_spline": random_spline,
}
