"""PI throttle controller for speed tracking.

Three guards keep the integral term in check:

* a rolling window of recent setpoints; a sign change or a spread larger
  than ``reset_dv`` clears the window and zeroes the integral,
* a dead band of width ``deadband_de`` around zero error inside which the
  integral is frozen,
* conditional integration: when the output saturates in the direction of
  the error, the integral update from this tick is undone.

Negative throttle is braking / reverse drive; there is no separate brake.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass


def default_gains(u_min: float, u_max: float, v_max: float) -> tuple[float, float]:
    """Starting-point gains: kp puts kp * v_max at half the actuator span, ki = kp / 2."""
    if not u_min < u_max:
        raise ValueError(f"need u_min < u_max, got [{u_min}, {u_max}]")
    if not v_max > 0:
        raise ValueError(f"v_max must be > 0, got {v_max}")
    kp = 0.5 * (u_max - u_min) / v_max
    return kp, 0.5 * kp


@dataclass(frozen=True)
class PiParams:
    kp: float = 0.1
    ki: float = 0.05
    window_m: int = 30
    reset_dv: float = 3.0
    deadband_de: float = 0.2
    u_min: float = -1.0
    u_max: float = 1.0

    def __post_init__(self):
        if not self.kp > 0:
            raise ValueError(f"kp must be > 0, got {self.kp}")
        if not self.ki >= 0:
            raise ValueError(f"ki must be >= 0, got {self.ki}")
        if int(self.window_m) != self.window_m or self.window_m < 1:
            raise ValueError(f"window_m must be an integer >= 1, got {self.window_m}")
        if not self.reset_dv > 0:
            raise ValueError(f"reset_dv must be > 0, got {self.reset_dv}")
        if not self.deadband_de >= 0:
            raise ValueError(f"deadband_de must be >= 0, got {self.deadband_de}")
        if not self.u_min < self.u_max:
            raise ValueError(f"need u_min < u_max, got [{self.u_min}, {self.u_max}]")

    @classmethod
    def with_default_gains(cls, v_max: float, u_min: float = -1.0, u_max: float = 1.0, **kw) -> "PiParams":
        kp, ki = default_gains(u_min, u_max, v_max)
        return cls(kp=kp, ki=ki, u_min=u_min, u_max=u_max, **kw)


class PiSpeedController:
    """Stateful PI controller; one instance per vehicle."""

    def __init__(self, params: PiParams):
        self.params = params
        self.integral = 0.0
        self.window: deque[float] = deque(maxlen=int(params.window_m))
        self.last_reset = False

    def reset(self) -> None:
        self.integral = 0.0
        self.window.clear()
        self.last_reset = False

    def update(self, v_target: float, v: float, dt: float) -> float:
        """Advance one tick and return the clamped throttle command."""
        if not (math.isfinite(v_target) and math.isfinite(v) and math.isfinite(dt)):
            raise ValueError(f"non-finite controller input: v_target={v_target}, v={v}, dt={dt}")
        if not dt > 0:
            raise ValueError(f"dt must be > 0, got {dt}")
        p = self.params
        q = self.window

        q.append(v_target)  # deque(maxlen) evicts the oldest at capacity
        lo = min(q)
        hi = max(q)
        integral = self.integral
        # sign(0) counts as positive
        self.last_reset = (lo < 0.0) != (hi < 0.0) or hi - lo > p.reset_dv
        if self.last_reset:
            q.clear()
            integral = 0.0

        e = v_target - v
        candidate = integral + p.ki * e * dt if abs(e) > 0.5 * p.deadband_de else integral

        u = p.kp * e + candidate
        u_clamped = p.u_min if u < p.u_min else p.u_max if u > p.u_max else u
        if u != u_clamped and (e < 0.0) == (u < 0.0):
            candidate = integral

        self.integral = candidate
        return u_clamped
