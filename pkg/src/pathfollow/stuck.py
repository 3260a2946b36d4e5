"""Stuck detection and recovery.

A vehicle is stuck when, over the trailing ``window_t`` seconds, its
progress along the path (arc length of its projection) spans less than
``min_progress_d`` while the throttle is actually being applied. The first
response is to drive in reverse with inverted steering for
``reverse_duration``; after ``max_recovery_attempts`` such attempts at the
same spot the next event asks the simulator to teleport the vehicle back
onto the path.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .sim import ControlCommand


class StuckMode(str, Enum):
    NORMAL = "Normal"
    REVERSING = "Reversing"
    TELEPORTED = "Teleported"


_NORMAL = StuckMode.NORMAL
_REVERSING = StuckMode.REVERSING
_TELEPORTED = StuckMode.TELEPORTED


@dataclass(frozen=True)
class StuckParams:
    window_t: float = 3.0
    min_progress_d: float = 0.5
    reverse_duration: float = 1.5
    max_recovery_attempts: int = 2
    teleport_enabled: bool = True
    reverse_throttle: float = 0.6
    throttle_gate: float = 0.05
    # progress past the last stuck spot after which attempts count from zero again
    clear_distance: float = 1.0

    def __post_init__(self):
        for name in ("window_t", "min_progress_d", "reverse_duration", "reverse_throttle", "clear_distance"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be > 0, got {value}")
        if int(self.max_recovery_attempts) != self.max_recovery_attempts or self.max_recovery_attempts < 1:
            raise ValueError(f"max_recovery_attempts must be an integer >= 1, got {self.max_recovery_attempts}")
        if not self.throttle_gate >= 0:
            raise ValueError(f"throttle_gate must be >= 0, got {self.throttle_gate}")


class StuckStatus(NamedTuple):
    mode: StuckMode
    events_total: int
    attempt_index: int
    time_in_mode: float


class StuckManager:
    """Per-vehicle detector and recovery state machine."""

    def __init__(self, params: StuckParams | None = None):
        self.params = params or StuckParams()
        self.mode = _NORMAL
        self.events_total = 0
        self.attempt_index = 0
        self.time_in_mode = 0.0
        self.teleport_pending = False
        self.last_event_s: float | None = None
        self._last_t: float | None = None
        self._clear_history()

    def _clear_history(self) -> None:
        self._samples: deque[tuple[float, float, float]] = deque()
        # monotonic deques of (t, s) for the running max and min of s
        self._maxq: deque[tuple[float, float]] = deque()
        self._minq: deque[tuple[float, float]] = deque()
        self._throttle_sum = 0.0

    @property
    def status(self) -> StuckStatus:
        return tuple.__new__(StuckStatus, (self.mode, self.events_total, self.attempt_index, self.time_in_mode))

    def reset_history(self) -> None:
        """Forget the progress window, e.g. after the path was replaced."""
        self._clear_history()

    def observe(self, s_progress: float, commanded_throttle: float, t: float) -> StuckStatus:
        if self._last_t is not None and not t > self._last_t:
            raise ValueError(f"time must increase strictly: got {t} after {self._last_t}")
        self._last_t = t
        p = self.params

        if self.mode is _TELEPORTED and not self.teleport_pending:
            self._enter(_NORMAL)
        if self.mode is not _NORMAL:
            return self.status

        if self.last_event_s is not None and s_progress > self.last_event_s + p.clear_distance:
            self.attempt_index = 0
            self.last_event_s = None

        self._push(s_progress, abs(commanded_throttle), t)
        oldest_t = self._samples[0][0]
        if t - oldest_t < p.window_t - 1e-9:
            return self.status

        progress = self._maxq[0][1] - self._minq[0][1]
        mean_throttle = self._throttle_sum / len(self._samples)
        if progress < p.min_progress_d and mean_throttle > p.throttle_gate:
            self._on_event(s_progress)
        return self.status

    def _push(self, s: float, throttle: float, t: float) -> None:
        samples = self._samples
        samples.append((t, s, throttle))
        self._throttle_sum += throttle
        while self._maxq and self._maxq[-1][1] <= s:
            self._maxq.pop()
        self._maxq.append((t, s))
        while self._minq and self._minq[-1][1] >= s:
            self._minq.pop()
        self._minq.append((t, s))
        # keep the oldest sample that is still at least window_t old so the window is full
        horizon = t - self.params.window_t
        while len(samples) > 1 and samples[1][0] <= horizon + 1e-9:
            old_t, _, old_throttle = samples.popleft()
            self._throttle_sum -= old_throttle
            if self._maxq[0][0] <= old_t:
                self._maxq.popleft()
            if self._minq[0][0] <= old_t:
                self._minq.popleft()

    def _on_event(self, s: float) -> None:
        p = self.params
        self.events_total += 1
        self.last_event_s = s
        if self.attempt_index >= p.max_recovery_attempts and p.teleport_enabled:
            self.attempt_index = 0
            self.teleport_pending = True
            self._enter(_TELEPORTED)
        else:
            self.attempt_index = min(self.attempt_index + 1, p.max_recovery_attempts)
            self._enter(_REVERSING)

    def _enter(self, mode: StuckMode) -> None:
        self.mode = mode
        self.time_in_mode = 0.0
        self._clear_history()

    def acknowledge_teleport(self) -> None:
        """Called once the simulator has relocated the vehicle."""
        self.teleport_pending = False
        self.last_event_s = None

    def recovery_override(self, base: ControlCommand, dt: float, u_min: float = -1.0, u_max: float = 1.0,
                          steer_max: float = 1.0) -> ControlCommand:
        """Replace the controller command while a recovery is running."""
        if self.mode is _NORMAL:
            return base
        if self.mode is _TELEPORTED:
            return ControlCommand(0.0, 0.0)
        self.time_in_mode += dt
        sign = -1.0 if base.throttle < 0 else 1.0
        cmd = ControlCommand.clamped(-sign * self.params.reverse_throttle, -base.steer, u_min, u_max, steer_max)
        if self.time_in_mode >= self.params.reverse_duration - 1e-9:
            self._enter(_NORMAL)
        return cmd
