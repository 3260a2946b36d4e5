"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line."""

import math
import statistics
import time
from unittest import mock

import numpy as np
import pytest

import pathfollow.bezier as bezier
from _oracles import endpoint_curvatures, fit_circle, sampled_peak
from conftest import record
from pathfollow.bezier import CurvatureCase, QuadBezier, max_curvature, max_curvature_of
from pathfollow.follower import FollowerConfig, PathFollower, Variant
from pathfollow.geometry import Path
from pathfollow.harness import paths
from pathfollow.harness.runner import run_scenario
from pathfollow.harness.scenario import scenario_from_dict
from pathfollow.harness.suite import generate_suite, run_suite, suite_to_json
from pathfollow.sim import PRESETS, ControlCommand, ModelKind, VehicleModelParams, VehicleState, step
from pathfollow.speed_control import PiParams, PiSpeedController
from pathfollow.stuck import StuckMode, StuckParams
from pathfollow.target_speed import TargetSpeedParams, compute_target_speed, critical_speed

DT = 1 / 60
SUITE_SEED = 2024


def check(number, detail, condition):
    record(number, bool(condition), detail)
    assert condition, detail


# 1 -------------------------------------------------------------------------

def test_curvature_oracle_equivalence():
    rng = np.random.default_rng(12345)
    curves = []
    while len(curves) < 10_000:
        p = rng.uniform(-10, 10, size=(3, 3))
        if rng.random() < 0.5:
            p[:, 2] = 0.0
        a, b = p[1] - p[0], p[2] - p[1]
        if np.linalg.norm(np.cross(a, b)) > 1e-2 and min(np.linalg.norm(a), np.linalg.norm(b)) > 1e-2:
            curves.append(p)
    p = np.array(curves)

    t0 = time.perf_counter()
    results = [max_curvature_of(*c) for c in p]
    k_ref, t_ref = sampled_peak(p)
    elapsed = time.perf_counter() - t0

    kappa = np.array([k for k, _ in results])
    rel = np.abs(kappa - k_ref) / k_ref
    e0, e1 = endpoint_curvatures(p)

    wrong = 0
    interior = 0
    near_end_interior = 0
    for (_, case), t, k, a, b in zip(results, t_ref, k_ref, e0, e1):
        if case is CurvatureCase.ENDPOINT_MONOTONE:
            wrong += not min(t, 1 - t) < 0.01
        elif case is CurvatureCase.INTERIOR_MAX:
            interior += 1
            wrong += not (1e-9 < t < 1 - 1e-9 and k >= max(a, b) * (1 - 1e-12))
            near_end_interior += not 0.01 <= t <= 0.99
        else:
            wrong += 1
    detail = (f"max rel err {rel.max():.2e} (<1e-3), case mispredictions {wrong}/10000, "
              f"{interior} interior ({near_end_interior} peak within 0.01 of an end), {elapsed:.2f}s (<10s)")
    check(1, detail, rel.max() < 1e-3 and wrong == 0 and elapsed < 10.0)


# 2 -------------------------------------------------------------------------

def test_worked_values():
    params = TargetSpeedParams()
    arch = max_curvature(QuadBezier((0, 0), (1, 1), (2, 0)))
    flat = max_curvature(QuadBezier((0, 0), (0.6, 0.1), (2, 0)))
    v1 = critical_speed(1.0, params)
    corner = compute_target_speed((0, 0, 0), Path([(0, 0), (6, 0), (6, 60)]), params)
    checks = {
        "arch kappa 1.0": math.isclose(arch.kappa_max, 1.0, rel_tol=1e-3)
        and arch.case_tag is CurvatureCase.INTERIOR_MAX,
        "endpoint kappa 0.4443": math.isclose(flat.kappa_max, 0.4443, rel_tol=1e-3)
        and flat.case_tag is CurvatureCase.ENDPOINT_MONOTONE,
        "critical speed 1.981": math.isclose(v1, 1.981, rel_tol=1e-3),
        "right-angle target 4.081": math.isclose(corner.v_target, 4.081, rel_tol=1e-3),
    }
    detail = (f"kappa={arch.kappa_max:.6f}, {flat.kappa_max:.6f}; v(kappa=1)={v1:.5f}; "
              f"right-angle v={corner.v_target:.5f}; failing: {[k for k, ok in checks.items() if not ok]}")
    check(2, detail, all(checks.values()))


# 3 -------------------------------------------------------------------------

def test_controller_properties():
    p = PiParams()
    c = PiSpeedController(p)
    naive_integral = 0.0
    peak = 0.0
    for _ in range(int(30 / DT)):
        c.update(5.0, 0.0, DT)
        naive_integral += p.ki * 5.0 * DT
        peak = max(peak, c.integral)
    bounded = peak <= p.u_max and naive_integral > 5 * p.u_max

    d = PiSpeedController(p)
    d.update(5.0, 0.0, DT)
    frozen = d.integral
    dead = True
    for e in (0.1, -0.1, 0.0, 0.05):
        d.update(5.0, 5.0 - e, DT)
        dead &= d.integral == frozen

    f = PiSpeedController(p)
    for _ in range(3):
        f.update(5.0, 4.0, DT)
    f.update(-5.0, -5.0, DT)
    flip = f.last_reset and f.integral == 0.0 and len(f.window) == 0

    detail = (f"blocked plant integral peak {peak:.3f} <= u_max, naive {naive_integral:.1f}; "
              f"dead band freeze {dead}; sign-flip reset {flip}")
    check(3, detail, bounded and dead and flip)


# 4 -------------------------------------------------------------------------

def _closed_loop(path, state, seconds, config):
    model = PRESETS["car"]
    f = PathFollower(config)
    ctes = []
    for _ in range(int(seconds / DT)):
        cmd, tel = f.tick(state, path, DT)
        ctes.append(tel.cte)
        state = step(model, state, cmd, dt=DT)
    return np.array(ctes)


def test_closed_loop_tracking():
    t0 = time.perf_counter()
    straight = _closed_loop(Path(paths.straight(200)), VehicleState((0, 2, 0), 0.0, 0.0, 2.5), 10.0,
                            FollowerConfig())
    t_straight = time.perf_counter() - t0
    settle = np.flatnonzero(straight >= 0.1)
    settle_time = (settle[-1] + 1) * DT if settle.size else 0.0

    cfg = FollowerConfig(target_speed=TargetSpeedParams(v_max=5.0), pi=PiParams.with_default_gains(5.0))
    t0 = time.perf_counter()
    circle = _closed_loop(Path(paths.circle(20.0, 330.0)), VehicleState((0, 0, 0), 0.0, 0.0, 2.5), 20.0, cfg)
    t_circle = time.perf_counter() - t0
    steady = circle[int(8 / DT):]

    detail = (f"straight 2 m offset below 0.1 m after {settle_time:.2f}s (<10s); circle R20 @5 m/s steady "
              f"CTE max {steady.max():.3f} m (<1.0); runtimes {t_straight:.2f}s, {t_circle:.2f}s (<5s)")
    check(4, detail, settle_time < 10.0 and steady.max() < 1.0 and max(t_straight, t_circle) < 5.0)


# 5 -------------------------------------------------------------------------

def test_turning_radius():
    model = VehicleModelParams(ModelKind.BICYCLE, wheelbase_l=2.5, max_steer_angle=0.6, steer_rate_limit=2.0,
                               accel_gain=4.0, drag=0.0)
    errors = []
    for delta in (0.15, 0.3, 0.46365):
        s = VehicleState((0, 0, 0), 0.0, 5.0, model.wheelbase_l)
        pts = []
        for k in range(int(30 / DT)):
            s = step(model, s, ControlCommand(0.0, delta / model.max_steer_angle), dt=DT)
            if k >= 60:
                pts.append(s.position[:2])
        pts = np.array(pts)
        _, _, r = fit_circle(pts[:, 0], pts[:, 1])
        errors.append(abs(r / (model.wheelbase_l / math.tan(delta)) - 1))
    detail = "relative radius errors " + ", ".join(f"{e:.2e}" for e in errors) + " (<1%)"
    check(5, detail, max(errors) < 0.01)


# 6 -------------------------------------------------------------------------

CORNER = [[float(x), 0.0] for x in range(0, 41, 5)] + [[40.0, float(y)] for y in range(5, 41, 5)]


def _wall_scenario(walls, **extra):
    return scenario_from_dict({
        "name": "wall", "path": {"waypoints": CORNER}, "vehicle": {"preset": "car"},
        "env": {"walls": walls}, "time_limit": 60.0, **extra,
    })


def test_stuck_pipeline():
    window_t = StuckParams().window_t
    rows = []
    kerb = _wall_scenario([{"a": [40.3, 0.3], "b": [40.3, 3.0]}])
    report = run_scenario(kerb, trace=rows)
    t_block = next(r[0] for r in rows if r[0] > 1.0 and r[5] == 0.0)
    t_detect = next(r[0] for r in rows if r[11] != StuckMode.NORMAL.value)
    delay = t_detect - t_block
    kerb_ok = report.stuck_events >= 1 and report.completed and 0 < delay <= window_t + 0.2 and report.teleports == 0

    # a wall straight across the path can never be cleared: every third event must be the teleport
    escalation_ok = True
    seq = {}
    for attempts in (1, 2, 3):
        trap = _wall_scenario([{"a": [25.0, -5.0], "b": [25.0, 5.0]}],
                              follower={"stuck": {"max_recovery_attempts": attempts}})
        rows = []
        r = run_scenario(trap, trace=rows)
        modes = [row[11] for row in rows]
        entered = [m for prev, m in zip(["Normal"] + modes, modes) if prev == "Normal" and m != "Normal"]
        expected = [("Teleported" if (i + 1) % (attempts + 1) == 0 else "Reversing") for i in range(len(entered))]
        seq[attempts] = f"{r.stuck_events} events/{r.teleports} teleports"
        escalation_ok &= entered == expected and r.stuck_events == len(entered) and r.teleports >= 1
    no_tp = run_scenario(_wall_scenario([{"a": [25.0, -5.0], "b": [25.0, 5.0]}],
                                        follower={"stuck": {"teleport_enabled": False}}))
    escalation_ok &= no_tp.teleports == 0 and no_tp.stuck_events >= 3

    detail = (f"kerb: {report.stuck_events} event(s), blocked at {t_block:.2f}s, detected {delay:.2f}s later "
              f"(<= {window_t + 0.2}), completed={report.completed}; trap escalation "
              f"{seq}, disabled -> {no_tp.teleports} teleports")
    check(6, detail, kerb_ok and escalation_ok)


# 7 and 9 ---------------------------------------------------------------------

@pytest.fixture(scope="module")
def suite_result():
    scenarios = generate_suite(SUITE_SEED)
    t0 = time.perf_counter()
    result = run_suite(scenarios, (Variant.PROPOSED, Variant.BASELINE), trials=1, seed=SUITE_SEED)
    return result, time.perf_counter() - t0, scenarios


def test_directional_reproduction(suite_result):
    result, elapsed, _ = suite_result
    p, b = result["variants"]["Proposed"], result["variants"]["Baseline"]
    cmp_ = result["comparison"]
    detail = (f"{p['runs'] + b['runs']} runs in {elapsed:.1f}s (<120s); stuck events {p['total_stuck_events']} vs "
              f"{b['total_stuck_events']} ({cmp_['stuck_events_reduction_pct']:.0f}% fewer); mean total time "
              f"{p['total_time_mean']:.1f}s vs {b['total_time_mean']:.1f}s "
              f"({cmp_['total_time_reduction_pct']:.0f}% lower)")
    check(7, detail, p["runs"] + b["runs"] == 60 and p["total_stuck_events"] < b["total_stuck_events"]
          and p["total_time_mean"] < b["total_time_mean"] and elapsed < 120.0)


def test_determinism(suite_result):
    result, _, scenarios = suite_result
    again = run_suite(scenarios, (Variant.PROPOSED, Variant.BASELINE), trials=1, seed=SUITE_SEED)
    a, b = suite_to_json(result).encode(), suite_to_json(again).encode()
    check(9, f"two suite runs with seed {SUITE_SEED}: {len(a)} bytes, identical={a == b}", a == b)


# 8 -------------------------------------------------------------------------

def test_performance_budget():
    xs = np.linspace(0.0, 400.0, 200)
    path = Path(np.column_stack([xs, 15.0 * np.sin(xs / 25.0)]))
    model = PRESETS["car"]
    follower = PathFollower()
    state = VehicleState((0, 0, 0), math.atan2(15 / 25, 1), 0.0, model.wheelbase_l)
    for _ in range(200):  # warm-up, includes JIT compilation
        cmd, _ = follower.tick(state, path, DT)
        state = step(model, state, cmd, dt=DT)
    timings = []
    clock = time.perf_counter_ns
    for _ in range(3000):
        t0 = clock()
        cmd, _ = follower.tick(state, path, DT)
        timings.append(clock() - t0)
        state = step(model, state, cmd, dt=DT)
    median_us = statistics.median(timings) / 1000.0

    params = TargetSpeedParams()
    with mock.patch.object(bezier, "max_curvature_of", wraps=bezier.max_curvature_of) as closed, \
         mock.patch.object(bezier, "curvature_at", wraps=bezier.curvature_at) as at, \
         mock.patch.object(bezier, "evaluate", wraps=bezier.evaluate) as ev, \
         mock.patch.object(bezier, "sampled_curvature_peak", wraps=bezier.sampled_curvature_peak) as sp:
        compute_target_speed((100.0, 3.0, 0.0), path, params)
    sampling = at.call_count + ev.call_count + sp.call_count
    detail = (f"median tick {median_us:.1f} us (<50) on 200 waypoints; closed-form evaluations "
              f"{closed.call_count} (N-2 = {params.count_n - 2}), sampling calls {sampling}")
    check(8, detail, median_us < 50.0 and closed.call_count == params.count_n - 2 and sampling == 0)
