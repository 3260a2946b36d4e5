import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathfollow.geometry import Path, Point3, project
from pathfollow.sim import VehicleState
from pathfollow.steering import (
    PurePursuitParams,
    compute_target_point,
    k_steer_for_steer_angle,
    k_steer_for_turn_rate,
    lookahead_distance,
    pure_pursuit_command,
    pure_pursuit_from_rear_axle,
    rear_axle_position,
)

UNIT = PurePursuitParams(k_steer=1.0, u_steer_max=1.0)
STRAIGHT = Path([(0, 0), (100, 0)])


def target_at(alpha_deg, dist, rear=(0.0, 0.0, 0.0)):
    a = math.radians(alpha_deg)
    return Point3(rear[0] + dist * math.cos(a), rear[1] + dist * math.sin(a), rear[2])


@pytest.mark.parametrize("v,inside,expected", [(6, True, 6.0), (6, False, 3.0), (-2, True, 3.0), (0, True, 3.0)])
def test_lookahead(v, inside, expected):
    assert lookahead_distance(v, inside, PurePursuitParams()) == expected


def test_target_point_steps_along_arclength():
    assert compute_target_point(STRAIGHT, (10, 0, 0), 5) == pytest.approx((15, 0, 0))
    assert compute_target_point(STRAIGHT, (98, 0, 0), 5) == (100, 0, 0)
    off = (20, 4, 0)
    assert compute_target_point(STRAIGHT, off, 5) == pytest.approx((25, 0, 0))
    assert compute_target_point(STRAIGHT, off, 5, project(STRAIGHT, off)) == pytest.approx((25, 0, 0))
    with pytest.raises(ValueError):
        compute_target_point(STRAIGHT, off, 0)


def test_dead_ahead_is_zero():
    r = pure_pursuit_from_rear_axle((0, 0, 0), 0.0, target_at(0, 5), UNIT)
    assert r.alpha == 0 and r.steer_angle_delta == 0 and r.command == 0


def test_thirty_degrees():
    r = pure_pursuit_from_rear_axle((0, 0, 0), 0.0, target_at(30, 5), UNIT)
    assert r.alpha == pytest.approx(math.radians(30))
    assert r.steer_angle_delta == pytest.approx(math.atan(0.5), abs=1e-12)
    assert r.command == pytest.approx(0.46365, abs=1e-5)


def test_abeam_target_clamps():
    r = pure_pursuit_from_rear_axle((0, 0, 0), 0.0, target_at(90, 5), PurePursuitParams(k_steer=2.0, u_steer_max=1.0))
    assert r.steer_angle_delta == pytest.approx(math.pi / 4)
    assert r.command == 1.0


def test_positive_is_left():
    assert pure_pursuit_from_rear_axle((0, 0, 0), 0.0, target_at(20, 5), UNIT).command > 0
    assert pure_pursuit_from_rear_axle((0, 0, 0), 0.0, target_at(-20, 5), UNIT).command < 0


def test_coincident_target_is_flagged():
    r = pure_pursuit_from_rear_axle((1, 1, 0), 0.3, (1, 1, 0), UNIT)
    assert r.degenerate and r.command == 0


def test_uses_realised_distance_and_ground_plane_angle():
    # target above and ahead: angle measured in the plane, distance in 3D
    r = pure_pursuit_from_rear_axle((0, 0, 0), 0.0, (3, 3, 4), UNIT)
    assert r.alpha == pytest.approx(math.pi / 4)
    assert r.lookahead_ld == pytest.approx(math.sqrt(34))


def test_state_wrapper_uses_rear_axle():
    s = VehicleState((1.25, 0, 0), 0.0, 3.0, 2.5)
    assert rear_axle_position(s.position, s.heading, s.wheelbase_l) == pytest.approx((0, 0, 0))
    assert pure_pursuit_command(s, target_at(30, 5), UNIT).command == pytest.approx(0.46365, abs=1e-5)


def test_gain_presets():
    assert k_steer_for_steer_angle(0.6) == pytest.approx(1 / 0.6)
    assert k_steer_for_turn_rate(0.5) > k_steer_for_turn_rate(1.0)
    with pytest.raises(ValueError):
        k_steer_for_steer_angle(0)
    with pytest.raises(ValueError):
        k_steer_for_turn_rate(-1)


@pytest.mark.parametrize(
    "kw", [dict(wheelbase_l=0), dict(min_lookahead_l0=2.0, wheelbase_l=2.5), dict(speed_gain_gamma=-1),
           dict(k_steer=0), dict(u_steer_max=0)],
)
def test_params_validation(kw):
    with pytest.raises(ValueError):
        PurePursuitParams(**kw)


angles = st.floats(-179, 179)
dists = st.floats(0.5, 30)


@settings(max_examples=200, deadline=None)
@given(angles, dists, st.floats(-math.pi, math.pi), st.floats(0.5, 5))
def test_mirror_antisymmetry_and_bounds(alpha, d, heading, k):
    params = PurePursuitParams(k_steer=k)
    a = math.radians(alpha)
    left = (d * math.cos(heading + a), d * math.sin(heading + a), 0.0)
    right = (d * math.cos(heading - a), d * math.sin(heading - a), 0.0)
    r1 = pure_pursuit_from_rear_axle((0, 0, 0), heading, left, params)
    r2 = pure_pursuit_from_rear_axle((0, 0, 0), heading, right, params)
    assert r1.command == pytest.approx(-r2.command, abs=1e-12)
    assert abs(r1.command) <= params.u_steer_max


@settings(max_examples=100, deadline=None)
@given(st.floats(1, 89), dists, st.floats(1, 4), st.floats(0.1, 2))
def test_longer_wheelbase_steers_more(alpha, d, wb, extra):
    short = PurePursuitParams(wheelbase_l=wb, min_lookahead_l0=10, k_steer=1.0)
    long = PurePursuitParams(wheelbase_l=wb + extra, min_lookahead_l0=10, k_steer=1.0)
    t = target_at(alpha, d)
    assert abs(pure_pursuit_from_rear_axle((0, 0, 0), 0.0, t, long).steer_angle_delta) > abs(
        pure_pursuit_from_rear_axle((0, 0, 0), 0.0, t, short).steer_angle_delta
    )
