import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from _oracles import endpoint_curvatures, sampled_peak
from pathfollow.bezier import (
    CurvatureCase,
    QuadBezier,
    curvature_at,
    evaluate,
    max_curvature,
    max_curvature_of,
    max_curvature_sampled,
    sampled_curvature_peak,
)


def test_symmetric_arch_is_interior_case():
    res = max_curvature(QuadBezier((0, 0), (1, 1), (2, 0)))
    assert res.case_tag is CurvatureCase.INTERIOR_MAX
    assert res.kappa_max == pytest.approx(1.0, rel=1e-12)
    assert res.midpoint_m == (1, 0, 0)
    assert res.triangle_area_A == pytest.approx(1.0)
    assert res.sphere_radius == pytest.approx(0.5)


def test_flat_middle_point_is_endpoint_case():
    res = max_curvature(QuadBezier((0, 0), (0.6, 0.1), (2, 0)))
    assert res.case_tag is CurvatureCase.ENDPOINT_MONOTONE
    # A = 0.1, shorter leg |p1 p2| = sqrt(0.37)
    assert res.kappa_max == pytest.approx(0.1 / 0.37**1.5, rel=1e-12)
    assert res.kappa_max == pytest.approx(0.4443, rel=1e-3)


def test_endpoint_case_matches_curvature_at_endpoint():
    c = QuadBezier((0, 0), (0.6, 0.1), (2, 0))
    assert max_curvature(c).kappa_max == pytest.approx(curvature_at(c, 0.0), rel=1e-12)


def test_collinear_inside_is_straight():
    kappa, case = max_curvature_of((0, 0, 0), (0.3, 0, 0), (2, 0, 0))
    assert (kappa, case) == (0.0, CurvatureCase.DEGENERATE_LINE)


def test_collinear_outside_is_cusp():
    kappa, case = max_curvature_of((0, 0, 0), (3, 0, 0), (2, 0, 0), kappa_cap=7.0)
    assert (kappa, case) == (7.0, CurvatureCase.DEGENERATE_CUSP)


def test_coincident_endpoints_is_cusp():
    kappa, case = max_curvature_of((1, 1, 0), (2, 2, 0), (1, 1, 0))
    assert case is CurvatureCase.DEGENERATE_CUSP
    assert kappa == 10.0


def test_evaluate_endpoints_and_domain():
    c = QuadBezier((0, 0), (1, 1), (2, 0))
    assert evaluate(c, 0) == (0, 0, 0)
    assert evaluate(c, 1) == (2, 0, 0)
    assert evaluate(c, 0.5) == pytest.approx((1, 0.5, 0))
    with pytest.raises(ValueError):
        evaluate(c, 1.5)
    with pytest.raises(ValueError):
        curvature_at(c, -0.1)


def test_package_sampler_agrees_on_worked_example():
    c = QuadBezier((0, 0), (1, 1), (2, 0))
    k, t = sampled_curvature_peak(c)
    assert k == pytest.approx(1.0, rel=1e-9)
    assert t == pytest.approx(0.5, abs=1e-6)
    assert max_curvature_sampled(c) == pytest.approx(1.0, rel=1e-9)


def random_curves(rng, n):
    p = rng.uniform(-10, 10, size=(n, 3, 3))
    p[: n // 2, :, 2] = 0.0  # half planar
    return p


def test_closed_form_matches_oracle_batch():
    rng = np.random.default_rng(1)
    p = random_curves(rng, 2000)
    k_ref, _ = sampled_peak(p)
    k = np.array([max_curvature_of(*c)[0] for c in p])
    assert np.max(np.abs(k - k_ref) / k_ref) < 1e-6


def test_case_tag_predicts_argmax_location():
    rng = np.random.default_rng(2)
    p = random_curves(rng, 2000)
    k_ref, t_ref = sampled_peak(p)
    k0, k1 = endpoint_curvatures(p)
    for c, k, t, e0, e1 in zip(p, k_ref, t_ref, k0, k1):
        case = max_curvature_of(*c)[1]
        if case is CurvatureCase.ENDPOINT_MONOTONE:
            assert min(t, 1 - t) < 0.01
        else:
            assert case is CurvatureCase.INTERIOR_MAX
            assert 0 < t < 1
            assert k >= max(e0, e1) * (1 - 1e-12)


def test_interior_peak_can_sit_arbitrarily_close_to_an_endpoint():
    # edge vectors with |a|^2 = 2 just above a.b = 1.998: p2 barely outside the first sphere
    a = np.array([1.0, 1.0, 0.0])
    b = np.array([1.998, 0.0, 0.0])
    p = np.array([[0, 0, 0], a, a + b])[None]
    _, case = max_curvature_of(*p[0])
    assert case is CurvatureCase.INTERIOR_MAX
    _, t = sampled_peak(p)
    assert 0 < t[0] < 0.01


finite = st.floats(-20, 20, allow_nan=False, allow_infinity=False)
point = st.tuples(finite, finite, finite)


def _nondegenerate(p1, p2, p3):
    a = np.subtract(p2, p1)
    b = np.subtract(p3, p2)
    area2 = np.linalg.norm(np.cross(a, b))
    return area2 > 1e-3 and np.linalg.norm(a + b) > 1e-3 and min(np.linalg.norm(a), np.linalg.norm(b)) > 1e-3


@settings(max_examples=200, deadline=None)
@given(point, point, point)
def test_reversal_invariance(p1, p2, p3):
    assume(_nondegenerate(p1, p2, p3))
    k1, c1 = max_curvature_of(p1, p2, p3)
    k2, c2 = max_curvature_of(p3, p2, p1)
    assert c1 is c2
    assert k2 == pytest.approx(k1, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(point, point, point, st.floats(0.1, 10), point, st.floats(-math.pi, math.pi))
def test_rigid_motion_and_scaling(p1, p2, p3, scale, shift, angle):
    assume(_nondegenerate(p1, p2, p3))
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])

    def move(p):
        return tuple(scale * (rot @ np.asarray(p)) + np.asarray(shift))

    k1, c1 = max_curvature_of(p1, p2, p3, kappa_cap=math.inf)
    k2, c2 = max_curvature_of(move(p1), move(p2), move(p3), kappa_cap=math.inf)
    assert k2 == pytest.approx(k1 / scale, rel=1e-6)
    # the case split is scale free, except right at the sphere boundary
    if c1 is not c2:
        a = np.subtract(p2, p1)
        b = np.subtract(p3, p2)
        margin = min(a @ a - a @ b, b @ b - a @ b)
        assert abs(margin) < 1e-6 * max(a @ a, b @ b)


@settings(max_examples=200, deadline=None)
@given(point, point, point, st.floats(0, 1))
def test_closed_form_bounds_pointwise_curvature(p1, p2, p3, t):
    assume(_nondegenerate(p1, p2, p3))
    curve = QuadBezier(p1, p2, p3)
    kmax = max_curvature(curve, kappa_cap=math.inf).kappa_max
    assert curvature_at(curve, t, kappa_cap=math.inf) <= kmax * (1 + 1e-9)
