import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nckin.transitions import (ColinearCorner, ReversalCorner, circular_corner_feed,
                               clamp_transition_length, corner_geometry,
                               curvature_discontinuity_feed, entry_feed_limit,
                               polynomial_transition, transition_min_speed)

FEED = 5000.0 / 60000.0
TOL = (1e-5, 1e-5, 1e-5)

# 90 degree corner at the origin: in along -x, out along +y
A, O, B = (0.01, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.01, 0.0)
V_LIM_J = 0.0042330694719152
V_LIM_A = 0.026398653164297778
T_90 = 0.025198420997897455


@pytest.fixture
def right_angle():
    return corner_geometry(A, O, B, TOL)


def test_right_angle_geometry(right_angle):
    g = right_angle
    np.testing.assert_allclose(g.q, (1e-5, 1e-5, 0.0), rtol=1e-14)
    assert g.half_length == pytest.approx(16e-5 / 3, rel=1e-14)
    assert g.deflection == pytest.approx(math.pi / 2, rel=1e-14)
    np.testing.assert_allclose(g.m_point, (16e-5 / 3, 0, 0), rtol=1e-14)
    np.testing.assert_allclose(g.n_point, (0, 16e-5 / 3, 0), rtol=1e-14)
    assert g.angles["phi_m"] == pytest.approx(math.pi / 2)
    assert g.angles["theta_n"] == pytest.approx(math.pi / 2)
    assert g.angles["theta_q"] == pytest.approx(math.pi / 4)


def test_right_angle_feed_limits(right_angle, limits):
    lim_j, lim_a, v_in = entry_feed_limit(right_angle, FEED, limits)
    assert lim_j == pytest.approx(V_LIM_J, rel=1e-12)
    assert lim_a == pytest.approx(V_LIM_A, rel=1e-12)
    assert v_in == lim_j
    plan = polynomial_transition(right_angle, v_in)
    assert plan.duration == pytest.approx(T_90, rel=1e-12)


def test_left_branch_of_spherical_angles():
    g = corner_geometry((-0.01, 0.0, 0.0), O, (0.0, -0.01, 0.01), TOL)
    assert g.angles["theta_m"] == pytest.approx(math.pi)
    assert g.angles["phi_n"] == pytest.approx(math.pi / 4)
    assert g.angles["theta_n"] == pytest.approx(-math.pi / 2)
    # x = 0 takes the x >= 0 branch, vertical vectors get theta = 0
    g = corner_geometry((0.0, 0.0, 0.01), O, (0.0, 0.01, 0.0), TOL)
    assert g.angles["theta_m"] == 0.0
    assert g.angles["phi_m"] == 0.0


def test_boundary_conditions(right_angle, limits):
    v_in = entry_feed_limit(right_angle, FEED, limits)[2]
    plan = polynomial_transition(right_angle, v_in)
    g, T = right_angle, plan.duration
    p, v, a, _ = plan.evaluate(0.0)
    np.testing.assert_allclose(p, g.m_point, atol=1e-18)
    np.testing.assert_allclose(v, -v_in * g.u, atol=1e-18)
    np.testing.assert_allclose(a, 0.0, atol=1e-18)
    p, v, a, _ = plan.evaluate(T)
    np.testing.assert_allclose(p, g.n_point, atol=1e-18)
    np.testing.assert_allclose(v, v_in * g.v, atol=1e-15)
    np.testing.assert_allclose(a, 0.0, atol=1e-12)
    p, v, _, _ = plan.evaluate(T / 2)
    np.testing.assert_allclose(p, g.corner + g.q, atol=1e-18)
    assert np.linalg.norm(v) == pytest.approx(transition_min_speed(plan), rel=1e-12)
    assert transition_min_speed(plan) == pytest.approx(v_in * math.sqrt(2) / 2, rel=1e-14)


def test_extremes_at_ends_and_middle(right_angle, limits):
    v_in = entry_feed_limit(right_angle, FEED, limits)[2]
    plan = polynomial_transition(right_angle, v_in)
    t = np.linspace(0.0, plan.duration, 2001)
    _, v, a, j = plan.evaluate(t)
    jx = np.abs(j[:, 0])
    assert jx[0] == pytest.approx(jx.max(), rel=1e-12)
    assert jx[-1] == pytest.approx(jx.max(), rel=1e-12)
    assert jx.max() == pytest.approx(40.0, rel=1e-12)  # V_lim_j binds
    ax = np.abs(a[:, 0])
    assert np.argmax(ax) == 1000
    assert ax.max() <= 9.8
    speed = np.linalg.norm(v, axis=1)
    assert np.argmin(speed) == 1000


def test_acceleration_limit_binds_when_jerk_is_generous(right_angle, limits):
    lim = limits.__class__(limits.v_max, limits.a_max, (1e6,) * 3, limits.jc_max,
                           limits.interp_period, limits.tol)
    _, lim_a, v_in = entry_feed_limit(right_angle, FEED, lim)
    assert v_in == lim_a
    plan = polynomial_transition(right_angle, v_in)
    _, _, a, _ = plan.evaluate(np.linspace(0.0, plan.duration, 2001))
    assert np.max(np.abs(a)) == pytest.approx(9.8, rel=1e-9)


def test_path_stays_within_tolerance_of_corner(right_angle, limits):
    plan = polynomial_transition(right_angle, 0.004)
    p, _, _, _ = plan.evaluate(np.linspace(0.0, plan.duration, 2001))
    # distance to the programmed polyline never exceeds |OQ|
    dist = np.minimum(np.hypot(p[:, 1], np.minimum(p[:, 0], 0.0)),
                      np.hypot(p[:, 0], np.minimum(p[:, 1], 0.0)))
    dist = np.where((p[:, 0] >= 0) & (p[:, 1] >= 0), np.minimum(p[:, 0], p[:, 1]), dist)
    assert dist.max() == pytest.approx(1e-5, rel=1e-9)


def test_reversed_corner_mirrors_in_time(limits):
    a, o, b = (0.01, 0.002, 0.001), (0.0, 0.0, 0.0), (0.003, 0.01, -0.002)
    fwd = polynomial_transition(corner_geometry(a, o, b, TOL), 0.003)
    rev = polynomial_transition(corner_geometry(b, o, a, TOL), 0.003)
    assert fwd.duration == pytest.approx(rev.duration, rel=1e-14)
    t = np.linspace(0.0, fwd.duration, 101)
    pf, vf, _, _ = fwd.evaluate(t)
    pr, vr, _, _ = rev.evaluate(fwd.duration - t)
    np.testing.assert_allclose(pf, pr, atol=1e-15)
    np.testing.assert_allclose(vf, -vr, atol=1e-15)


def test_tolerance_scaling(limits):
    small = corner_geometry(A, O, B, TOL)
    big = corner_geometry(A, O, B, tuple(8 * t for t in TOL))
    js, as_, _ = entry_feed_limit(small, 1.0, limits)
    jb, ab, _ = entry_feed_limit(big, 1.0, limits)
    assert jb / js == pytest.approx(4.0, rel=1e-12)        # Q^(2/3)
    assert ab / as_ == pytest.approx(math.sqrt(8), rel=1e-12)
    assert big.half_length / small.half_length == pytest.approx(8.0, rel=1e-14)


def test_worst_axis_sets_q():
    g = corner_geometry(A, O, B, (2e-5, 1e-5, 1e-5))
    np.testing.assert_allclose(g.q, (1e-5, 1e-5, 0.0), rtol=1e-14)


def test_straight_axis_keeps_constant_speed(limits):
    # z moves at the same rate on both sides: d_z = 0
    g = corner_geometry((0.01, 0.0, -0.01), O, (0.0, 0.01, 0.01), TOL)
    assert g.d[2] == pytest.approx(0.0, abs=1e-15)
    plan = polynomial_transition(g, 0.003)
    _, v, a, _ = plan.evaluate(np.linspace(0.0, plan.duration, 11))
    np.testing.assert_allclose(v[:, 2], v[0, 2], atol=1e-15)
    np.testing.assert_allclose(a[:, 2], 0.0, atol=1e-12)


def test_colinear_and_reversal():
    with pytest.raises(ColinearCorner):
        corner_geometry((-0.01, 0, 0), O, (0.02, 0, 0), TOL)
    with pytest.raises(ReversalCorner):
        corner_geometry((0.01, 0, 0), O, (0.02, 0, 0), TOL)


def test_clamp_on_short_segment(right_angle, limits):
    g, (lim_j, lim_a, v_in), clamped = clamp_transition_length(right_angle, 0.01, 8e-5,
                                                               limits, FEED)
    assert clamped
    assert g.half_length == pytest.approx(4e-5, rel=1e-14)
    np.testing.assert_allclose(g.q, 3 * 4e-5 * right_angle.d / 16, rtol=1e-14)
    assert np.all(np.abs(g.q) <= 1e-5)
    assert v_in == min(lim_j, lim_a) < V_LIM_J
    plan = polynomial_transition(g, v_in)
    p, _, _, _ = plan.evaluate(plan.duration / 2)
    np.testing.assert_allclose(p, g.q, atol=1e-18)


def test_no_clamp_on_long_segments(right_angle, limits):
    g, _, clamped = clamp_transition_length(right_angle, 0.01, 0.01, limits, FEED)
    assert not clamped and g is right_angle


def test_zero_entry_speed_rejected(limits):
    with pytest.raises(ValueError):
        polynomial_transition(corner_geometry(A, O, B, TOL), 0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(5.0, 175.0), st.floats(-1.0, 1.0))
def test_caps_hold_for_any_corner(angle_deg, tilt):
    from nckin.machine import table1_limits
    limits = table1_limits()
    th = math.radians(angle_deg)
    a = (0.01, 0.0, 0.0)
    b = (0.01 * math.cos(th), 0.01 * math.sin(th), 0.005 * tilt)
    g = corner_geometry(a, O, b, TOL)
    _, _, v_in = entry_feed_limit(g, FEED, limits)
    plan = polynomial_transition(g, v_in)
    p, _, acc, jerk = plan.evaluate(np.linspace(0.0, plan.duration, 1001))
    assert np.max(np.abs(acc)) <= 9.8 * (1 + 1e-9)
    assert np.max(np.abs(jerk)) <= 40.0 * (1 + 1e-9)
    assert np.all(np.abs(g.q) <= np.array(TOL) * (1 + 1e-12))


def test_circle_corner_model(limits):
    r, v = circular_corner_feed(1e-5, math.pi / 2, 0.01, 0.01, FEED, limits)
    assert r == pytest.approx(2.414213562373096e-05, rel=1e-14)
    assert v == pytest.approx(0.0028567382778502803, rel=1e-14)


def test_circle_corner_short_segment(limits):
    # the tolerance radius no longer fits: R = l / sin(beta / 2) - TIT
    r, v = circular_corner_feed(1e-5, math.pi / 2, 1e-5, 0.01, FEED, limits)
    assert r == pytest.approx(1e-5 * math.sqrt(2) - 1e-5, rel=1e-14)
    assert v == pytest.approx((40.0 * r * r) ** (1 / 3), rel=1e-14)


def test_circle_corner_feed_grows_as_corner_flattens(limits):
    feeds = [circular_corner_feed(1e-5, b, 0.01, 0.01, 10.0, limits)[1]
             for b in np.linspace(0.1, 3.0, 30)]
    assert np.all(np.diff(feeds) < 0.0)
    with pytest.raises(ValueError):
        circular_corner_feed(1e-5, math.pi, 0.01, 0.01, FEED, limits)


def test_curvature_jump_limit():
    v = curvature_discontinuity_feed(0.01, -0.025, 2e-3, 40.0, 1.0)
    assert v == pytest.approx(0.2988071523335984, rel=1e-14)
    assert curvature_discontinuity_feed(0.01, -0.025, 2e-3, 40.0, 0.1) == 0.1
    quarter = curvature_discontinuity_feed(0.01, -0.025, 2e-3, 160.0, 1.0)
    assert quarter == pytest.approx(v / 2, rel=1e-14)


def test_curvature_jump_line_and_same_circle():
    assert curvature_discontinuity_feed(0.02, 0.02, 2e-3, 60.0, 0.5) == 0.5
    v = curvature_discontinuity_feed(math.inf, 0.02, 2e-3, 60.0, 5.0)
    assert v == pytest.approx(math.sqrt(0.02 / (2e-3 * 60.0)), rel=1e-14)
