import math

import numpy as np
import pytest

from nckin.circular import (CURVATURE_HEADROOM, arc_frames, arc_speed_cap,
                            curvilinear_acceleration, curvilinear_jerk, plan_arc_block)

R = 0.01


@pytest.fixture
def quarter():
    # 10 mm quarter circle about the origin, counter-clockwise in XY
    return arc_frames((R, 0, 0), (0, R, 0), (0, 0, 0), "ccw", "XY")


def test_quarter_frame(quarter):
    np.testing.assert_allclose(quarter.u, (1, 0, 0))
    np.testing.assert_allclose(quarter.v, (0, 1, 0))
    np.testing.assert_allclose(quarter.w, (0, 0, 1))
    assert quarter.sweep == pytest.approx(math.pi / 2, rel=1e-15)
    np.testing.assert_allclose(quarter.matrix @ quarter.matrix.T, np.eye(3), atol=1e-15)


def test_clockwise_takes_the_long_way():
    geom = arc_frames((R, 0, 0), (0, R, 0), (0, 0, 0), "cw", "XY")
    assert geom.sweep == pytest.approx(1.5 * math.pi, rel=1e-15)
    np.testing.assert_allclose(geom.point(geom.sweep), (0, R, 0), atol=1e-15)
    np.testing.assert_allclose(geom.tangent(0.0), (0, -1, 0), atol=1e-15)


def test_xz_plane_frame():
    geom = arc_frames((R, 0, 0), (0, 0, R), (0, 0, 0), "ccw", "XZ")
    np.testing.assert_allclose(geom.w, (0, 1, 0))
    assert geom.sweep == pytest.approx(1.5 * math.pi, rel=1e-15)


def test_full_circle_needs_flag():
    with pytest.raises(ValueError):
        arc_frames((R, 0, 0), (R, 0, 0), (0, 0, 0))
    geom = arc_frames((R, 0, 0), (R, 0, 0), (0, 0, 0), full_circle=True)
    assert geom.sweep == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("end, center", [
    ((0, 2 * R, 0), (0, 0, 0)),   # radius mismatch
    ((0, R, 0.0), (0, 0, 1e-3)),  # endpoints off the plane
    ((0, R, 0), (R, 0, 0)),       # zero radius
])
def test_bad_arcs(end, center):
    with pytest.raises(ValueError):
        arc_frames((R, 0, 0), end, center)


def test_jerk_cap_quarter_circle(quarter, limits):
    # j_max / (R |t_y|) at the start, j_max / (R |t_x|) at the end
    assert curvilinear_jerk(quarter, 0.0, 0.0, limits) == pytest.approx(4000.0, rel=1e-12)


def test_jerk_cap_bounded_by_tangential_limit(quarter, limits):
    fast = curvilinear_jerk(quarter, 15.0, 15.0, limits)
    assert fast == pytest.approx(limits.jc_max / R, rel=1e-12)


def test_acceleration_cap_quarter_circle(quarter, limits):
    a_c, ok = curvilinear_acceleration(quarter, 0.0, 0.0, limits)
    assert a_c == pytest.approx(980.0, rel=1e-12)
    assert ok


def test_acceleration_feasibility_flag(quarter, limits):
    # the centripetal term alone reaches a_max at theta_dot = sqrt(a / R)
    crit = math.sqrt(9.8 / R)
    _, ok = curvilinear_acceleration(quarter, 0.0, 0.99 * crit, limits)
    assert ok
    _, ok = curvilinear_acceleration(quarter, 0.0, 1.01 * crit, limits)
    assert not ok


def test_speed_cap_from_curvature(quarter, limits):
    v, notes = arc_speed_cap(quarter, 0.8, limits)
    h = CURVATURE_HEADROOM
    expected = min(math.sqrt(h * 9.8 * R), (h * 40.0 * R * R) ** (1 / 3))
    assert v == pytest.approx(expected, rel=1e-14)
    assert notes and all("feed clamped" in n for n in notes)
    v, notes = arc_speed_cap(quarter, 0.01, limits)
    assert v == 0.01 and notes == []


def test_tangency_and_radius(quarter, limits):
    plan = plan_arc_block(quarter, 5000 / 6e4, 0.0, 0.0, limits)
    t = np.linspace(0.0, plan.duration, 1001)
    p, v, _, _ = plan.evaluate(t)
    np.testing.assert_allclose(np.linalg.norm(p, axis=1), R, rtol=1e-14)
    np.testing.assert_allclose(np.einsum("ij,ij->i", p, v), 0.0, atol=1e-16)
    np.testing.assert_allclose(p[:, 2], 0.0)
    np.testing.assert_allclose(p[-1], (0, R, 0), atol=1e-14)


def test_finite_differences(limits):
    geom = arc_frames((0.02, 0.0, 0.0), (-0.02, 0.0, 0.0), (0.0, 0.0, 0.0), "ccw", "XY")
    plan = plan_arc_block(geom, 0.2, 0.05, 0.0, limits)
    h = 1e-6
    rng = np.random.default_rng(5)
    for t in rng.uniform(2 * h, plan.duration - 2 * h, 50):
        p0, v0, a0, j0 = plan.evaluate(t)
        pp, vp, ap, _ = plan.evaluate(t + h)
        pm, vm, am, _ = plan.evaluate(t - h)
        np.testing.assert_allclose((pp - pm) / (2 * h), v0, atol=1e-9)
        np.testing.assert_allclose((vp - vm) / (2 * h), a0, atol=1e-6)
        # jerk jumps at phase switches; compare only inside a phase
        phase = np.searchsorted(plan.schedule.times, [t - h, t + h])
        if phase[0] == phase[1]:
            np.testing.assert_allclose((ap - am) / (2 * h), j0, atol=1e-3)


def test_tiny_radius_stays_finite(limits):
    r = 1e-9
    geom = arc_frames((r, 0, 0), (0, r, 0), (0, 0, 0), "ccw", "XY")
    plan = plan_arc_block(geom, 0.08, 0.0, 0.0, limits)
    assert np.isfinite(plan.duration) and plan.duration > 0.0
    p, v, a, j = plan.evaluate(np.linspace(0.0, plan.duration, 257))
    for arr in (p, v, a, j):
        assert np.all(np.isfinite(arr))
    assert np.max(np.abs(a)) <= 9.8 * (1 + 1e-6)
    assert np.max(np.abs(j)) <= 40.0 * (1 + 1e-6)


def test_boundary_speed_above_cap_rejected(quarter, limits):
    with pytest.raises(ValueError):
        plan_arc_block(quarter, 0.8, 0.5, 0.0, limits)


def test_random_arcs_respect_axis_caps(limits):
    rng = np.random.default_rng(2)
    for _ in range(150):
        r = 10 ** rng.uniform(-3.5, -1)
        a0, sweep = rng.uniform(0, 2 * math.pi), rng.uniform(0.05, 2 * math.pi - 0.05)
        ctr = rng.uniform(-0.05, 0.05, 3)
        ctr[2] = 0.0
        start = ctr + r * np.array([math.cos(a0), math.sin(a0), 0.0])
        end = ctr + r * np.array([math.cos(a0 + sweep), math.sin(a0 + sweep), 0.0])
        geom = arc_frames(start, end, ctr, "ccw", "XY")
        v_f = rng.uniform(0.01, 0.8)
        cap, _ = arc_speed_cap(geom, v_f, limits)
        v_in, v_out = cap * rng.uniform(0, 1, 2)
        plan = plan_arc_block(geom, v_f, v_in, v_out, limits)
        _, v, a, j = plan.evaluate(np.linspace(0.0, plan.duration, 2001))
        assert np.max(np.abs(a)) <= 9.8 * (1 + 1e-6)
        assert np.max(np.abs(j)) <= 40.0 * (1 + 1e-6)
        assert np.max(np.linalg.norm(v, axis=1)) <= cap * (1 + 1e-9)
        assert plan.v_exit == pytest.approx(v_out, rel=1e-9, abs=1e-12) or plan.schedule.case_id in (1, 2)
