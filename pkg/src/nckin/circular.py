"""Circular interpolation with the 7-phase law applied to the arc angle.

An arc is described in a local frame (u, v, w): it starts at angle 0 along u
and sweeps toward v about w. The angular law theta(t) is a jerk-limited
profile; machine-axis kinematics follow from

    P = O + R e_r
    V = R w e_t
    A = R dw e_t - R w^2 e_r
    J = R (ddw - w^3) e_t - 3 R dw w e_r

with e_r = cos(theta) u + sin(theta) v and e_t = -sin(theta) u + cos(theta) v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .machine import MachineLimits
from .scurve import PhaseSchedule, ProfileRequest, solve_schedule

PROJ_EPS = 1e-9
PLANE_NORMALS = {
    "XY": np.array([0.0, 0.0, 1.0]),
    "XZ": np.array([0.0, 1.0, 0.0]),
    "YZ": np.array([1.0, 0.0, 0.0]),
}
# sampled axis kinematics must stay this far (relative) below the caps, which
# covers peaks falling between samples
CAP_MARGIN = 1e-3
# share of the axis caps the steady curvature terms may use on an arc; at the
# full steady-state limits there would be no margin left to brake
CURVATURE_HEADROOM = 0.5
_SAMPLES_PER_PHASE = 128
_MAX_SAFETY_ROUNDS = 30


@dataclass(frozen=True)
class ArcGeometry:
    center: np.ndarray
    radius: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    sweep: float
    full_circle: bool = False

    @property
    def matrix(self) -> np.ndarray:
        """Rotation taking machine-frame vectors to the local (u, v, w) frame."""
        return np.vstack([self.u, self.v, self.w])

    @property
    def length(self) -> float:
        return self.radius * self.sweep

    @property
    def start(self) -> np.ndarray:
        return self.point(0.0)

    @property
    def end(self) -> np.ndarray:
        return self.point(self.sweep)

    def point(self, theta):
        th = np.asarray(theta, dtype=float)[..., None]
        return self.center + self.radius * (np.cos(th) * self.u + np.sin(th) * self.v)

    def radial(self, theta):
        th = np.asarray(theta, dtype=float)[..., None]
        return np.cos(th) * self.u + np.sin(th) * self.v

    def tangent(self, theta):
        th = np.asarray(theta, dtype=float)[..., None]
        return -np.sin(th) * self.u + np.cos(th) * self.v


def _normal(hint) -> np.ndarray:
    if isinstance(hint, str):
        key = hint.upper()
        if key not in PLANE_NORMALS:
            raise ValueError(f"unknown plane {hint!r}")
        return PLANE_NORMALS[key]
    n = np.asarray(hint, dtype=float)
    return n / np.linalg.norm(n)


def arc_frames(start, end, center, orientation: str = "ccw", normal="XY",
               full_circle: bool = False) -> ArcGeometry:
    """Local frame and sweep of an arc from ``start`` to ``end`` about ``center``.

    ``orientation`` is read looking down the plane normal (ccw = positive turn).
    """
    start, end, center = (np.asarray(p, dtype=float) for p in (start, end, center))
    n = _normal(normal)
    rs, re = start - center, end - center
    radius = float(np.linalg.norm(rs))
    if radius == 0.0:
        raise ValueError("arc radius is zero")
    if abs(float(np.linalg.norm(re)) - radius) > 1e-6 * radius:
        raise ValueError(f"radius mismatch: |start-O|={radius}, |end-O|={np.linalg.norm(re)}")
    if abs(float(rs @ n)) > 1e-9 * radius or abs(float(re @ n)) > 1e-9 * radius:
        raise ValueError("arc endpoints leave the interpolation plane (helix not supported)")
    if orientation not in ("cw", "ccw"):
        raise ValueError(f"orientation must be cw or ccw, got {orientation!r}")
    w = n if orientation == "ccw" else -n
    u = rs / radius
    v = np.cross(w, u)
    sweep = math.atan2(float(re @ v), float(re @ u)) % (2.0 * math.pi)
    if np.linalg.norm(end - start) <= 1e-12 * max(1.0, radius):
        if not full_circle:
            raise ValueError("arc start equals end without the full-circle flag")
        sweep = 2.0 * math.pi
    elif sweep == 0.0:
        sweep = 2.0 * math.pi
    return ArcGeometry(center, radius, u, v, w, sweep, full_circle)


def curvilinear_jerk(geom: ArcGeometry, theta_dot_in: float, theta_dot_out: float,
                     limits: MachineLimits) -> float:
    """Angular jerk cap J_c from the axis jerk caps at both arc ends.

    Candidate per axis and end: j_max,i / (R |t_i|) + theta_dot^3, where t is
    the unit tangent there. The tangential jerk R J_c is kept below jc_max.
    """
    R = geom.radius
    candidates = []
    for theta, rate in ((0.0, theta_dot_in), (geom.sweep, theta_dot_out)):
        t = geom.tangent(theta)
        for i in range(3):
            if abs(t[i]) >= PROJ_EPS:
                candidates.append(limits.j_max[i] / (R * abs(float(t[i]))) + rate ** 3)
    if not candidates:
        raise RuntimeError("arc tangent has no machine-axis component")
    return min(min(candidates), limits.jc_max / R)


def curvilinear_acceleration(geom: ArcGeometry, theta1: float, theta_dot1: float,
                             limits: MachineLimits, theta2: float | None = None,
                             theta_dot2: float | None = None) -> tuple[float, bool]:
    """Angular acceleration cap A_c and a feasibility flag.

    Per axis, |R A_c t_i - R w^2 r_i| <= a_max,i is solved for A_c at the
    accelerating state (theta1, theta_dot1) and at the braking state
    (theta2, theta_dot2), where the tangential term changes sign. The braking
    state defaults to the mirror image alpha - theta1 at the same rate. The
    flag is False when the centripetal part alone breaks an axis cap.
    """
    R = geom.radius
    if theta2 is None:
        theta2 = geom.sweep - theta1
    if theta_dot2 is None:
        theta_dot2 = theta_dot1
    feasible = True
    candidates = []
    for theta, rate, sign in ((theta1, theta_dot1, 1.0), (theta2, theta_dot2, -1.0)):
        t = geom.tangent(theta)
        r = geom.radial(theta)
        for i in range(3):
            centripetal = R * rate * rate * r[i]
            if abs(centripetal) >= limits.a_max[i]:
                feasible = False
            if abs(t[i]) < PROJ_EPS:
                continue
            candidates.append((limits.a_max[i] + sign * math.copysign(1.0, t[i]) * centripetal)
                              / (R * abs(t[i])))
    a_c = float(min(candidates)) if candidates else math.inf
    return a_c, bool(feasible and a_c > 0.0)


def _in_plane_extent(geom: ArcGeometry) -> np.ndarray:
    # largest |component| a unit in-plane vector can have along each axis
    return np.sqrt(geom.u ** 2 + geom.v ** 2)


def arc_speed_cap(geom: ArcGeometry, v_f: float, limits: MachineLimits
                  ) -> tuple[float, list[str]]:
    """Programmed feed clamped by axis speeds and curvature limits.

    The centripetal acceleration v^2/R and jerk v^3/R^2 are held within
    ``CURVATURE_HEADROOM`` times the smallest in-plane axis caps.
    """
    R = geom.radius
    ext = _in_plane_extent(geom)
    moving = ext >= PROJ_EPS
    notes = []
    v = v_f
    v_axis = float(np.min(np.asarray(limits.v_max)[moving] / ext[moving]))
    a = float(np.min(np.asarray(limits.a_max)[moving]))
    j = float(np.min(np.asarray(limits.j_max)[moving]))
    h = CURVATURE_HEADROOM
    for label, cap in (("axis speed", v_axis),
                       ("centripetal acceleration", math.sqrt(h * a * R)),
                       ("centripetal jerk", (h * j * R * R) ** (1.0 / 3.0))):
        if cap < v:
            notes.append(f"feed clamped by {label}: {v:.6g} -> {cap:.6g} m/s")
            v = cap
    return v, notes


def _phase_samples(schedule: PhaseSchedule, n: int = _SAMPLES_PER_PHASE):
    """Angular state sampled on each closed phase interval, phase jerk included."""
    out = []
    for k, tau in enumerate(schedule.tau):
        if tau <= 0.0:
            continue
        p0, v0, a0 = schedule.boundary_states[k]
        jk = schedule.jerk[k]
        s = np.linspace(0.0, tau, n)
        out.append((p0 + v0 * s + 0.5 * a0 * s * s + jk * s ** 3 / 6.0,
                    v0 + a0 * s + 0.5 * jk * s * s,
                    a0 + jk * s,
                    np.full_like(s, jk)))
    if not out:
        p0, v0, a0 = schedule.boundary_states[0]
        return (np.array([p0]), np.array([v0]), np.array([a0]), np.array([0.0]))
    return tuple(np.concatenate(part) for part in zip(*out))


def _axis_kinematics(geom: ArcGeometry, th, om, al, je):
    R = geom.radius
    er, et = geom.radial(th), geom.tangent(th)
    om, al, je = (np.asarray(x)[..., None] for x in (om, al, je))
    vel = R * om * et
    acc = R * al * et - R * om * om * er
    jerk = R * (je - om ** 3) * et - 3.0 * R * al * om * er
    return vel, acc, jerk


def _cap_usage(geom: ArcGeometry, schedule: PhaseSchedule, limits: MachineLimits):
    """Worst sampled ratio of |axis acceleration| and |axis jerk| to their caps."""
    _, acc, jerk = _axis_kinematics(geom, *_phase_samples(schedule))
    a_ratio = float(np.max(np.abs(acc) / np.asarray(limits.a_max)))
    j_ratio = float(np.max(np.abs(jerk) / np.asarray(limits.j_max)))
    return a_ratio, j_ratio


@dataclass(frozen=True)
class ArcPlan:
    geometry: ArcGeometry
    schedule: PhaseSchedule
    j_c: float
    a_c: float
    v_f: float
    request: ProfileRequest
    notes: tuple = ()

    kind = "arc"

    @property
    def duration(self) -> float:
        return self.schedule.duration

    @property
    def v_exit(self) -> float:
        return self.schedule.v_exit * self.geometry.radius

    def evaluate(self, t):
        """Machine-frame position, velocity, acceleration, jerk at t."""
        th, om, al, je = self.schedule.evaluate(t)
        pos = self.geometry.point(th)
        vel, acc, jerk = _axis_kinematics(self.geometry, th, om, al, je)
        return pos, vel, acc, jerk


def evaluate_arc(plan: ArcPlan, t):
    return plan.evaluate(t)


def _solve(geom, v_f, v_in, v_out, a_c, j_c):
    R = geom.radius
    req = ProfileRequest(geom.sweep, v_in / R, v_out / R, v_f / R, a_c, j_c)
    return req, solve_schedule(req)


def plan_arc_block(geom: ArcGeometry, v_f: float, v_in: float, v_out: float,
                   limits: MachineLimits) -> ArcPlan:
    """Plan the angular law on an arc.

    The feed is clamped first (see :func:`arc_speed_cap`); speeds above the
    clamp are an error since junction speeds are the planner's business. A_c is
    computed on a provisional schedule and refined once on the resolved one;
    finally both angular caps are scaled down until sampled axis acceleration
    and jerk respect the machine caps.
    """
    R = geom.radius
    v_cap, notes = arc_speed_cap(geom, v_f, limits)
    if max(v_in, v_out) > v_cap * (1.0 + 1e-12):
        raise ValueError(f"boundary speed {max(v_in, v_out)} above arc feed cap {v_cap}")
    v_in, v_out = min(v_in, v_cap), min(v_out, v_cap)
    j_c = curvilinear_jerk(geom, v_in / R, v_out / R, limits)
    ext = _in_plane_extent(geom)
    moving = ext >= PROJ_EPS
    a_c = float(np.min(np.asarray(limits.a_max)[moving] / (R * ext[moving])))
    req, sched = _solve(geom, v_cap, v_in, v_out, a_c, j_c)
    # refine A_c on the states where the tangential acceleration first peaks
    # (end of phase 1) and where braking last peaks (end of phase 6)
    b = sched.boundary_states
    a_new, feasible = curvilinear_acceleration(geom, b[1][0], b[1][1], limits, b[6][0], b[6][1])
    if feasible and a_new < a_c:
        a_c = a_new
        req, sched = _solve(geom, v_cap, v_in, v_out, a_c, j_c)
    for _ in range(_MAX_SAFETY_ROUNDS):
        a_ratio, j_ratio = _cap_usage(geom, sched, limits)
        target = 1.0 - CAP_MARGIN
        if a_ratio <= target and j_ratio <= target:
            break
        if a_ratio > target:
            a_c *= 0.995 / a_ratio
        if j_ratio > target:
            # the radial jerk term grows with A_c, so both caps shrink
            j_c *= 0.995 / j_ratio
            a_c *= math.sqrt(0.995 / j_ratio)
        req, sched = _solve(geom, v_cap, v_in, v_out, a_c, j_c)
    else:
        notes.append("axis caps still exceeded after safety rounds")
    return ArcPlan(geom, sched, j_c, a_c, v_cap, req, tuple(notes))
