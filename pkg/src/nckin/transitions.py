"""Junction models.

* degree-5 polynomial crossing of a corner between two non-tangent segments,
  kept within the per-axis tolerances;
* the legacy circle-arc corner model (feed limit only);
* the feed limit at a curvature discontinuity between tangent elements.

For a programmed corner A-O-B the machine follows A-M-Q-N-B, where M and N lie
on the segments at distance L from O and Q sits on the bisector. Each machine
axis follows its own polynomial; all share the duration T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .machine import MachineLimits

AXIS_EPS = 1e-12
# |u + v| or |u - v| below this is treated as no corner / a full reversal
STRAIGHT_EPS = 1e-9


class ColinearCorner(ValueError):
    """The two segments continue in a straight line: no transition needed."""


class ReversalCorner(ValueError):
    """The path folds back onto itself: Q collapses onto O, the axis must stop."""


def _spherical(vec) -> tuple[float, float]:
    """(phi, theta) of a unit vector, following the arcsin/arccos branch split."""
    x, y, z = (float(c) for c in vec)
    r = math.sqrt(x * x + y * y + z * z)
    phi = math.acos(max(-1.0, min(1.0, z / r)))
    rho = math.hypot(x, y)
    if rho == 0.0:
        return phi, 0.0
    s = math.asin(max(-1.0, min(1.0, y / rho)))
    theta = s if x >= 0.0 else math.pi - s
    return phi, theta


@dataclass(frozen=True)
class CornerGeometry:
    """Corner O between A (upstream) and B (downstream).

    ``q`` is the vector OQ; ``d = u + v`` holds the per-axis denominators of the
    coefficient formulas. ``half_length`` is L = |OM| = |ON|.
    """

    corner: np.ndarray
    a: np.ndarray
    b: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    angles: dict
    q: np.ndarray
    half_length: float
    tol: tuple

    @property
    def d(self) -> np.ndarray:
        return self.u + self.v

    @property
    def q_norm(self) -> float:
        return float(np.linalg.norm(self.q))

    @property
    def m_point(self) -> np.ndarray:
        return self.corner + self.half_length * self.u

    @property
    def n_point(self) -> np.ndarray:
        return self.corner + self.half_length * self.v

    @property
    def deflection(self) -> float:
        """Angle between the incoming and outgoing directions (0 = straight)."""
        return math.acos(max(-1.0, min(1.0, -float(self.u @ self.v))))


def corner_geometry(a, o, b, tol) -> CornerGeometry:
    """Build the transition geometry of corner ``o`` reached from ``a``, left toward ``b``.

    Raises:
        ColinearCorner: A, O, B are aligned with O between them.
        ReversalCorner: B lies back along OA.
    """
    a, o, b = (np.asarray(p, dtype=float) for p in (a, o, b))
    oa, ob = a - o, b - o
    na, nb = float(np.linalg.norm(oa)), float(np.linalg.norm(ob))
    if na == 0.0 or nb == 0.0:
        raise ValueError("corner coincides with an adjacent point")
    u, v = oa / na, ob / nb
    s = u + v
    ns = float(np.linalg.norm(s))
    if ns < STRAIGHT_EPS:
        raise ColinearCorner("segments are colinear")
    if float(np.linalg.norm(u - v)) < STRAIGHT_EPS:
        raise ReversalCorner("path reverses at the corner")
    w = s / ns
    tol = tuple(float(t) for t in tol)
    active = np.abs(w) >= AXIS_EPS
    oq = min(tol[i] / abs(float(w[i])) for i in range(3) if active[i])
    q = np.where(active, oq * w, 0.0)
    phi_m, theta_m = _spherical(u)
    phi_n, theta_n = _spherical(v)
    phi_q, theta_q = _spherical(w)
    angles = {"phi_m": phi_m, "theta_m": theta_m, "phi_n": phi_n, "theta_n": theta_n,
              "phi_q": phi_q, "theta_q": theta_q}
    # 16 Q_i / (3 d_i) is the same for every axis since Q is parallel to u + v
    half_length = 16.0 * oq / (3.0 * ns)
    return CornerGeometry(o, a, b, u, v, w, angles, q, half_length, tol)


def _limits_for_q(geom: CornerGeometry, limits: MachineLimits):
    d = geom.d
    lim_j, lim_a = math.inf, math.inf
    for i in range(3):
        qi, di = abs(float(geom.q[i])), abs(float(d[i]))
        if di <= AXIS_EPS or qi <= AXIS_EPS:
            continue
        lim_j = min(lim_j, 8.0 / 3.0 * (qi * qi * limits.j_max[i]) ** (1.0 / 3.0) / di)
        lim_a = min(lim_a, 8.0 / 3.0 * math.sqrt(qi * limits.a_max[i]) / di)
    return lim_j, lim_a


def entry_feed_limit(geom: CornerGeometry, v_f: float, limits: MachineLimits):
    """(V_lim_j, V_lim_a, V_In) for a corner.

    V_lim_j keeps the axis jerk at entry/exit within j_max, V_lim_a keeps the
    mid-transition axis acceleration within a_max. With no usable axis the
    corner is crossed at rest.
    """
    lim_j, lim_a = _limits_for_q(geom, limits)
    if math.isinf(lim_j) and math.isinf(lim_a):
        return 0.0, 0.0, 0.0
    return lim_j, lim_a, min(v_f, lim_j, lim_a)


def clamp_transition_length(geom: CornerGeometry, len_oa: float, len_ob: float,
                            limits: MachineLimits, v_f: float):
    """Shrink the transition when L exceeds half of an adjacent segment.

    Returns ``(geometry, (V_lim_j, V_lim_a, V_In), clamped)``.
    """
    cap = 0.5 * min(len_oa, len_ob)
    clamped = bool(geom.half_length > cap)
    if clamped:
        # Q_i = 3 L d_i / 16
        q = 3.0 * cap * geom.d / 16.0
        q = np.where(np.abs(geom.q) > 0.0, q, 0.0)
        geom = replace(geom, q=q, half_length=cap)
    return geom, entry_feed_limit(geom, v_f, limits), clamped


@dataclass(frozen=True)
class TransitionPlan:
    """Per-axis quintic ``coeffs[i, k]`` (axis i, power k) around the corner point."""

    coeffs: np.ndarray
    duration: float
    v_in: float
    geometry: CornerGeometry

    kind = "transition"

    @property
    def half_length(self) -> float:
        return self.geometry.half_length

    def evaluate(self, t):
        """Absolute position, velocity, acceleration, jerk at t in [0, T]."""
        t_arr = np.asarray(t, dtype=float)
        T = self.duration
        if np.any(t_arr < -1e-12 * max(1.0, T)) or np.any(t_arr > T * (1 + 1e-12) + 1e-15):
            raise ValueError(f"t outside [0, {T}]")
        tc = np.clip(t_arr, 0.0, T)[..., None]
        c = self.coeffs.T  # (6, 3)
        p = c[0] + tc * (c[1] + tc * (c[2] + tc * (c[3] + tc * (c[4] + tc * c[5]))))
        v = c[1] + tc * (2 * c[2] + tc * (3 * c[3] + tc * (4 * c[4] + tc * 5 * c[5])))
        a = 2 * c[2] + tc * (6 * c[3] + tc * (12 * c[4] + tc * 20 * c[5]))
        j = 6 * c[3] + tc * (24 * c[4] + tc * 60 * c[5])
        return self.geometry.corner + p, v, a, j


def transition_duration(geom: CornerGeometry, v_in: float) -> float:
    # T = 32 Q_i / (3 V d_i) = 2 L / V
    return 2.0 * geom.half_length / v_in


def polynomial_transition(geom: CornerGeometry, v_in: float) -> TransitionPlan:
    """Quintic crossing from M (velocity -V u) through Q to N (velocity V v).

    Per axis: a0 = L u_i, a1 = -V u_i, a2 = 0, a3 = V d_i / T^2, a4 = -a3 / (2T),
    a5 = 0. An axis with d_i = 0 (moving straight through) keeps constant speed.
    """
    if not v_in > 0.0:
        raise ValueError("transition entry speed must be positive")
    L = geom.half_length
    T = transition_duration(geom, v_in)
    d = geom.d
    coeffs = np.zeros((3, 6))
    coeffs[:, 0] = L * geom.u
    coeffs[:, 1] = -v_in * geom.u
    coeffs[:, 3] = v_in * d / (T * T)
    coeffs[:, 4] = -coeffs[:, 3] / (2.0 * T)
    return TransitionPlan(coeffs, T, v_in, geom)


def evaluate_transition(plan: TransitionPlan, t):
    return plan.evaluate(t)


def transition_min_speed(plan: TransitionPlan) -> float:
    """Lowest feed in the crossing, reached at T/2: V |v - u| / 2."""
    g = plan.geometry
    return 0.5 * plan.v_in * float(np.linalg.norm(g.v - g.u))


def circular_corner_feed(tit: float, beta: float, l1: float, l2: float, v_f: float,
                         limits: MachineLimits) -> tuple[float, float]:
    """Legacy circle-arc corner model: (radius, feed through the corner).

    ``beta`` is the direction change at the corner (0 means straight on).
    """
    if not 0.0 < beta < math.pi:
        raise ValueError("beta must lie in (0, pi)")
    half = 0.5 * beta
    c = math.cos(half)
    r_tol = tit * c / (1.0 - c) if c < 1.0 else math.inf
    r_len = min(l1, l2) / math.sin(half) - tit
    r = min(r_tol, r_len)
    if not r > 0.0:
        return r, 0.0
    a = min(limits.a_max)
    j = min(limits.j_max)
    return r, min(v_f, math.sqrt(a * r), (j * r * r) ** (1.0 / 3.0))


def curvature_discontinuity_feed(r1: float, r2: float, delta_t: float, j: float,
                                 v_f: float) -> float:
    """Feed limit across a jump in curvature, capped at ``v_f``.

    Radii may be signed (turn direction) and ``math.inf`` stands for a line:
    V = sqrt(1 / (|1/R1 - 1/R2| * delta_t * j)).
    """
    jump = abs(1.0 / r1 - 1.0 / r2)
    if jump == 0.0:
        return v_f
    return min(v_f, math.sqrt(1.0 / (jump * delta_t * j)))
