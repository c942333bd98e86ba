"""Uniaxial jerk-limited 7-phase motion law in the general case.

A move of length L starts at ``v_in``, tries to reach the programmed speed
``v_f`` and ends at ``v_out``, with zero acceleration at both ends. Depending
on L and the speed jumps, some phases vanish; the resulting ten cases are

=====  ==================  =========================  ===================
case   exit speed          cruise speed               solved by
=====  ==================  =========================  ===================
1      not reached         (no cruise), a_cap hit     quadratic
2      not reached         (no cruise), a_cap missed  cubic (Cardano)
3-6    reached             not reached                Newton-Raphson
7-10   reached             reached                    closed form
=====  ==================  =========================  ===================

Cases 3-6 and 7-10 differ by which of the two ramps saturates ``a_cap``
(3/7: both, 4/8: acceleration only, 5/9: deceleration only, 6/10: neither).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .roots import ConvergenceError, newton_raphson, solve_cubic_real

DEGENERATE = "degenerate-cruise"
CASES = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, DEGENERATE)

# slack on length comparisons at case boundaries (m, or rad for arcs)
LENGTH_EPS = 1e-12
# Newton residual tolerance, relative to the block's length and feed scale
NEWTON_TOL = 1e-12


@dataclass(frozen=True)
class ProfileRequest:
    length: float
    v_in: float
    v_out: float
    v_f: float
    a_cap: float
    j_cap: float

    def check(self) -> None:
        values = (self.length, self.v_in, self.v_out, self.v_f, self.a_cap, self.j_cap)
        if any(not math.isfinite(x) for x in values):
            raise ValueError(f"non-finite profile request {self}")
        if min(self.length, self.v_in, self.v_out, self.v_f) < 0.0:
            raise ValueError(f"negative length or speed in {self}")
        if self.a_cap <= 0.0 or self.j_cap <= 0.0:
            raise ValueError(f"caps must be positive in {self}")
        if self.v_f < max(self.v_in, self.v_out):
            raise ValueError(f"v_f={self.v_f} below max(v_in, v_out) in {self}")
        if self.v_f == 0.0 and self.length > 0.0:
            raise ValueError("cannot cover a positive length at zero speed")


@dataclass(frozen=True)
class PhaseSchedule:
    """Seven phase durations plus the kinematic state at each phase boundary."""

    tau: tuple[float, ...]
    jerk: tuple[float, ...]
    case_id: int | str
    v_peak: float
    v_exit: float
    boundary_states: tuple[tuple[float, float, float], ...]

    @cached_property
    def times(self) -> np.ndarray:
        return np.concatenate(([0.0], np.cumsum(self.tau)))

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    @property
    def length(self) -> float:
        return self.boundary_states[-1][0]

    @cached_property
    def _arrays(self):
        states = np.array(self.boundary_states[:7], dtype=float)
        nonzero = [i for i, t in enumerate(self.tau) if t > 0.0]
        last = nonzero[-1] if nonzero else 6
        return states[:, 0], states[:, 1], states[:, 2], np.array(self.jerk), last

    def evaluate(self, t):
        """Position, velocity, acceleration, jerk at time ``t`` (scalar or array).

        At a phase switch the later phase's jerk is reported, except at the very
        end where the last non-empty phase is used.
        """
        t_arr = np.asarray(t, dtype=float)
        total = self.duration
        slack = 1e-12 * max(1.0, total)
        if np.any(t_arr < -slack) or np.any(t_arr > total + slack):
            raise ValueError(f"t outside [0, {total}]")
        tc = np.clip(t_arr, 0.0, total)
        p0, v0, a0, jk, last = self._arrays
        k = np.clip(np.searchsorted(self.times, tc, side="right") - 1, 0, 6)
        k = np.where(tc >= total, last, k)
        dt = tc - self.times[k]
        j = jk[k]
        a = a0[k] + j * dt
        v = v0[k] + a0[k] * dt + 0.5 * j * dt * dt
        p = p0[k] + v0[k] * dt + 0.5 * a0[k] * dt * dt + j * dt ** 3 / 6.0
        if t_arr.ndim == 0:
            return float(p), float(v), float(a), float(j)
        return p, v, a, j


def build_schedule(v_in: float, tau, jerk, case_id, v_peak: float) -> PhaseSchedule:
    """Integrate a piecewise-constant jerk law exactly from rest acceleration."""
    tau = [float(x) for x in tau]
    jerk = [float(x) for x in jerk]
    p, v, a = 0.0, float(v_in), 0.0
    states = [(p, v, a)]
    for dt, jk in zip(tau, jerk):
        p = p + v * dt + 0.5 * a * dt * dt + jk * dt ** 3 / 6.0
        v = v + a * dt + 0.5 * jk * dt * dt
        a = a + jk * dt
        states.append((p, v, a))
    return PhaseSchedule(tuple(tau), tuple(jerk), case_id, float(v_peak),
                         states[-1][1], tuple(states))


def evaluate(schedule: PhaseSchedule, t):
    return schedule.evaluate(t)


def ramp_times(dv: float, a: float, j: float) -> tuple[float, float]:
    """(jerk phase, constant-acceleration phase) durations for a speed change |dv|."""
    dv = abs(dv)
    if dv >= a * a / j:
        return a / j, dv / a - a / j
    return math.sqrt(dv / j), 0.0


def ramp_length(v0: float, v1: float, a: float, j: float) -> float:
    # symmetric S-ramp: distance is mean speed times duration
    t1, t2 = ramp_times(v1 - v0, a, j)
    return 0.5 * (v0 + v1) * (2.0 * t1 + t2)


def _cubic_time(length: float, v0: float, j: float) -> float:
    """Positive root of j*t^3 + 2*v0*t - L = 0 (strictly increasing for v0 >= 0)."""
    if length <= 0.0:
        return 0.0
    roots = [r for r in solve_cubic_real(j, 0.0, 2.0 * v0, -length) if r > 0.0]
    if not roots:
        raise ArithmeticError(f"no positive root for j={j}, v0={v0}, L={length}")
    return roots[0]


def _accel_reach(length: float, v0: float, a: float, j: float) -> tuple[float, bool]:
    """Speed reached accelerating from v0 over exactly ``length``; flag = a_cap hit."""
    if length >= 2.0 * v0 * a / j + a ** 3 / j ** 2:
        disc = a ** 4 - 4.0 * a * a * j * v0 + 4.0 * j * j * v0 * v0 + 8.0 * a * j * j * length
        return (math.sqrt(disc) - a * a) / (2.0 * j), True
    t1 = _cubic_time(length, v0, j)
    return v0 + j * t1 * t1, False


def max_reachable_speed(length: float, v0: float, a: float, j: float,
                        v_cap: float = math.inf) -> float:
    """Highest speed a zero-acceleration-to-zero-acceleration ramp reaches from v0."""
    v, _ = _accel_reach(length, v0, a, j)
    return min(v, v_cap)


def _decel_reach(length: float, v0: float, v_target: float, a: float, j: float
                 ) -> tuple[float, bool]:
    """Lowest exit speed >= v_target reachable braking from v0 over exactly ``length``.

    The braking distance is not monotone in the exit speed near zero, so all
    admissible roots of both branches are collected and the smallest is kept.
    """
    s = a * a / j
    candidates: list[tuple[float, bool]] = []
    # unsaturated: 2 v0 t - j t^3 = L, exit v0 - j t^2
    for t in solve_cubic_real(j, 0.0, -2.0 * v0, length):
        if 0.0 <= t and j * t * t < s:
            v = v0 - j * t * t
            if v >= v_target - 1e-12:
                candidates.append((max(v, v_target), False))
    # saturated: j V^2 - a^2 V - (j v0^2 + a^2 v0 - 2 a j L) = 0
    if v0 - v_target >= s:
        disc = a ** 4 + 4.0 * j * (j * v0 * v0 + a * a * v0 - 2.0 * a * j * length)
        if disc >= 0.0:
            for sign in (1.0, -1.0):
                v = (a * a + sign * math.sqrt(disc)) / (2.0 * j)
                if v_target - 1e-12 <= v <= v0 - s + 1e-12:
                    candidates.append((max(v, v_target), True))
    if not candidates:
        raise ArithmeticError("no admissible braking root")
    return min(candidates)


@dataclass(frozen=True)
class _Regime:
    case_id: int | str
    reach: bool
    full: bool
    acc_sat: bool
    dec_sat: bool
    v_reached: float | None = None  # cases 1-2


def _regime(req: ProfileRequest) -> _Regime:
    req.check()
    L, vi, vo, vf, a, j = (req.length, req.v_in, req.v_out, req.v_f, req.a_cap, req.j_cap)
    s = a * a / j
    if vi == vo == vf:
        return _Regime(DEGENERATE, True, True, False, False)
    d_min = ramp_length(vi, vo, a, j)
    if L < d_min - LENGTH_EPS:
        if vo > vi:
            v, sat = _accel_reach(L, vi, a, j)
        else:
            v, sat = _decel_reach(L, vi, vo, a, j)
        return _Regime(1 if sat else 2, False, False, sat, False, v)
    d_full = ramp_length(vi, vf, a, j) + ramp_length(vf, vo, a, j)
    if L >= d_full - LENGTH_EPS:
        acc_sat = vf - vi >= s
        dec_sat = vf - vo >= s
        case = {(True, True): 7, (True, False): 8, (False, True): 9, (False, False): 10}
        return _Regime(case[acc_sat, dec_sat], True, True, acc_sat, dec_sat)
    lo = max(vi, vo)

    def dist(v):
        return ramp_length(vi, v, a, j) + ramp_length(v, vo, a, j)

    def saturates(v_from):
        knee = v_from + s
        if knee <= lo:
            return True
        if knee >= vf:
            return False
        return dist(knee) <= L
    acc_sat, dec_sat = saturates(vi), saturates(vo)
    case = {(True, True): 3, (True, False): 4, (False, True): 5, (False, False): 6}
    return _Regime(case[acc_sat, dec_sat], True, False, acc_sat, dec_sat)


def classify_case(req: ProfileRequest) -> int | str:
    """Which of the ten cases (or the degenerate cruise) governs ``req``."""
    return _regime(req).case_id


def case_conditions(req: ProfileRequest) -> dict:
    """Evaluate every case's acceptance conditions independently.

    Boundary equalities resolve toward saturating and closed-form cases, so
    with the degenerate-cruise preference exactly one entry is True.
    """
    req.check()
    L, vi, vo, vf, a, j = (req.length, req.v_in, req.v_out, req.v_f, req.a_cap, req.j_cap)
    s = a * a / j
    degenerate = vi == vo == vf
    d_min = ramp_length(vi, vo, a, j)
    reach = L >= d_min - LENGTH_EPS
    d_full = ramp_length(vi, vf, a, j) + ramp_length(vf, vo, a, j)
    full = reach and L >= d_full - LENGTH_EPS
    out = {}
    if reach or degenerate:
        out[1] = out[2] = False
    else:
        if vo > vi:
            knee = 2.0 * vi * a / j + a ** 3 / j ** 2
            sat = abs(vo - vi) >= s and L >= knee
        else:
            sat = _decel_reach(L, vi, vo, a, j)[1]
        out[1], out[2] = sat, not sat
    cruise_acc, cruise_dec = vf - vi >= s, vf - vo >= s
    for case, (ca, cd) in zip((7, 8, 9, 10), ((1, 1), (1, 0), (0, 1), (0, 0))):
        out[case] = (not degenerate) and full and cruise_acc == ca and cruise_dec == cd
    partial = reach and not full and not degenerate
    if partial:
        r = _regime(req)
        pairs = {3: (1, 1), 4: (1, 0), 5: (0, 1), 6: (0, 0)}
        for case, (ca, cd) in pairs.items():
            out[case] = r.acc_sat == ca and r.dec_sat == cd
    else:
        for case in (3, 4, 5, 6):
            out[case] = False
    out[DEGENERATE] = degenerate
    return out


# Newton-Raphson systems for cases 3-6: (residual, jacobian, unpack)
def _system(case: int, req: ProfileRequest):
    L, vi, vo, a, j = req.length, req.v_in, req.v_out, req.a_cap, req.j_cap
    s = a * a / j
    if case == 3:  # x = (vp, t2, t6)
        def res(x):
            vp, t2, t6 = x
            length = (t2 * vi + t6 * vp + 0.5 * a * (t2 * t2 - t6 * t6)
                      + 2.0 * a * (vi + vp) / j + 1.5 * a * a * (t2 - t6) / j)
            return np.array([vp - (s + vi + a * t2), vo - (vp - s - a * t6), L - length])

        def jac(x):
            vp, t2, t6 = x
            return np.array([
                [1.0, -a, 0.0],
                [-1.0, 0.0, a],
                [-(t6 + 2.0 * a / j), -(vi + a * t2 + 1.5 * s), -(vp - a * t6 - 1.5 * s)],
            ])

        def unpack(x):
            vp, t2, t6 = x
            t1 = a / j
            return vp, (t1, t2, t1, 0.0, t1, t6, t1)

        def guess(vp):
            return [vp, (vp - vi) / a - a / j, (vp - vo) / a - a / j]
    elif case == 4:  # x = (vp, t2, t5)
        def res(x):
            vp, t2, t5 = x
            length = (-t5 ** 3 * j + 2.0 * a * vi / j + 1.5 * a * a * t2 / j + a ** 3 / j ** 2
                      + t2 * vi + 2.0 * t5 * vp + 0.5 * a * t2 * t2)
            return np.array([vp - (s + vi + a * t2), vo - (vp - t5 * t5 * j), L - length])

        def jac(x):
            vp, t2, t5 = x
            return np.array([
                [1.0, -a, 0.0],
                [-1.0, 0.0, 2.0 * j * t5],
                [-2.0 * t5, -(1.5 * s + vi + a * t2), -(2.0 * vp - 3.0 * j * t5 * t5)],
            ])

        def unpack(x):
            vp, t2, t5 = x
            t1 = a / j
            return vp, (t1, t2, t1, 0.0, t5, 0.0, t5)

        def guess(vp):
            return [vp, (vp - vi) / a - a / j, math.sqrt(max(vp - vo, 0.0) / j)]
    elif case == 5:  # x = (t1, t6, vp)
        def res(x):
            t1, t6, vp = x
            length = (j * t1 ** 3 + 2.0 * t1 * vi + t6 * vp - 0.5 * a * t6 * t6
                      + (4.0 * a * vp - 3.0 * a * a * t6) / (2.0 * j) - a ** 3 / j ** 2)
            return np.array([vp - (vi + j * t1 * t1), vo - (vp - s - a * t6), L - length])

        def jac(x):
            t1, t6, vp = x
            return np.array([
                [-2.0 * j * t1, 0.0, 1.0],
                [0.0, a, -1.0],
                [-(3.0 * j * t1 * t1 + 2.0 * vi), -(vp - a * t6 - 1.5 * s), -(t6 + 2.0 * a / j)],
            ])

        def unpack(x):
            t1, t6, vp = x
            t5 = a / j
            return vp, (t1, 0.0, t1, 0.0, t5, t6, t5)

        def guess(vp):
            return [math.sqrt(max(vp - vi, 0.0) / j), (vp - vo) / a - a / j, vp]
    else:  # case 6, x = (t1, t7, vp)
        def res(x):
            t1, t7, vp = x
            length = -t7 ** 3 * j + t1 ** 3 * j + 2.0 * t1 * vi + 2.0 * t7 * vp
            return np.array([vp - (vi + j * t1 * t1), vo - (vp - t7 * t7 * j), L - length])

        def jac(x):
            t1, t7, vp = x
            return np.array([
                [-2.0 * j * t1, 0.0, 1.0],
                [0.0, 2.0 * j * t7, -1.0],
                [-(3.0 * j * t1 * t1 + 2.0 * vi), -(2.0 * vp - 3.0 * j * t7 * t7), -2.0 * t7],
            ])

        def unpack(x):
            t1, t7, vp = x
            return vp, (t1, 0.0, t1, 0.0, t7, 0.0, t7)

        def guess(vp):
            return [math.sqrt(max(vp - vi, 0.0) / j), math.sqrt(max(vp - vo, 0.0) / j), vp]
    return res, jac, unpack, guess


def _peak_interval(req: ProfileRequest, r: _Regime) -> tuple[float, float]:
    s = req.a_cap ** 2 / req.j_cap
    lo, hi = max(req.v_in, req.v_out), req.v_f
    for v_from, sat in ((req.v_in, r.acc_sat), (req.v_out, r.dec_sat)):
        if sat:
            lo = max(lo, v_from + s)
        else:
            hi = min(hi, v_from + s)
    return lo, hi


def _solve_partial(req: ProfileRequest, r: _Regime):
    """Cases 3-6: cruise speed unknown, solved by Newton-Raphson.

    The system is solved in units where a_cap = j_cap = 1 (time a/j, speed
    a^2/j, length a^3/j^2) so that its unknowns are of comparable size.
    """
    a, j = req.a_cap, req.j_cap
    t0, v0 = a / j, a * a / j
    x0 = v0 * t0
    unit = ProfileRequest(req.length / x0, req.v_in / v0, req.v_out / v0, req.v_f / v0,
                          1.0, 1.0)
    vp, tau = _solve_unit(unit, r)
    return vp * v0, tuple(t * t0 for t in tau)


def _solve_unit(req: ProfileRequest, r: _Regime):
    res, jac, unpack, guess = _system(r.case_id, req)
    lo, hi = _peak_interval(req, r)
    first = 0.5 * (req.v_f + max(req.v_in, req.v_out))
    starts = [first] if lo < first < hi else []
    starts.append(0.5 * (lo + hi))
    best = None
    tol = NEWTON_TOL * max(req.length, req.v_f)
    for vp0 in starts:
        sol = newton_raphson(res, jac, guess(vp0), tol=tol, max_iter=100)
        vp, tau = unpack(sol.x)
        ok = (sol.converged and min(tau) >= -1e-12
              and lo - 1e-9 <= vp <= hi + 1e-9)
        if ok:
            return vp, tuple(max(t, 0.0) for t in tau)
        if best is None or sol.residual < best.residual:
            best = sol
    raise ConvergenceError(f"case {r.case_id} system did not converge for {req}", best.residual)


def solve_schedule(req: ProfileRequest) -> PhaseSchedule:
    r = _regime(req)
    L, vi, vo, vf, a, j = (req.length, req.v_in, req.v_out, req.v_f, req.a_cap, req.j_cap)
    if r.case_id == DEGENERATE:
        tau = (0.0, 0.0, 0.0, L / vf if vf > 0.0 else 0.0, 0.0, 0.0, 0.0)
        return build_schedule(vi, tau, (0.0,) * 7, DEGENERATE, vf)
    if r.case_id in (1, 2):
        v_exit = r.v_reached
        sign = 1.0 if vo > vi else -1.0
        if r.case_id == 2 and sign > 0.0:
            t1 = _cubic_time(L, vi, j)
            t2 = 0.0
            v_exit = vi + j * t1 * t1
        else:
            t1, t2 = ramp_times(v_exit - vi, a, j)
        tau = (t1, t2, t1, 0.0, 0.0, 0.0, 0.0)
        jerk = (sign * j, 0.0, -sign * j, 0.0, 0.0, 0.0, 0.0)
        return build_schedule(vi, tau, jerk, r.case_id, max(vi, v_exit))
    if r.full:
        t1, t2 = ramp_times(vf - vi, a, j)
        t5, t6 = ramp_times(vf - vo, a, j)
        cruise = L - ramp_length(vi, vf, a, j) - ramp_length(vf, vo, a, j)
        t4 = max(cruise, 0.0) / vf
        vp = vf
    else:
        lo = max(vi, vo)
        if L <= ramp_length(vi, lo, a, j) + ramp_length(lo, vo, a, j):
            # on the reachability boundary: one ramp only, no cruise
            vp = lo
            t1, t2 = ramp_times(vp - vi, a, j)
            t5, t6 = ramp_times(vp - vo, a, j)
        else:
            vp, tau = _solve_partial(req, r)
            t1, t2, _, _, t5, t6, _ = tau
        t4 = 0.0
    tau = (t1, t2, t1, t4, t5, t6, t5)
    jerk = (j, 0.0, -j, 0.0, -j, 0.0, j)
    return build_schedule(vi, tau, jerk, r.case_id, vp)
