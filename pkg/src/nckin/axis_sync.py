"""Synchronized 3-axis linear blocks.

All axes share the seven phase durations: the block is planned on its arc
length with caps scaled so that no axis exceeds its own limits, and each axis
follows the path motion times its direction cosine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .machine import MachineLimits
from .scurve import PhaseSchedule, ProfileRequest, solve_schedule

ACTIVE_EPS = 1e-12


def effective_caps(direction, limits: MachineLimits, v_f: float | None = None):
    """Path-level (speed, acceleration, jerk) caps along a direction.

    Each cap is the minimum over moving axes of axis_cap / |cosine|. The
    direction need not be normalized. ``v_f=None`` means the move runs at the
    machine's maximum speed.
    """
    u = np.abs(np.asarray(direction, dtype=float))
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        raise ValueError("direction has no moving axis")
    u = u / norm
    active = u >= ACTIVE_EPS
    if not np.any(active):
        raise ValueError("direction has no moving axis")
    v_cap = float(np.min(np.asarray(limits.v_max)[active] / u[active]))
    a_cap = float(np.min(np.asarray(limits.a_max)[active] / u[active]))
    j_cap = float(np.min(np.asarray(limits.j_max)[active] / u[active]))
    if v_f is not None:
        v_cap = min(v_cap, v_f)
    return v_cap, a_cap, j_cap


def limiting_axis(displacements, limits: MachineLimits) -> int:
    """Index of the axis slowest to cover its own displacement standalone.

    Each moving axis is timed from rest to rest at its own caps; ties go to
    the lower index.
    """
    d = np.abs(np.asarray(displacements, dtype=float))
    if not np.any(d > 0.0):
        raise ValueError("all-zero displacement")
    best, best_time = -1, -1.0
    for i in range(3):
        if d[i] == 0.0:
            continue
        req = ProfileRequest(float(d[i]), 0.0, 0.0, limits.v_max[i], limits.a_max[i],
                             limits.j_max[i])
        t = solve_schedule(req).duration
        if t > best_time:
            best, best_time = i, t
    return best


@dataclass(frozen=True)
class SyncedLinearPlan:
    start: np.ndarray
    end: np.ndarray
    direction: np.ndarray
    limiting_axis: int
    per_axis_caps: tuple  # ((V_i, A_i, J_i) for x, y, z)
    schedule: PhaseSchedule
    request: ProfileRequest

    kind = "linear"

    @property
    def duration(self) -> float:
        return self.schedule.duration

    def evaluate(self, t):
        """Machine-frame (position, velocity, acceleration, jerk) at t."""
        s, v, a, j = self.schedule.evaluate(t)
        u = self.direction
        if np.ndim(s) == 0:
            return self.start + s * u, v * u, a * u, j * u
        s, v, a, j = (np.asarray(x)[:, None] for x in (s, v, a, j))
        return self.start + s * u, v * u, a * u, j * u


def plan_linear_block(start, end, v_f: float | None, v_in: float, v_out: float,
                      limits: MachineLimits) -> SyncedLinearPlan:
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    delta = end - start
    length = float(np.linalg.norm(delta))
    if length == 0.0:
        raise ValueError("zero-length linear block")
    u = delta / length
    # snap residue components so the in/out-of-plane classification is exact
    u = np.where(np.abs(u) < ACTIVE_EPS, 0.0, u)
    v_cap, a_cap, j_cap = effective_caps(u, limits, v_f)
    req = ProfileRequest(length, v_in, v_out, v_cap, a_cap, j_cap)
    schedule = solve_schedule(req)
    caps = tuple((v_cap * abs(c), a_cap * abs(c), j_cap * abs(c)) for c in u)
    return SyncedLinearPlan(start, end, u, limiting_axis(delta, limits), caps, schedule, req)
