"""Whole-path planning: junction speeds, reachability passes, element assembly.

Each junction gets a speed from its model (polynomial corner, legacy circle
corner, curvature discontinuity, or a stop). A backward then a forward pass
lower junction speeds until every block can meet both of its boundary speeds,
after which each block is solved independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .axis_sync import effective_caps, plan_linear_block
from .circular import arc_speed_cap, plan_arc_block
from .machine import MachineLimits
from .scurve import max_reachable_speed
from .toolpath_io import Block
from .transitions import (ColinearCorner, ReversalCorner, circular_corner_feed, clamp_transition_length, corner_geometry,
                          curvature_discontinuity_feed, polynomial_transition,
                          transition_min_speed)

POLICIES = ("polynomial", "circular", "stop")
ENDPOINT_TOL = 1e-9
# direction change below which two elements count as tangent (rad)
TANGENT_ANGLE = math.radians(0.5)
_MAX_ROUNDS = 100


class PlanningError(ValueError):
    pass


@dataclass
class JunctionReport:
    index: int
    kind: str  # corner | straight | tangent | kink | reversal
    policy: str
    v_in: float = 0.0
    v_request: float = 0.0
    v_lim_j: float | None = None
    v_lim_a: float | None = None
    v_disc: float | None = None
    radius: float | None = None
    v_min: float = 0.0
    clamped: bool = False
    lowered: bool = False
    notes: list = field(default_factory=list)


@dataclass(frozen=True)
class PathPlan:
    elements: tuple
    junctions: tuple
    feeds: tuple  # programmed path speed per block (m/s)

    @property
    def durations(self) -> np.ndarray:
        return np.array([e.duration for e in self.elements])

    @property
    def start_times(self) -> np.ndarray:
        return np.concatenate(([0.0], np.cumsum(self.durations)))

    @property
    def total_duration(self) -> float:
        return float(math.fsum(e.duration for e in self.elements))

    def case_ids(self) -> list:
        return [e.schedule.case_id for e in self.elements if hasattr(e, "schedule")]


def _exit_dir(b: Block) -> np.ndarray:
    if b.kind == "linear":
        d = b.end - b.start
        return d / np.linalg.norm(d)
    g = b.arc_geometry()
    return g.tangent(g.sweep)


def _entry_dir(b: Block) -> np.ndarray:
    if b.kind == "linear":
        d = b.end - b.start
        return d / np.linalg.norm(d)
    return b.arc_geometry().tangent(0.0)


def _curvature(b: Block, at_end: bool) -> np.ndarray:
    """Curvature vector (toward the centre, magnitude 1/R); zero on lines."""
    if b.kind == "linear":
        return np.zeros(3)
    g = b.arc_geometry()
    return -g.radial(g.sweep if at_end else 0.0) / g.radius


def _merge_colinear(blocks: list[Block]) -> list[Block]:
    out: list[Block] = []
    for b in blocks:
        if out and b.kind == "linear" and out[-1].kind == "linear" and b.feed == out[-1].feed:
            prev = out[-1]
            if float(np.linalg.norm(_exit_dir(prev) - _entry_dir(b))) < 1e-9:
                out[-1] = Block("linear", prev.start, b.end, b.feed, source_line=prev.source_line)
                continue
        out.append(b)
    return out


def _block_cap(b: Block, limits: MachineLimits, feed: float | None) -> float:
    if b.kind == "linear":
        return effective_caps(b.end - b.start, limits, feed)[0]
    v = feed if feed is not None else min(limits.v_max)
    return arc_speed_cap(b.arc_geometry(), v, limits)[0]


def backward_feasibility_pass(speeds: list[float], lengths: list[float], caps: list) -> list[float]:
    """Lower junction speeds so each block can brake to its exit speed.

    ``speeds[k]`` is the entry speed of block k and ``speeds[k+1]`` its exit;
    ``caps[k] = (scale, a, j)`` in the block's profile units. Speeds only
    decrease.
    """
    out = list(speeds)
    for k in range(len(lengths) - 1, -1, -1):
        scale, a, j = caps[k]
        reach = max_reachable_speed(lengths[k], out[k + 1] * scale, a, j) / scale
        if reach < out[k]:
            out[k] = reach
    return out


def forward_feasibility_pass(speeds: list[float], lengths: list[float], caps: list) -> list[float]:
    """Mirror of :func:`backward_feasibility_pass` for the acceleration side."""
    out = list(speeds)
    for k in range(len(lengths)):
        scale, a, j = caps[k]
        reach = max_reachable_speed(lengths[k], out[k] * scale, a, j) / scale
        if reach < out[k + 1]:
            out[k + 1] = reach
    return out


def _junction(i: int, prev: Block, nxt: Block, caps: tuple[float, float], policy: str,
              limits: MachineLimits):
    """Report plus optional corner geometry for the junction after block ``i``."""
    v_cap = min(caps)
    t1, t2 = _exit_dir(prev), _entry_dir(nxt)
    angle = math.acos(max(-1.0, min(1.0, float(t1 @ t2))))
    if prev.kind == "linear" and nxt.kind == "linear":
        try:
            geom = corner_geometry(prev.start, prev.end, nxt.end, limits.tol)
        except ColinearCorner:
            r = JunctionReport(i, "straight", policy, v_request=v_cap)
            return r, None
        except ReversalCorner:
            return JunctionReport(i, "reversal", "stop"), None
        if policy == "stop":
            return JunctionReport(i, "corner", policy), None
        if policy == "circular":
            radius, v_disc = circular_corner_feed(min(limits.tol), geom.deflection,
                                                  prev.length, nxt.length, v_cap, limits)
            return JunctionReport(i, "corner", policy, v_request=v_disc, v_disc=v_disc,
                                  radius=radius), None
        geom, (lim_j, lim_a, v_in), clamped = clamp_transition_length(
            geom, prev.length, nxt.length, limits, v_cap)
        r = JunctionReport(i, "corner", policy, v_request=v_in, v_lim_j=lim_j,
                           v_lim_a=lim_a, clamped=clamped)
        return r, geom
    if angle > TANGENT_ANGLE:
        return JunctionReport(i, "kink", "stop", notes=[f"tangent jump {math.degrees(angle):.3g} deg"]), None
    if policy == "stop":
        return JunctionReport(i, "tangent", policy), None
    k1, k2 = _curvature(prev, True), _curvature(nxt, False)
    ref = k1 if np.linalg.norm(k1) > 0.0 else k2
    ref = ref / np.linalg.norm(ref)
    c1, c2 = float(k1 @ ref), float(k2 @ ref)
    r1 = 1.0 / c1 if c1 != 0.0 else math.inf
    r2 = 1.0 / c2 if c2 != 0.0 else math.inf
    v_disc = curvature_discontinuity_feed(r1, r2, limits.interp_period, limits.jc_max, v_cap)
    return JunctionReport(i, "tangent", "curvature", v_request=v_disc, v_disc=v_disc,
                          radius=None), None


def plan_path(blocks: list[Block], limits: MachineLimits, policy: str = "polynomial",
              feed: float | None = None) -> PathPlan:
    """Plan a program into timed elements.

    Args:
        blocks: consecutive moves sharing endpoints.
        limits: machine caps.
        policy: corner model between linear blocks: ``polynomial`` (default),
            ``circular`` (legacy feed limit, corner crossed as a point) or
            ``stop``.
        feed: optional feed override (m/s) for all cutting moves.

    Returns:
        PathPlan with blocks and polynomial transitions in path order.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown junction policy {policy!r}")
    if not blocks:
        raise PlanningError("empty program")
    for k, b in enumerate(blocks):
        if b.length <= 0.0:
            raise PlanningError(f"block {k} has zero length")
        if k and float(np.linalg.norm(b.start - blocks[k - 1].end)) > ENDPOINT_TOL:
            raise PlanningError(f"block {k} does not start where block {k - 1} ends")
    if feed is not None:
        blocks = [Block(b.kind, b.start, b.end, feed if b.feed is not None else None,
                        b.center, b.orientation, b.plane, b.full_circle, b.source_line)
                  for b in blocks]
    blocks = _merge_colinear(blocks)
    n = len(blocks)
    feeds = [_block_cap(b, limits, b.feed) for b in blocks]

    junctions: list[JunctionReport] = []
    corners: list = []
    for i in range(n - 1):
        rep, geom = _junction(i, blocks[i], blocks[i + 1], (feeds[i], feeds[i + 1]),
                              policy, limits)
        junctions.append(rep)
        corners.append(geom)

    # trimmed lengths of linear blocks
    trim_in = [0.0] * n
    trim_out = [0.0] * n
    for i, g in enumerate(corners):
        if g is not None:
            trim_out[i] = g.half_length
            trim_in[i + 1] = g.half_length
    lengths = []
    for k, b in enumerate(blocks):
        lengths.append(b.length - trim_in[k] - trim_out[k])
    # speeds at block boundaries: 0 at both path ends
    speeds = [0.0] + [min(j.v_request, feeds[i], feeds[i + 1])
                      for i, j in enumerate(junctions)] + [0.0]
    # a block eaten up by both neighbouring transitions disappears; its two
    # transitions then share one speed
    keep = [True] * n
    for k in range(n):
        if lengths[k] <= 1e-12 and trim_in[k] > 0.0 and trim_out[k] > 0.0:
            keep[k] = False
            shared = min(speeds[k], speeds[k + 1])
            speeds[k] = speeds[k + 1] = shared
            lengths[k] = 0.0
        elif lengths[k] <= 0.0:
            raise PlanningError(f"block {k} left with no length after corner trimming")

    requested = list(speeds)
    arc_caps: dict[int, tuple[float, float]] = {}
    plans: list = [None] * n
    for _ in range(_MAX_ROUNDS):
        caps, active = [], []
        for k, b in enumerate(blocks):
            if not keep[k]:
                continue
            if b.kind == "linear":
                _, a, j = effective_caps(b.end - b.start, limits)
                caps.append((1.0, a, j))
                active.append((k, lengths[k]))
            else:
                g = b.arc_geometry()
                if k not in arc_caps:
                    p = plan_arc_block(g, feeds[k], min(speeds[k], feeds[k]),
                                       min(speeds[k + 1], feeds[k]), limits)
                    arc_caps[k] = (p.a_c, p.j_c)
                a_c, j_c = arc_caps[k]
                caps.append((1.0 / g.radius, a_c, j_c))
                active.append((k, g.sweep))
        # run the passes on the chain of kept blocks
        idx = [k for k, _ in active]
        chain = [speeds[idx[0]]] + [speeds[k + 1] for k in idx]
        lens = [length for _, length in active]
        chain = backward_feasibility_pass(chain, lens, caps)
        chain = forward_feasibility_pass(chain, lens, caps)
        speeds[idx[0]] = chain[0]
        for pos, k in enumerate(idx):
            speeds[k + 1] = chain[pos + 1]
        for k in range(n):
            if not keep[k]:
                speeds[k + 1] = speeds[k] = min(speeds[k], speeds[k + 1])
        changed = False
        for k in idx:
            b = blocks[k]
            v_in, v_out = speeds[k], speeds[k + 1]
            if b.kind == "linear":
                direction = (b.end - b.start) / np.linalg.norm(b.end - b.start)
                start = b.start + trim_in[k] * direction
                end = b.end - trim_out[k] * direction
                plans[k] = plan_linear_block(start, end, feeds[k], v_in, v_out, limits)
                exit_speed = plans[k].schedule.v_exit
            else:
                plans[k] = plan_arc_block(b.arc_geometry(), feeds[k], v_in, v_out, limits)
                arc_caps[k] = (plans[k].a_c, plans[k].j_c)
                exit_speed = plans[k].v_exit
            if plans[k].schedule.case_id in (1, 2):
                # caps shrank after planning (arc safety scaling): retry lower
                speeds[k + 1] = min(v_out, exit_speed) * (1.0 - 1e-12)
                changed = True
        if not changed:
            break
    else:
        raise PlanningError("junction speeds did not settle")

    elements = []
    for k in range(n):
        if keep[k]:
            elements.append(plans[k])
        if k < n - 1:
            rep = junctions[k]
            rep.v_in = float(speeds[k + 1])
            rep.lowered = bool(rep.v_in < requested[k + 1])
            rep.v_min = rep.v_in
            g = corners[k]
            if g is not None:
                if rep.v_in <= 0.0:
                    raise PlanningError(f"corner {k} trimmed but reached at rest")
                tr = polynomial_transition(g, rep.v_in)
                rep.v_min = transition_min_speed(tr)
                elements.append(tr)
    return PathPlan(tuple(elements), tuple(junctions), tuple(feeds))
