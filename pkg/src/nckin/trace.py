"""Sampling a planned path on the NC clock, and trace export."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

CSV_HEADER = ("t_ms,x_mm,y_mm,z_mm,vx_mm_min,vy_mm_min,vz_mm_min,feed_mm_min,"
              "ax,ay,az,jx,jy,jz,element,kind")
FIELDS = tuple(CSV_HEADER.split(","))


@dataclass(frozen=True)
class Trace:
    t: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray
    jerk: np.ndarray
    element: np.ndarray
    kind: tuple
    total_time: float

    @property
    def feed(self) -> np.ndarray:
        return np.linalg.norm(self.velocity, axis=1)

    def __len__(self) -> int:
        return len(self.t)


def total_time(plan) -> float:
    """Exact sum of element durations."""
    return plan.total_duration


def sample_times(duration: float, period: float) -> np.ndarray:
    """0, period, 2 period, ... plus the end instant when it falls between ticks."""
    if not period > 0.0:
        raise ValueError("sampling period must be positive")
    n = int(math.floor(duration / period * (1.0 + 1e-12))) + 1
    t = np.arange(n) * period
    if duration - t[-1] > 1e-12 * max(1.0, duration):
        t = np.append(t, duration)
    return t


def sample_path(plan, period: float) -> Trace:
    """Evaluate every element on a global clock; a sample on a boundary goes to the later element."""
    elements = plan.elements
    starts = plan.start_times
    T = float(starts[-1])
    t = sample_times(T, period)
    idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(elements) - 1)
    pos, vel, acc, jerk = (np.zeros((len(t), 3)) for _ in range(4))
    for k, el in enumerate(elements):
        mask = idx == k
        if not np.any(mask):
            continue
        local = np.clip(t[mask] - starts[k], 0.0, el.duration)
        p, v, a, j = el.evaluate(local)
        pos[mask], vel[mask], acc[mask], jerk[mask] = p, v, a, j
    kinds = tuple(elements[k].kind for k in idx)
    return Trace(t, pos, vel, acc, jerk, idx, kinds, T)


def _num(x: float) -> str:
    return format(float(x) + 0.0, ".9g")


def _rows(trace: Trace):
    feed = trace.feed
    for i in range(len(trace)):
        yield [
            _num(trace.t[i] * 1e3),
            *(_num(c * 1e3) for c in trace.position[i]),
            *(_num(c * 6e4) for c in trace.velocity[i]),
            _num(feed[i] * 6e4),
            *(_num(c) for c in trace.acceleration[i]),
            *(_num(c) for c in trace.jerk[i]),
            str(int(trace.element[i])),
            trace.kind[i],
        ]


def export_trace(trace: Trace, fmt: str = "csv") -> str:
    """Render as CSV (mm, mm/min, m/s^2, m/s^3) or JSON with the same fields."""
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(_rows(trace))
        return buf.getvalue()
    if fmt == "json":
        samples = []
        for row in _rows(trace):
            rec = {name: float(val) for name, val in zip(FIELDS[:-2], row[:-2])}
            rec["element"] = int(row[-2])
            rec["kind"] = row[-1]
            samples.append(rec)
        doc = {"fields": list(FIELDS), "total_time_ms": float(_num(trace.total_time * 1e3)),
               "samples": samples}
        return json.dumps(doc, indent=1) + "\n"
    raise ValueError(f"unknown trace format {fmt!r}")


def load_trace_csv(text: str) -> Trace:
    """Rebuild a (SI) trace from its CSV export."""
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("not a trace export")
    recs = list(csv.reader(lines[1:]))
    if not recs:
        empty = np.zeros((0, 3))
        return Trace(np.zeros(0), empty, empty, empty, empty, np.zeros(0, int), (), 0.0)
    num = np.array([[float(c) for c in r[:14]] for r in recs])
    t = num[:, 0] * 1e-3
    return Trace(t, num[:, 1:4] * 1e-3, num[:, 4:7] / 6e4, num[:, 8:11], num[:, 11:14],
                 np.array([int(r[14]) for r in recs]), tuple(r[15] for r in recs), float(t[-1]))
