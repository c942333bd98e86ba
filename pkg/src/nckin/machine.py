"""Machine/NC parameter set and its flat key/value config format.

A config document holds one ``key = value [unit]`` entry per line; ``#`` starts
a comment. Scalar keys apply to all three axes, ``<key>_x|y|z`` override one
axis. Everything is stored in SI units.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

AXES = ("x", "y", "z")

# key -> (accepted units with factor to SI, default unit)
_UNITS = {
    "v_max": ({"m/min": 1.0 / 60.0, "mm/min": 1.0 / 60000.0, "m/s": 1.0}, "m/min"),
    "a_max": ({"m/s^2": 1.0}, "m/s^2"),
    "j_max": ({"m/s^3": 1.0}, "m/s^3"),
    "jc_max": ({"m/s^3": 1.0}, "m/s^3"),
    "interp_period": ({"ms": 1e-3, "s": 1.0}, "ms"),
    "tol": ({"mm": 1e-3, "m": 1.0}, "mm"),
}
_DIVISORS = {"m/min": 60.0, "mm/min": 60000.0}
_PER_AXIS = ("v_max", "a_max", "j_max", "tol")
_MIN_PERIOD = 1e-6


class ConfigError(ValueError):
    """Raised for an invalid machine config document."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class MachineLimits:
    """Per-axis dynamic caps plus NC constants, all SI.

    Instances are not validated on construction; use :func:`validate_limits`.
    """

    v_max: tuple[float, float, float]
    a_max: tuple[float, float, float]
    j_max: tuple[float, float, float]
    jc_max: float
    interp_period: float
    tol: tuple[float, float, float]

    def with_tol(self, tol: float) -> "MachineLimits":
        return MachineLimits(self.v_max, self.a_max, self.j_max, self.jc_max,
                             self.interp_period, (tol, tol, tol))


def table1_limits() -> MachineLimits:
    """DMU 50 eVo / Siemens 840D characteristics."""
    return MachineLimits(
        v_max=(50.0 / 60.0,) * 3,
        a_max=(9.8,) * 3,
        j_max=(40.0,) * 3,
        jc_max=60.0,
        interp_period=2e-3,
        tol=(1e-5,) * 3,
    )


def validate_limits(limits: MachineLimits) -> list[str]:
    """Return one message per violated invariant; empty when valid."""
    report = []
    for name in _PER_AXIS:
        for axis, value in zip(AXES, getattr(limits, name)):
            if not (value > 0.0) or not math.isfinite(value):
                report.append(f"{name}_{axis}: non-positive value {value!r}")
    if not (limits.jc_max > 0.0) or not math.isfinite(limits.jc_max):
        report.append(f"jc_max: non-positive value {limits.jc_max!r}")
    period = limits.interp_period
    if not (period > 0.0) or not math.isfinite(period):
        report.append(f"interp_period: non-positive value {period!r}")
    elif period < _MIN_PERIOD:
        report.append(f"interp_period: {period!r} s below minimum {_MIN_PERIOD} s")
    return report


_LINE_RE = re.compile(r"^(?P<key>[A-Za-z_]+)\s*=\s*(?P<value>\S+)(?:\s+(?P<unit>\S+))?\s*$")


def load_machine_config(text: str) -> MachineLimits:
    scalars: dict[str, tuple[float, int]] = {}
    per_axis: dict[tuple[str, int], tuple[float, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE_RE.match(line)
        if m is None:
            raise ConfigError(f"malformed entry {raw.strip()!r}", line=lineno)
        key = m.group("key").lower()
        base, axis = key, None
        if key[-2:] in ("_x", "_y", "_z") and key[:-2] in _PER_AXIS:
            base, axis = key[:-2], AXES.index(key[-1])
        if base not in _UNITS:
            raise ConfigError("unknown key", key=key, line=lineno)
        units, default_unit = _UNITS[base]
        unit = m.group("unit") or default_unit
        if unit not in units:
            raise ConfigError(f"unit {unit!r} not accepted, expected one of {sorted(units)}",
                              key=key, line=lineno)
        try:
            value = float(m.group("value"))
        except ValueError:
            raise ConfigError(f"unparseable number {m.group('value')!r}",
                              key=key, line=lineno) from None
        if not math.isfinite(value):
            raise ConfigError(f"unparseable number {m.group('value')!r}", key=key, line=lineno)
        if value <= 0.0:
            raise ConfigError("non-positive value", key=key, line=lineno)
        if unit in _DIVISORS:
            si = value / _DIVISORS[unit]
        else:
            si = value * units[unit]
        if axis is None:
            scalars[base] = (si, lineno)
        else:
            per_axis[(base, axis)] = (si, lineno)

    def axis_values(name: str) -> tuple[float, float, float]:
        out = []
        for i, axis in enumerate(AXES):
            if (name, i) in per_axis:
                out.append(per_axis[(name, i)][0])
            elif name in scalars:
                out.append(scalars[name][0])
            else:
                raise ConfigError("missing key", key=f"{name}_{axis}")
        return tuple(out)

    for name in ("jc_max", "interp_period"):
        if name not in scalars:
            raise ConfigError("missing key", key=name)
    limits = MachineLimits(
        v_max=axis_values("v_max"),
        a_max=axis_values("a_max"),
        j_max=axis_values("j_max"),
        jc_max=scalars["jc_max"][0],
        interp_period=scalars["interp_period"][0],
        tol=axis_values("tol"),
    )
    report = validate_limits(limits)
    if report:
        key = report[0].split(":", 1)[0]
        raise ConfigError(report[0], key=key)
    return limits


def dump_machine_config(limits: MachineLimits) -> str:
    """Serialize in SI units with round-trip exact float formatting."""
    lines = ["# machine limits (SI)"]
    sections = (("v_max", "m/s"), ("a_max", "m/s^2"), ("j_max", "m/s^3"), ("tol", "m"))
    for name, unit in sections:
        for axis, value in zip(AXES, getattr(limits, name)):
            lines.append(f"{name}_{axis} = {value!r} {unit}")
    lines.append(f"jc_max = {limits.jc_max!r} m/s^3")
    lines.append(f"interp_period = {limits.interp_period!r} s")
    return "\n".join(lines) + "\n"
