"""Command-line driver: ``nckin [simulate] PROGRAM``, ``nckin validate``, ``nckin cases``."""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from collections import Counter
from pathlib import Path

from .machine import ConfigError, MachineLimits, load_machine_config, table1_limits
from .planner import POLICIES, PathPlan, PlanningError, plan_path
from .scurve import ProfileRequest, case_conditions, solve_schedule
from .toolpath_io import MM_PER_MIN, ProgramError, load_point_table, parse_gcode
from .trace import export_trace, sample_path

SUBCOMMANDS = ("simulate", "validate", "cases")
_GCODE_HINT = re.compile(r"^\s*(%|[NnGgMm]\d)", re.M)


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nckin", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def program_args(p):
        p.add_argument("program", help="G-code file or point table")
        p.add_argument("--machine", help="machine config file (default: DMU 50 / 840D values)")
        p.add_argument("--feed", type=_positive, help="feed override, mm/min")
        p.add_argument("--tol", type=_positive, help="corner tolerance override, mm")

    sim = sub.add_parser("simulate", help="plan and sample a program")
    program_args(sim)
    sim.add_argument("--junction", choices=POLICIES, default="polynomial")
    sim.add_argument("--out", help="trace output path (default: stdout unless --summary)")
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("--summary", action="store_true", help="print a JSON summary to stdout")
    sim.add_argument("--period", type=_positive, help="sampling period, ms")

    val = sub.add_parser("validate", help="lint a machine config and/or program")
    val.add_argument("program", nargs="?")
    val.add_argument("--machine")

    cases = sub.add_parser("cases", help="show the case dispatch for one profile (SI units)")
    for name in ("length", "v-in", "v-out", "v-f", "a", "j"):
        cases.add_argument(f"--{name}", type=float, required=True)
    return parser


def load_limits(path: str | None, tol_mm: float | None = None) -> MachineLimits:
    if path is None:
        limits = table1_limits()
    else:
        p = Path(path)
        if not p.is_file():
            raise FileNotFoundError(f"machine config not found: {path}")
        limits = load_machine_config(p.read_text())
    if tol_mm is not None:
        limits = limits.with_tol(tol_mm * 1e-3)
    return limits


def load_program(path: str, feed_mm_min: float | None = None):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"program not found: {path}")
    text = p.read_text()
    if _GCODE_HINT.search(text):
        return parse_gcode(text)
    return load_point_table(text, feed=feed_mm_min)


def summarize(plan: PathPlan) -> dict:
    to_mm_min = MM_PER_MIN
    junctions = []
    for rep in plan.junctions:
        v_f = min(plan.feeds[rep.index], plan.feeds[rep.index + 1])
        entry = {
            "index": rep.index + 1,
            "kind": rep.kind,
            "policy": rep.policy,
            "v_in_mm_min": round(rep.v_in * to_mm_min, 6),
            "v_transition_mm_min": round(rep.v_min * to_mm_min, 6),
            "feed_drop_pct": round(100.0 * (v_f - rep.v_min) / v_f, 6),
            "clamped": rep.clamped,
            "lowered_by_passes": rep.lowered,
        }
        for key in ("v_lim_j", "v_lim_a", "v_disc"):
            value = getattr(rep, key)
            if value is not None:
                entry[f"{key}_mm_min"] = round(value * to_mm_min, 6)
        junctions.append(entry)
    hist = Counter(str(c) for c in plan.case_ids())
    return {
        "total_time_ms": round(plan.total_duration * 1e3, 6),
        "elements": len(plan.elements),
        "junctions": junctions,
        "case_histogram": dict(sorted(hist.items())),
    }


def _simulate(args) -> int:
    limits = load_limits(args.machine, args.tol)
    blocks = load_program(args.program, args.feed)
    feed = args.feed / MM_PER_MIN if args.feed is not None else None
    plan = plan_path(blocks, limits, args.junction, feed)
    period = args.period * 1e-3 if args.period is not None else limits.interp_period
    doc = export_trace(sample_path(plan, period), args.format)
    if args.out:
        Path(args.out).write_text(doc)
    elif not args.summary:
        sys.stdout.write(doc)
    if args.summary:
        json.dump(summarize(plan), sys.stdout, indent=2)
        sys.stdout.write("\n")
    return 0


def _validate(args) -> int:
    problems = []
    try:
        load_limits(args.machine)
    except (ConfigError, OSError) as exc:
        problems.append(f"machine: {exc}")
    if args.program:
        try:
            blocks = load_program(args.program)
            if not blocks:
                problems.append("program: no motion blocks")
        except (ProgramError, OSError, ValueError) as exc:
            problems.append(f"program: {exc}")
    for line in problems:
        print(line, file=sys.stderr)
    if not problems:
        print("ok")
    return 1 if problems else 0


def _cases(args) -> int:
    req = ProfileRequest(args.length, args.v_in, args.v_out, args.v_f, args.a, args.j)
    sched = solve_schedule(req)
    out = {
        "conditions": {str(k): v for k, v in case_conditions(req).items()},
        "case": str(sched.case_id),
        "tau": list(sched.tau),
        "v_peak": sched.v_peak,
        "v_exit": sched.v_exit,
        "duration": sched.duration,
    }
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] not in SUBCOMMANDS and argv[0] not in ("-h", "--help"):
        argv.insert(0, "simulate")
    args = build_parser().parse_args(argv)
    if args.command is None:
        build_parser().print_help()
        return 2
    handler = {"simulate": _simulate, "validate": _validate, "cases": _cases}[args.command]
    try:
        return handler(args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head): not an error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (ConfigError, ProgramError, PlanningError, OSError, ValueError) as exc:
        print(f"nckin: error: {exc}", file=sys.stderr)
        return 1
