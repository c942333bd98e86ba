"""Program ingestion: a G-code subset and bare point/arc tables.

Input units are mm and mm/min; blocks are stored in m and m/s.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

import numpy as np

from .circular import PLANE_NORMALS, ArcGeometry, arc_frames

MM = 1e-3
MM_PER_MIN = 60000.0


class ProgramError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class ProgramWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Block:
    """One programmed move. ``feed=None`` marks a rapid (machine maximum speed)."""

    kind: str  # "linear" | "arc"
    start: np.ndarray
    end: np.ndarray
    feed: float | None
    center: np.ndarray | None = None
    orientation: str | None = None  # "cw" | "ccw"
    plane: str = "XY"
    full_circle: bool = False
    source_line: int | None = None

    @property
    def radius(self) -> float | None:
        if self.center is None:
            return None
        return float(np.linalg.norm(self.start - self.center))

    def arc_geometry(self) -> ArcGeometry:
        if self.kind != "arc":
            raise ValueError("not an arc block")
        return arc_frames(self.start, self.end, self.center, self.orientation,
                          self.plane, self.full_circle)

    @property
    def length(self) -> float:
        if self.kind == "arc":
            return self.arc_geometry().length
        return float(np.linalg.norm(self.end - self.start))


def arc_center_from_radius(start, end, radius: float, orientation: str, plane: str = "XY"):
    """Centre of the arc of signed radius ``radius`` joining two points.

    Positive R gives the minor arc (sweep <= pi), negative R the major one.
    """
    start, end = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
    n = PLANE_NORMALS[plane]
    chord = end - start
    c = float(np.linalg.norm(chord))
    if c == 0.0:
        raise ValueError("radius-form arc needs distinct endpoints")
    r = abs(radius)
    h2 = r * r - 0.25 * c * c
    if h2 < -1e-9 * r * r:
        raise ValueError(f"radius {r} too small for chord {c}")
    h = math.sqrt(max(h2, 0.0))
    left = np.cross(n, chord / c)
    side = 1.0 if orientation == "ccw" else -1.0
    if radius < 0.0:
        side = -side
    return 0.5 * (start + end) + side * h * left


_WORD_RE = re.compile(r"([A-Za-z])\s*([-+]?(?:\d+\.?\d*|\.\d+))")
_COMMENT_RE = re.compile(r"\([^)]*\)|;.*$")
# accepted modal codes that do not change the motion model
_IGNORED_G = {40, 49, 54, 55, 56, 57, 58, 59, 61, 64, 80, 94}
_PLANES = {17: "XY", 18: "XZ", 19: "YZ"}
# centre offset letters per plane
_OFFSETS = {"XY": ("I", "J"), "XZ": ("I", "K"), "YZ": ("J", "K")}


def _warn(message: str, line: int) -> None:
    warnings.warn(f"line {line}: {message}", ProgramWarning, stacklevel=3)


def parse_gcode(text: str, start=(0.0, 0.0, 0.0)) -> list[Block]:
    """Parse absolute-mode G0/G1/G2/G3 programs starting at ``start`` (mm).

    Unsupported but harmless words (spindle, tool, coolant) raise a
    :class:`ProgramWarning`; anything that would change the motion raises
    :class:`ProgramError`.
    """
    pos = np.asarray(start, dtype=float) * MM
    motion: int | None = None
    feed: float | None = None
    plane = "XY"
    blocks: list[Block] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT_RE.sub("", raw).strip()
        if not line or line.startswith("%"):
            continue
        words = []
        rest = _WORD_RE.sub(lambda m: words.append((m.group(1).upper(), m.group(2))) or " ", line)
        if rest.strip():
            raise ProgramError(f"malformed word(s) {rest.strip()!r}", lineno)
        coords: dict[str, float] = {}
        for letter, num in words:
            value = float(num)
            if letter == "G":
                code = int(value) if value == int(value) else None
                if code in (0, 1, 2, 3):
                    motion = code
                elif code in _PLANES:
                    plane = _PLANES[code]
                elif code in (21, 90):  # millimetres, absolute: the only supported modes
                    pass
                elif code == 91:
                    raise ProgramError("G91 incremental mode is not supported", lineno)
                elif code in _IGNORED_G:
                    _warn(f"G{num} ignored", lineno)
                else:
                    raise ProgramError(f"unsupported motion code G{num}", lineno)
            elif letter == "M" or letter in "NSTHD":
                if letter != "N":
                    _warn(f"{letter}{num} ignored", lineno)
            elif letter == "F":
                if value <= 0.0:
                    raise ProgramError("feed must be positive", lineno)
                feed = value / MM_PER_MIN
            elif letter in "XYZIJKR":
                if letter in coords:
                    raise ProgramError(f"word {letter} repeated", lineno)
                coords[letter] = value
            else:
                _warn(f"unknown word {letter}{num} ignored", lineno)
        target = pos.copy()
        for i, axis in enumerate("XYZ"):
            if axis in coords:
                target[i] = coords[axis] * MM
        has_offsets = any(k in coords for k in "IJK")
        if not any(k in coords for k in "XYZIJKR"):
            continue
        if motion is None:
            raise ProgramError("coordinates given before any motion code", lineno)
        if motion in (0, 1):
            if has_offsets or "R" in coords:
                raise ProgramError("arc words on a linear move", lineno)
            if motion == 1 and feed is None:
                raise ProgramError("cutting move without feed", lineno)
            if np.array_equal(target, pos):
                _warn("zero-length move skipped", lineno)
                continue
            blocks.append(Block("linear", pos, target, feed if motion == 1 else None,
                                source_line=lineno))
        else:
            if feed is None:
                raise ProgramError("cutting move without feed", lineno)
            orientation = "cw" if motion == 2 else "ccw"
            full = False
            if has_offsets and "R" in coords:
                raise ProgramError("arc gives both centre offsets and R", lineno)
            if has_offsets:
                offset = np.zeros(3)
                for letter, i in (("I", 0), ("J", 1), ("K", 2)):
                    offset[i] = coords.get(letter, 0.0) * MM
                off_letters = set(k for k in "IJK" if k in coords)
                if not off_letters <= set(_OFFSETS[plane]):
                    raise ProgramError(f"offset word outside plane {plane}", lineno)
                center = pos + offset
                full = bool(np.array_equal(target, pos))
            elif "R" in coords:
                try:
                    center = arc_center_from_radius(pos, target, coords["R"] * MM,
                                                    orientation, plane)
                except ValueError as exc:
                    raise ProgramError(str(exc), lineno) from None
            else:
                raise ProgramError("arc needs I/J/K or R", lineno)
            block = Block("arc", pos, target, feed, center, orientation, plane, full, lineno)
            try:
                block.arc_geometry()
            except ValueError as exc:
                raise ProgramError(str(exc), lineno) from None
            blocks.append(block)
        pos = target
    return blocks


def _fmt(x_m: float) -> str:
    # fixed point: G-code numbers have no exponent form
    text = format(x_m / MM, ".12f").rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def serialize_gcode(blocks: list[Block]) -> str:
    """Absolute G-code for ``blocks``; parse it back with ``start=blocks[0].start``."""
    lines = ["G90 G21"]
    plane = None
    for b in blocks:
        words = []
        if b.kind == "arc" and b.plane != plane:
            plane = b.plane
            words.append({"XY": "G17", "XZ": "G18", "YZ": "G19"}[plane])
        if b.kind == "linear":
            words.append("G1" if b.feed is not None else "G0")
        else:
            words.append("G2" if b.orientation == "cw" else "G3")
        words += [f"{ax}{_fmt(c)}" for ax, c in zip("XYZ", b.end)]
        if b.kind == "arc":
            offset = b.center - b.start
            for letter in _OFFSETS[b.plane]:
                words.append(f"{letter}{_fmt(offset['IJK'.index(letter)])}")
        if b.feed is not None:
            words.append(f"F{format(b.feed * MM_PER_MIN, '.12f').rstrip('0').rstrip('.')}")
        lines.append(" ".join(words))
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(r"^\s*(start|orientation|mode|feed)\s*=\s*(.*?)\s*$", re.I)


def load_point_table(text: str, mode: str | None = None, feed: float | None = None,
                     start=None, orientation: str | None = None) -> list[Block]:
    """Blocks from a bare table of X Y Z (linear) or X Y R (circular) rows in mm.

    Header lines ``start= x y z``, ``orientation= cw|ccw|alt``, ``mode=`` and
    ``feed=`` (mm/min) supply defaults; explicit arguments win. In linear mode
    the first row is the start point. In circular mode rows are arc end points
    in the XY plane with signed radius (negative = major arc), starting from
    ``start`` (default origin), all clockwise unless told otherwise.
    """
    header: dict[str, str] = {}
    rows: list[tuple[int, list[float]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER_RE.match(line)
        if m:
            header[m.group(1).lower()] = m.group(2)
            continue
        cells = [c for c in re.split(r"[,\s]+", line) if c]
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise ProgramError(f"non-numeric cell in {line!r}", lineno) from None
        if len(values) != 3:
            raise ProgramError(f"expected 3 columns, got {len(values)}", lineno)
        rows.append((lineno, values))

    mode = (mode or header.get("mode", "linear")).lower()
    if feed is None:
        if "feed" not in header:
            raise ProgramError("no feed given")
        feed = float(header["feed"])
    if feed <= 0.0:
        raise ProgramError("feed must be positive")
    f = feed / MM_PER_MIN
    blocks: list[Block] = []
    if mode == "linear":
        pts = [(n, np.asarray(v) * MM) for n, v in rows]
        for (_, p0), (n1, p1) in zip(pts, pts[1:]):
            blocks.append(Block("linear", p0, p1, f, source_line=n1))
        return blocks
    if mode != "circular":
        raise ProgramError(f"unknown table mode {mode!r}")
    if start is None:
        start = [float(c) for c in re.split(r"[,\s]+", header["start"])] if "start" in header \
            else (0.0, 0.0, 0.0)
    pos = np.asarray(start, dtype=float) * MM
    orientation = (orientation or header.get("orientation", "cw")).lower()
    if orientation not in ("cw", "ccw", "alt"):
        raise ProgramError(f"bad orientation {orientation!r}")
    for k, (lineno, (x, y, r)) in enumerate(rows):
        if orientation == "alt":
            orient = "cw" if k % 2 == 0 else "ccw"
        else:
            orient = orientation
        end = np.array([x * MM, y * MM, pos[2]])
        try:
            center = arc_center_from_radius(pos, end, r * MM, orient)
        except ValueError as exc:
            raise ProgramError(str(exc), lineno) from None
        blocks.append(Block("arc", pos, end, f, center, orient, "XY", False, lineno))
        pos = end
    return blocks
