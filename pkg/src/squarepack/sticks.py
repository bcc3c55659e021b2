"""Sticks: maximal boundary lines between tiles of distinct parities.

An edge of the unit lattice is a stick edge when the two faces it bounds
are covered by tiles of distinct parities. Stick edges of one
configuration form disjoint straight segments (sticks), each vertical or
horizontal; a vertical stick at even x is of type (ver, 0), at odd x of
type (ver, 1), and analogously for horizontal sticks via their
y-coordinate.

Rectangles are divided by sticks spanning their full extent while
staying strictly interior in the transverse direction; the "properly
divides" refinement additionally requires dividing the concentric
rectangle shrunk by a factor (N - 2)/N.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .errors import DimensionError, WrapError
from .lattice import Configuration, Point, tile_parity_class

Edge = Tuple[str, int, int]  # ("v", x, y) from (x,y) to (x,y+1); ("h", x, y) to (x+1,y)

PHASES = ("ver0", "ver1", "hor0", "hor1")
DEFAULT_N = 4


@dataclass(frozen=True)
class Stick:
    """A maximal run of stick edges.

    ``anchor`` is the lowest endpoint (vertical) or leftmost endpoint
    (horizontal); ``length`` counts edges. A wrapping stick closes into a
    torus cycle and its length equals the full torus dimension.
    """

    orientation: str  # "vertical" | "horizontal"
    anchor: Point
    length: int
    wraps: bool = False

    @property
    def parity(self) -> int:
        fixed = self.anchor[0] if self.orientation == "vertical" else self.anchor[1]
        return fixed % 2

    @property
    def type(self) -> str:
        return ("ver" if self.orientation == "vertical" else "hor") + str(self.parity)


@dataclass(frozen=True)
class Rect:
    """Axis-parallel rectangle [x, x+width] x [y, y+height]."""

    corner: Point
    width: int
    height: int

    def inner(self, n: int = DEFAULT_N) -> "Rect":
        """Concentric rectangle with dimensions scaled by (n - 2)/n."""
        if self.width % n or self.height % n:
            raise DimensionError(
                f"rectangle {self.width}x{self.height} not divisible by N={n}"
            )
        dx, dy = self.width // n, self.height // n
        return Rect(
            (self.corner[0] + dx, self.corner[1] + dy),
            self.width - 2 * dx,
            self.height - 2 * dy,
        )


# -- stick edge detection ---------------------------------------------------


def _face_parities(config: Configuration):
    """Vectorized per-face cover data for a periodic configuration.

    Returns (covered, hpar, vpar) arrays indexed [fy, fx]; parity entries
    are meaningful only where covered.
    """
    w, h = config.width, config.height
    grid = config.occupancy_grid().astype(np.int8)
    covered = np.zeros((h, w), dtype=np.int8)
    hpar = np.zeros((h, w), dtype=np.int8)
    vpar = np.zeros((h, w), dtype=np.int8)
    ys, xs = np.mgrid[0:h, 0:w]
    for dx in (0, 1):
        for dy in (0, 1):
            occ = grid[(ys + dy) % h, (xs + dx) % w]
            covered += occ
            hpar += occ * ((xs + dx - 1) % 2).astype(np.int8)
            vpar += occ * ((ys + dy - 1) % 2).astype(np.int8)
    return covered.astype(bool), hpar, vpar


def detect_stick_edges(config: Configuration) -> Set[Edge]:
    """All stick edges of the configuration.

    For the rectangle modes the scan covers a margin of two cells around
    the region so that boundary sticks against the fully-packed exterior
    are found.
    """
    edges: Set[Edge] = set()
    w, h = config.width, config.height
    if config.boundary == "periodic":
        covered, hpar, vpar = _face_parities(config)
        # vertical edges at x between faces x-1 and x
        left_c = np.roll(covered, 1, axis=1)
        both = covered & left_c
        differs = (np.roll(hpar, 1, axis=1) != hpar) | (np.roll(vpar, 1, axis=1) != vpar)
        for fy, fx in zip(*np.nonzero(both & differs)):
            edges.add(("v", int(fx), int(fy)))
        down_c = np.roll(covered, 1, axis=0)
        both = covered & down_c
        differs = (np.roll(hpar, 1, axis=0) != hpar) | (np.roll(vpar, 1, axis=0) != vpar)
        for fy, fx in zip(*np.nonzero(both & differs)):
            edges.add(("h", int(fx), int(fy)))
        return edges

    def parity_at(corner):
        center = config.face_cover_center(corner)
        return None if center is None else tile_parity_class(center).as_tuple()

    for x in range(-1, w + 2):
        for y in range(-2, h + 2):
            pl = parity_at((x - 1, y))
            if pl is None:
                continue
            pr = parity_at((x, y))
            if pr is not None and pr != pl:
                edges.add(("v", x, y))
    for y in range(-1, h + 2):
        for x in range(-2, w + 2):
            pb = parity_at((x, y - 1))
            if pb is None:
                continue
            pt = parity_at((x, y))
            if pt is not None and pt != pb:
                edges.add(("h", x, y))
    return edges


def extract_sticks(
    config: Configuration, edges: Optional[Set[Edge]] = None
) -> List[Stick]:
    """Partition the stick edges into maximal straight runs."""
    if edges is None:
        edges = detect_stick_edges(config)
    sticks: List[Stick] = []
    periodic = config.boundary == "periodic"
    for orientation, fixed_of, var_of, modulus in (
        ("vertical", lambda e: e[1], lambda e: e[2], config.height),
        ("horizontal", lambda e: e[2], lambda e: e[1], config.width),
    ):
        key = "v" if orientation == "vertical" else "h"
        lines: Dict[int, List[int]] = defaultdict(list)
        for e in edges:
            if e[0] == key:
                lines[fixed_of(e)].append(var_of(e))
        for fixed, values in lines.items():
            values = sorted(set(values))
            if periodic and len(values) == modulus:
                anchor = (fixed, 0) if key == "v" else (0, fixed)
                sticks.append(Stick(orientation, anchor, modulus, wraps=True))
                continue
            runs: List[List[int]] = []
            for v in values:
                if runs and v == runs[-1][-1] + 1:
                    runs[-1].append(v)
                else:
                    runs.append([v])
            # on a torus, a run ending at modulus-1 may continue at 0
            if periodic and len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == modulus - 1:
                runs[0] = runs.pop() + [v + modulus for v in runs[0]]
            for run in runs:
                start = run[0]
                anchor = (fixed, start) if key == "v" else (start, fixed)
                sticks.append(Stick(orientation, anchor, len(run)))
    return sticks


# -- division predicates -----------------------------------------------------


def divides(p1: Point, p2: Point, rect: Rect) -> bool:
    """Does the segment from p1 to p2 divide the rectangle?

    A vertical segment divides when it spans the rectangle's full height
    and its x-coordinate is strictly between the rectangle's sides; the
    horizontal case is symmetric. Non-axis-aligned segments never divide.
    """
    (x1, y1), (x2, y2) = p1, p2
    x0, y0 = rect.corner
    if x1 == x2 and y1 != y2:
        lo, hi = min(y1, y2), max(y1, y2)
        return lo <= y0 and y0 + rect.height <= hi and x0 < x1 < x0 + rect.width
    if y1 == y2 and x1 != x2:
        lo, hi = min(x1, x2), max(x1, x2)
        return lo <= x0 and x0 + rect.width <= hi and y0 < y1 < y0 + rect.height
    return False


def _stick_segments(stick: Stick, config: Configuration):
    """Planar segments representing a stick, including torus shift copies."""
    x, y = stick.anchor
    if stick.orientation == "vertical":
        base = ((x, y), (x, y + stick.length))
        shifts = [(0, 0)]
        if config.boundary == "periodic":
            if stick.wraps:
                # a cycle spans every window at its x-line
                return [((x, -config.height), (x, 2 * config.height))]
            shifts = [(0, 0), (0, -config.height), (0, config.height)]
    else:
        base = ((x, y), (x + stick.length, y))
        shifts = [(0, 0)]
        if config.boundary == "periodic":
            if stick.wraps:
                return [((-config.width, y), (2 * config.width, y))]
            shifts = [(0, 0), (-config.width, 0), (config.width, 0)]
    (p1, p2) = base
    return [
        ((p1[0] + dx, p1[1] + dy), (p2[0] + dx, p2[1] + dy)) for dx, dy in shifts
    ]


def stick_divides(stick: Stick, rect: Rect, config: Configuration) -> bool:
    return any(divides(p1, p2, rect) for p1, p2 in _stick_segments(stick, config))


def properly_divides(
    stick: Stick, rect: Rect, config: Configuration, n: int = DEFAULT_N
) -> bool:
    """True when the stick divides both the rectangle and its inner copy."""
    inner = rect.inner(n)
    return stick_divides(stick, rect, config) and stick_divides(stick, inner, config)


def divided_directions(
    config: Configuration, rect: Rect, sticks: Optional[Sequence[Stick]] = None
) -> Tuple[bool, bool]:
    """(vertically divided, horizontally divided) by any stick."""
    if sticks is None:
        sticks = extract_sticks(config)
    ver = any(
        s.orientation == "vertical" and stick_divides(s, rect, config) for s in sticks
    )
    hor = any(
        s.orientation == "horizontal" and stick_divides(s, rect, config) for s in sticks
    )
    return ver, hor


def _type_matches(stick: Stick, requested: str) -> bool:
    if requested in ("ver", "hor"):
        return stick.type.startswith(requested)
    return stick.type == requested


def psi_set(
    config: Configuration,
    k: int,
    l: int,
    stick_type: str,
    n: int = DEFAULT_N,
    sticks: Optional[Sequence[Stick]] = None,
) -> Set[Point]:
    """Grid points whose NK x NL window is properly divided by a stick
    of the requested type ("ver0", "ver1", "hor0", "hor1", "ver", "hor").

    The window with grid coordinates (x, y) has its corner at (xK, yL);
    windows must fit inside the region without torus wrap.
    """
    if stick_type not in ("ver", "hor") + PHASES:
        raise ValueError(f"unknown stick type {stick_type!r}")
    win_w, win_h = n * k, n * l
    if win_w > config.width or win_h > config.height:
        raise WrapError(
            f"window {win_w}x{win_h} does not fit in {config.width}x{config.height}"
        )
    if sticks is None:
        sticks = extract_sticks(config)
    matching = [s for s in sticks if _type_matches(s, stick_type)]
    result: Set[Point] = set()
    for gx in range((config.width - win_w) // k + 1):
        for gy in range((config.height - win_h) // l + 1):
            rect = Rect((gx * k, gy * l), win_w, win_h)
            if any(properly_divides(s, rect, config, n) for s in matching):
                result.add((gx, gy))
    return result


# -- phase classification -----------------------------------------------------


def default_stick_threshold(lam: float, n: int = DEFAULT_N, c: float = 1.0) -> int:
    """Length scale b = 2 * floor(c * sqrt(lambda) / (2N)), at least 2.

    The paper's constant c is an existence constant; c = 1 here is a
    calibration choice and is flagged in reports.
    """
    return max(2, 2 * int(c * lam**0.5 / (2 * n)))


def classify_phase(
    config: Configuration,
    a: Optional[int] = None,
    b: Optional[int] = None,
    *,
    lam: Optional[float] = None,
    n: int = DEFAULT_N,
) -> str:
    """Majority stick type among sticks of length >= b.

    Returns one of "ver0", "ver1", "hor0", "hor1" when one type holds a
    strict majority of the qualifying sticks, else "undetermined". The
    threshold b defaults from lam when given, else to a quarter of the
    smaller dimension.
    """
    if b is None:
        if lam is not None:
            b = default_stick_threshold(lam, n)
        else:
            b = max(2, min(config.width, config.height) // 4)
    if b <= 0 or (a is not None and a <= 0):
        raise ValueError("thresholds must be positive")
    counts = {p: 0 for p in PHASES}
    total = 0
    for stick in extract_sticks(config):
        if stick.length >= b:
            counts[stick.type] += 1
            total += 1
    if total == 0:
        return "undetermined"
    best = max(PHASES, key=lambda p: counts[p])
    if 2 * counts[best] > total:
        return best
    return "undetermined"


def stick_census(config: Configuration, sticks: Optional[Sequence[Stick]] = None) -> dict:
    """Per-type counts and length histograms, JSON-friendly."""
    if sticks is None:
        sticks = extract_sticks(config)
    census = {p: {"count": 0, "lengths": defaultdict(int)} for p in PHASES}
    for s in sticks:
        census[s.type]["count"] += 1
        census[s.type]["lengths"][s.length] += 1
    return {
        p: {"count": c["count"], "lengths": dict(sorted(c["lengths"].items()))}
        for p, c in census.items()
    }
