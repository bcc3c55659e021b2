"""Configurations of 2x2 tiles on finite rectangles and tori.

A tile is a closed 2x2 axis-parallel square centered at a lattice point.
A configuration stores the set of occupied centers together with the
region dimensions and a boundary mode:

* ``periodic``      -- centers are residues on the width x height torus,
* ``free``          -- centers are lattice points of the closed rectangle
                       [0, width] x [0, height]; tiles may overhang,
* ``fully_packed``  -- like free, but the exterior is implicitly packed
                       with tiles at all (odd, odd) points outside the
                       open rectangle; interior tiles must not overlap
                       that exterior.

Validity means every two occupied centers are at ell-infinity distance
at least 2 (torus metric when periodic), equivalently the open tiles are
pairwise disjoint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, Iterator, Optional, Tuple

import numpy as np

from .errors import (
    BoundaryConflict,
    DimensionError,
    OverlapError,
    ParseError,
    RegionOutOfBounds,
)

Point = Tuple[int, int]

BOUNDARIES = ("periodic", "free", "fully_packed")

_NEIGHBOR_OFFSETS = tuple(
    (dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)
)


@dataclass(frozen=True)
class ParityClass:
    """Tile parity ((x-1) mod 2, (y-1) mod 2) of a center (x, y)."""

    hpar: int
    vpar: int

    def as_tuple(self) -> Tuple[int, int]:
        return (self.hpar, self.vpar)


def tile_parity_class(center: Point) -> ParityClass:
    x, y = center
    return ParityClass((x - 1) % 2, (y - 1) % 2)


def _check_dims(width: int, height: int, boundary: str) -> None:
    if boundary not in BOUNDARIES:
        raise DimensionError(f"unknown boundary mode {boundary!r}")
    if width < 4 or height < 4:
        raise DimensionError(f"dimensions must be at least 4, got {width}x{height}")
    if width % 2 or height % 2:
        raise DimensionError(
            f"dimensions must be even for boundary={boundary}, got {width}x{height}"
        )


def _exterior_conflict(center: Point, width: int, height: int) -> bool:
    """True if a tile at ``center`` overlaps the fully-packed exterior.

    Exterior tiles sit at every (odd, odd) point outside the open
    rectangle; overlap means ell-infinity distance <= 1.
    """
    x, y = center
    for ex in (x - 1, x, x + 1):
        if ex % 2 == 0:
            continue
        for ey in (y - 1, y, y + 1):
            if ey % 2 == 0:
                continue
            if not (1 <= ex <= width - 1 and 1 <= ey <= height - 1):
                return True
    return False


@dataclass(frozen=True)
class Configuration:
    """Immutable, validated hard-square configuration."""

    width: int
    height: int
    boundary: str
    occupied: FrozenSet[Point]

    # -- construction ---------------------------------------------------

    @staticmethod
    def _normalize(width, height, boundary, occupied) -> FrozenSet[Point]:
        if boundary == "periodic":
            return frozenset((x % width, y % height) for x, y in occupied)
        return frozenset((int(x), int(y)) for x, y in occupied)

    def __post_init__(self):
        _check_dims(self.width, self.height, self.boundary)
        object.__setattr__(
            self,
            "occupied",
            self._normalize(self.width, self.height, self.boundary, self.occupied),
        )
        self._validate()

    def _validate(self) -> None:
        w, h = self.width, self.height
        occ = self.occupied
        if self.boundary != "periodic":
            for x, y in occ:
                if not (0 <= x <= w and 0 <= y <= h):
                    raise DimensionError(
                        f"center {(x, y)} outside the closed {w}x{h} rectangle"
                    )
        if self.boundary == "fully_packed":
            for c in occ:
                if _exterior_conflict(c, w, h):
                    raise BoundaryConflict(
                        f"tile at {c} overlaps the fully-packed exterior"
                    )
        periodic = self.boundary == "periodic"
        for x, y in occ:
            for dx, dy in _NEIGHBOR_OFFSETS:
                nb = ((x + dx) % w, (y + dy) % h) if periodic else (x + dx, y + dy)
                if nb in occ:
                    raise OverlapError(f"tiles at {(x, y)} and {nb} overlap")

    # -- basic queries ---------------------------------------------------

    @property
    def area(self) -> int:
        """Number of unit faces in the region."""
        return self.width * self.height

    @property
    def tile_count(self) -> int:
        return len(self.occupied)

    def is_occupied(self, center: Point) -> bool:
        if self.boundary == "periodic":
            center = (center[0] % self.width, center[1] % self.height)
        return center in self.occupied

    def face_cover_center(self, corner: Point) -> Optional[Point]:
        """Center of the tile covering the face with lower-left ``corner``.

        Faces outside the region are resolved too: under fully_packed
        boundary they may be covered by the implicit exterior tiles.
        Returns None for a vacant face.
        """
        fx, fy = corner
        w, h = self.width, self.height
        for cx in (fx, fx + 1):
            for cy in (fy, fy + 1):
                if self.boundary == "periodic":
                    if (cx % w, cy % h) in self.occupied:
                        return (cx, cy)
                else:
                    if (cx, cy) in self.occupied:
                        return (cx, cy)
                    if self.boundary == "fully_packed":
                        if (
                            cx % 2 == 1
                            and cy % 2 == 1
                            and not (1 <= cx <= w - 1 and 1 <= cy <= h - 1)
                        ):
                            return (cx, cy)
        return None

    def is_face_vacant(self, corner: Point) -> bool:
        return self.face_cover_center(corner) is None

    def face_corners(self) -> Iterator[Point]:
        """Lower-left corners of all faces inside the region."""
        for y in range(self.height):
            for x in range(self.width):
                yield (x, y)

    def occupancy_grid(self) -> np.ndarray:
        """Boolean grid indexed [y, x] over the center lattice.

        Shape is (height, width) for periodic and
        (height + 1, width + 1) for the rectangle modes.
        """
        if self.boundary == "periodic":
            grid = np.zeros((self.height, self.width), dtype=bool)
        else:
            grid = np.zeros((self.height + 1, self.width + 1), dtype=bool)
        for x, y in self.occupied:
            grid[y, x] = True
        return grid

    def translate(self, dx: int, dy: int) -> "Configuration":
        """Translate all centers; periodic only (rectangles lose validity)."""
        if self.boundary != "periodic":
            raise DimensionError("translation is defined for periodic configurations")
        moved = frozenset(
            ((x + dx) % self.width, (y + dy) % self.height) for x, y in self.occupied
        )
        return Configuration(self.width, self.height, self.boundary, moved)

    def transpose(self) -> "Configuration":
        """Exchange the x and y axes."""
        return Configuration(
            self.height,
            self.width,
            self.boundary,
            frozenset((y, x) for x, y in self.occupied),
        )


def create_configuration(
    width: int, height: int, boundary: str, occupied: Iterable[Point]
) -> Configuration:
    """Validated constructor; see module docstring for the conventions."""
    return Configuration(width, height, boundary, frozenset(occupied))


def _unchecked(width: int, height: int, boundary: str, occupied) -> Configuration:
    """Internal fast path: build a Configuration without validation.

    Only for occupancy sets already known valid (enumeration, samplers).
    """
    cfg = object.__new__(Configuration)
    object.__setattr__(cfg, "width", width)
    object.__setattr__(cfg, "height", height)
    object.__setattr__(cfg, "boundary", boundary)
    object.__setattr__(cfg, "occupied", frozenset(occupied))
    return cfg


def count_vacancies(
    config: Configuration, region: Optional[Tuple[int, int, int, int]] = None
) -> int:
    """Number of vacant faces in ``region`` = (x0, y0, x1, y1), half open.

    Coordinates are face corners; the full region is the default.
    """
    if region is None:
        region = (0, 0, config.width, config.height)
    x0, y0, x1, y1 = region
    if not (0 <= x0 <= x1 <= config.width and 0 <= y0 <= y1 <= config.height):
        raise RegionOutOfBounds(f"face region {region} outside {config.width}x{config.height}")
    return sum(
        1
        for fy in range(y0, y1)
        for fx in range(x0, x1)
        if config.is_face_vacant((fx, fy))
    )


# -- ASCII codec ---------------------------------------------------------


def encode(config: Configuration) -> str:
    """Render as a header line plus one text row per center row, top first."""
    if config.boundary == "periodic":
        xs, ys = range(config.width), range(config.height)
    else:
        xs, ys = range(config.width + 1), range(config.height + 1)
    lines = [f"{config.width} {config.height} {config.boundary}"]
    for y in reversed(ys):
        lines.append("".join("o" if (x, y) in config.occupied else "." for x in xs))
    return "\n".join(lines) + "\n"


def decode(text: str) -> Configuration:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty input", line=1)
    header = lines[0].split()
    if len(header) != 3:
        raise ParseError("header must be 'W H BOUNDARY'", line=1)
    try:
        width, height = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError("non-integer dimensions in header", line=1)
    boundary = header[2]
    if boundary not in BOUNDARIES:
        raise ParseError(f"unknown boundary {boundary!r}", line=1)
    nrows = height if boundary == "periodic" else height + 1
    ncols = width if boundary == "periodic" else width + 1
    rows = lines[1 : 1 + nrows]
    if len(rows) < nrows:
        raise ParseError(f"expected {nrows} rows, got {len(rows)}", line=len(lines))
    occupied = set()
    for i, row in enumerate(rows):
        if len(row) != ncols:
            raise ParseError(
                f"row has {len(row)} columns, expected {ncols}", line=i + 2
            )
        y = (nrows - 1) - i
        for x, ch in enumerate(row):
            if ch == "o":
                occupied.add((x, y))
            elif ch != ".":
                raise ParseError(f"unexpected character {ch!r}", line=i + 2, column=x + 1)
    return create_configuration(width, height, boundary, occupied)


def to_json(config: Configuration) -> str:
    payload = {
        "width": config.width,
        "height": config.height,
        "boundary": config.boundary,
        "occupied": sorted(config.occupied),
    }
    return json.dumps(payload)


def from_json(text: str) -> Configuration:
    try:
        payload = json.loads(text)
        return create_configuration(
            payload["width"],
            payload["height"],
            payload["boundary"],
            [tuple(p) for p in payload["occupied"]],
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"bad JSON configuration: {exc}") from exc


# -- enumeration support ---------------------------------------------------


def model_sites(width: int, height: int, boundary: str) -> Tuple[Point, ...]:
    """Candidate centers of the finite-volume model, raster order.

    All residues for the torus; interior lattice points for the rectangle
    modes (free and fully-packed boundary conditions admit the same
    interior configurations when the dimensions are even).
    """
    _check_dims(width, height, boundary)
    if boundary == "periodic":
        return tuple((x, y) for y in range(height) for x in range(width))
    return tuple((x, y) for y in range(1, height) for x in range(1, width))


@lru_cache(maxsize=32)
def _site_index(width: int, height: int, boundary: str):
    sites = model_sites(width, height, boundary)
    index = {p: i for i, p in enumerate(sites)}
    periodic = boundary == "periodic"
    nbr_masks = []
    for x, y in sites:
        m = 0
        for dx, dy in _NEIGHBOR_OFFSETS:
            if periodic:
                q = ((x + dx) % width, (y + dy) % height)
            else:
                q = (x + dx, y + dy)
            j = index.get(q)
            if j is not None:
                m |= 1 << j
        nbr_masks.append(m)
    return sites, index, tuple(nbr_masks)


def iter_valid_masks(width: int, height: int, boundary: str) -> Iterator[Tuple[int, int]]:
    """Yield (bitmask, tile_count) for every valid configuration.

    Bit i of the mask corresponds to model_sites(...)[i]. Depth-first with
    hard-core pruning, so only valid configurations are visited.
    """
    sites, _, nbr = _site_index(width, height, boundary)
    n = len(sites)
    # stack entries: (next site index, occupied mask, blocked mask, count)
    stack = [(0, 0, 0, 0)]
    while stack:
        i, occ, blocked, cnt = stack.pop()
        if i == n:
            yield occ, cnt
            continue
        bit = 1 << i
        # branch: place a tile at site i when not blocked
        if not blocked & bit:
            stack.append((i + 1, occ | bit, blocked | nbr[i], cnt + 1))
        stack.append((i + 1, occ, blocked, cnt))


def mask_to_configuration(width, height, boundary, mask: int) -> Configuration:
    sites, _, _ = _site_index(width, height, boundary)
    occ = frozenset(sites[i] for i in range(len(sites)) if mask >> i & 1)
    return _unchecked(width, height, boundary, occ)
