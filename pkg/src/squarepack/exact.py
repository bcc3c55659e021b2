"""Exact partition functions, event weights and chessboard seminorms.

Partition functions are stored as exact integer coefficient vectors over
the tile count n; the vacancy-convention value differs from the
tile-convention value by the constant factor lambda^(-Area/4), since a
tile of the finite-volume model always covers four region faces.

Two independent enumeration paths are provided: depth-first brute force
over occupancy masks, and a row-transfer recursion whose state is one
row's occupancy pattern. They must agree coefficient-wise.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BlockConditionViolated,
    GeometryMismatch,
    NonpositiveFugacity,
    OddLength,
    TooLarge,
)
from .lattice import Point, iter_valid_masks, model_sites

DEFAULT_AREA_CAP = 36
TRANSFER_WIDTH_CAP = 14
TRANSFER_AREA_CAP = 4096


# -- one-dimensional systems ------------------------------------------------


def one_dim_transfer(lam: float) -> Tuple[float, float]:
    """Eigenvalues (gamma_plus, gamma_minus) of [[lam^-1/2, 1], [1, 0]]."""
    if lam <= 0:
        raise NonpositiveFugacity(f"fugacity must be positive, got {lam}")
    t = lam ** -0.5
    root = math.sqrt(1.0 / lam + 4.0)
    return (t + root) / 2.0, (t - root) / 2.0


def z1d_periodic(length: int, lam: float) -> float:
    """Partition value gamma_plus^L + gamma_minus^L of the periodic 1D system.

    Equals the sum over cyclic sequences r_0..r_L (r_0 = r_L, no two
    consecutive ones) of lam^(-1/2 * sum (1-r_i)(1-r_{i+1})).
    """
    if length % 2 or length < 0:
        raise OddLength(f"periodic 1D length must be even and >= 0, got {length}")
    gp, gm = one_dim_transfer(lam)
    return gp**length + gm**length


def z1d_free(length: int, lam: float) -> float:
    """Free-boundary 1D partition value, vacancy weight convention.

    Sum over n of C(L - n, n) * lam^(n - L/2); n tiles stack in a
    2 x L strip with at least one skip between consecutive tiles.
    """
    if length % 2 or length < 0:
        raise OddLength(f"free 1D length must be even and >= 0, got {length}")
    if lam <= 0:
        raise NonpositiveFugacity(f"fugacity must be positive, got {lam}")
    return sum(
        math.comb(length - n, n) * lam ** (n - length / 2.0)
        for n in range(length // 2 + 1)
    )


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return out


def _poly_add(a: Sequence[int], b: Sequence[int]) -> List[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i, v in enumerate(a):
        out[i] += v
    for i, v in enumerate(b):
        out[i] += v
    return out


def z1d_periodic_coeffs(length: int) -> List[int]:
    """Integer coefficients of trace([[t, 1], [1, 0]]^L) in t = lam^(-1/2)."""
    if length % 2 or length < 0:
        raise OddLength(f"periodic 1D length must be even and >= 0, got {length}")
    # 2x2 matrix with polynomial entries, starting from the identity
    one, zero, t = [1], [0], [0, 1]
    m = [[one, zero], [zero, one]]
    base = [[t, one], [one, zero]]
    for _ in range(length):
        m = [
            [
                _poly_add(_poly_mul(m[r][0], base[0][c]), _poly_mul(m[r][1], base[1][c]))
                for c in range(2)
            ]
            for r in range(2)
        ]
    return _poly_add(m[0][0], m[1][1])


# -- partition polynomials ---------------------------------------------------


@dataclass(frozen=True)
class PartitionPolynomial:
    """Exact coefficients a_n = number of valid configurations with n tiles."""

    width: int
    height: int
    boundary: str
    coefficients: Tuple[int, ...]

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def n_max(self) -> int:
        return len(self.coefficients) - 1

    def evaluate_tile(self, lam: float) -> float:
        """Sum a_n lam^n (tile-count weight convention)."""
        return float(sum(a * lam**n for n, a in enumerate(self.coefficients)))

    def evaluate_vacancy(self, lam: float) -> float:
        """Sum a_n lam^(n - Area/4) (vacancy weight convention)."""
        if lam <= 0:
            raise NonpositiveFugacity(f"fugacity must be positive, got {lam}")
        return float(
            sum(a * lam ** (n - self.area / 4.0) for n, a in enumerate(self.coefficients))
        )

    def report(self, lambdas: Iterable[float] = ()) -> dict:
        return {
            "dims": [self.width, self.height],
            "boundary": self.boundary,
            "coefficients": list(self.coefficients),
            "weight_conventions": {
                "tile": "sum a_n lambda^n",
                "vacancy": "tile value times lambda^(-Area/4)",
            },
            "evaluations": [
                {
                    "lambda": lam,
                    "value_tile_convention": self.evaluate_tile(lam),
                    "value_vacancy_convention": self.evaluate_vacancy(lam),
                }
                for lam in lambdas
            ],
        }


def _trim(coeffs: List[int]) -> Tuple[int, ...]:
    last = max((i for i, c in enumerate(coeffs) if c), default=0)
    return tuple(coeffs[: last + 1])


def _brute_coefficients(width: int, height: int, boundary: str) -> List[int]:
    n_max = width * height // 4
    coeffs = [0] * (n_max + 1)
    for _, cnt in iter_valid_masks(width, height, boundary):
        coeffs[cnt] += 1
    return coeffs


def _brute_worker(args) -> List[int]:
    """Count configurations whose first decided sites match a fixed prefix."""
    width, height, boundary, prefix_len, prefix_mask = args
    from .lattice import _site_index

    sites, _, nbr = _site_index(width, height, boundary)
    n = len(sites)
    n_max = width * height // 4
    coeffs = [0] * (n_max + 1)
    blocked = 0
    cnt = 0
    for i in range(prefix_len):
        if prefix_mask >> i & 1:
            if blocked >> i & 1:
                return coeffs  # infeasible prefix
            blocked |= nbr[i]
            cnt += 1
    stack = [(prefix_len, blocked, cnt)]
    while stack:
        i, blocked, cnt = stack.pop()
        if i == n:
            coeffs[cnt] += 1
            continue
        if not blocked >> i & 1:
            stack.append((i + 1, blocked | nbr[i], cnt + 1))
        stack.append((i + 1, blocked, cnt))
    return coeffs


def _brute_coefficients_parallel(width, height, boundary, threads) -> List[int]:
    prefix_len = min(8, width)
    jobs = [
        (width, height, boundary, prefix_len, mask) for mask in range(1 << prefix_len)
    ]
    coeffs = [0] * (width * height // 4 + 1)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(_brute_worker, jobs, chunksize=16):
            coeffs = [a + b for a, b in zip(coeffs, part)]
    return coeffs


@lru_cache(maxsize=64)
def _row_states(positions: int, cyclic: bool) -> Tuple[int, ...]:
    """Occupancy patterns of one row: no two tiles within distance 1."""
    states = []
    for s in range(1 << positions):
        if s & (s << 1):
            continue
        if cyclic and positions > 1 and (s & 1) and (s >> (positions - 1) & 1):
            continue
        states.append(s)
    return tuple(states)


def _rows_compatible(s: int, t: int, positions: int, cyclic: bool) -> bool:
    spread = t | (t << 1) | (t >> 1)
    if cyclic:
        if t & 1:
            spread |= 1 << (positions - 1)
        if t >> (positions - 1) & 1:
            spread |= 1
    return not (s & spread & ((1 << positions) - 1) or s & t)


def _transfer_coefficients(width: int, height: int, boundary: str) -> List[int]:
    periodic = boundary == "periodic"
    positions = width if periodic else width - 1
    nrows = height if periodic else height - 1
    states = _row_states(positions, periodic)
    compat = {
        s: [t for t in states if _rows_compatible(s, t, positions, periodic)]
        for s in states
    }
    bits = {s: bin(s).count("1") for s in states}
    n_max = width * height // 4

    def empty_vec():
        return {s: None for s in states}

    if periodic:
        coeffs = [0] * (n_max + 1)
        for start in states:
            # distribution over (current state, tiles) after k row steps
            vec: Dict[int, Optional[List[int]]] = {s: None for s in states}
            v0 = [0] * (n_max + 1)
            v0[bits[start]] = 1
            vec[start] = v0
            for _ in range(nrows - 1):
                new: Dict[int, Optional[List[int]]] = {s: None for s in states}
                for s, poly in vec.items():
                    if poly is None:
                        continue
                    for t in compat[s]:
                        shift = bits[t]
                        tgt = new[t]
                        if tgt is None:
                            tgt = [0] * (n_max + 1)
                            new[t] = tgt
                        for n, c in enumerate(poly):
                            if c and n + shift <= n_max:
                                tgt[n + shift] += c
                vec = new
            # close the cycle: last row must be compatible with the start row
            for s, poly in vec.items():
                if poly is None or start not in compat[s]:
                    continue
                for n, c in enumerate(poly):
                    coeffs[n] += c
        return coeffs

    # open chain over the interior rows
    vec = {s: None for s in states}
    for s in states:
        v0 = [0] * (n_max + 1)
        v0[bits[s]] = 1
        vec[s] = v0
    for _ in range(nrows - 1):
        new = {s: None for s in states}
        for s, poly in vec.items():
            if poly is None:
                continue
            for t in compat[s]:
                shift = bits[t]
                tgt = new[t]
                if tgt is None:
                    tgt = [0] * (n_max + 1)
                    new[t] = tgt
                for n, c in enumerate(poly):
                    if c and n + shift <= n_max:
                        tgt[n + shift] += c
        vec = new
    coeffs = [0] * (n_max + 1)
    for poly in vec.values():
        if poly is None:
            continue
        for n, c in enumerate(poly):
            coeffs[n] += c
    return coeffs


def partition_polynomial(
    width: int,
    height: int,
    boundary: str = "periodic",
    *,
    method: str = "auto",
    area_cap: int = DEFAULT_AREA_CAP,
    threads: int = 1,
) -> PartitionPolynomial:
    """Exact partition polynomial by brute force or row transfer.

    method: 'auto' (brute force within the area cap, else row transfer),
    'brute', or 'transfer'.
    """
    model_sites(width, height, boundary)  # validates dims
    area = width * height
    if method == "auto":
        method = "brute" if area <= area_cap else "transfer"
    if method == "brute":
        if area > area_cap:
            raise TooLarge(f"area {area} exceeds brute-force cap {area_cap}")
        if threads > 1:
            coeffs = _brute_coefficients_parallel(width, height, boundary, threads)
        else:
            coeffs = _brute_coefficients(width, height, boundary)
    elif method == "transfer":
        if width > TRANSFER_WIDTH_CAP:
            raise TooLarge(
                f"row-transfer path requires width <= {TRANSFER_WIDTH_CAP}, got {width}"
            )
        if area > TRANSFER_AREA_CAP:
            raise TooLarge(f"area {area} exceeds transfer cap {TRANSFER_AREA_CAP}")
        coeffs = _transfer_coefficients(width, height, boundary)
    else:
        raise ValueError(f"unknown method {method!r}")
    return PartitionPolynomial(width, height, boundary, _trim(coeffs))


# -- event weights -----------------------------------------------------------


@lru_cache(maxsize=16)
def _ensemble(width: int, height: int, boundary: str):
    """All valid configurations as (masks uint64, tile counts int16)."""
    masks, tiles = [], []
    for mask, cnt in iter_valid_masks(width, height, boundary):
        masks.append(mask)
        tiles.append(cnt)
    return np.array(masks, dtype=np.uint64), np.array(tiles, dtype=np.int16)


def _check_enumerable(width, height, area_cap):
    if width * height > area_cap:
        raise TooLarge(
            f"area {width * height} exceeds enumeration cap {area_cap}"
        )


def event_weight(
    width: int,
    height: int,
    boundary: str,
    lam: float,
    predicate: Callable,
    *,
    area_cap: int = DEFAULT_AREA_CAP,
) -> float:
    """Total weight sum_{sigma in E} lam^(-vacancies/4) over the region.

    ``predicate`` receives each valid Configuration and returns a truth
    value selecting the event E.
    """
    from .lattice import mask_to_configuration

    if lam <= 0:
        raise NonpositiveFugacity(f"fugacity must be positive, got {lam}")
    _check_enumerable(width, height, area_cap)
    area = width * height
    total = 0.0
    for mask, cnt in iter_valid_masks(width, height, boundary):
        if predicate(mask_to_configuration(width, height, boundary, int(mask))):
            total += lam ** (cnt - area / 4.0)
    return total


# -- chessboard seminorm and reflection positivity ---------------------------

Event = Callable[[Mapping[Point, int]], bool]
LocalFunction = Callable[[Mapping[Point, int]], float]


@dataclass(frozen=True)
class SeminormQuery:
    """A block rectangle on a torus together with a block-local function.

    The block R has corner (x0, y0) and dimensions k x l; the torus
    dimensions must be even multiples of the block dimensions. The event
    (more generally, any real-valued local function) receives a mapping
    from the (k+1)(l+1) lattice points of the closed block to occupancies.
    """

    width: int
    height: int
    corner: Point
    block_width: int
    block_height: int
    event: LocalFunction

    def __post_init__(self):
        if self.width % (2 * self.block_width) or self.height % (2 * self.block_height):
            raise BlockConditionViolated(
                f"{self.block_width}x{self.block_height} block does not tile the "
                f"{self.width}x{self.height} torus with even multiplicity"
            )


def _block_points(corner: Point, k: int, l: int) -> List[Point]:
    x0, y0 = corner
    return [(x0 + dx, y0 + dy) for dy in range(l + 1) for dx in range(k + 1)]


def _reflected_point(q: Point, i: int, j: int, corner: Point, k: int, l: int) -> Point:
    x, y = q
    x0, y0 = corner
    rx = x + i * k if i % 2 == 0 else 2 * x0 + (i + 1) * k - x
    ry = y + j * l if j % 2 == 0 else 2 * y0 + (j + 1) * l - y
    return rx, ry


def _pattern_table(width, height, corner, k, l) -> np.ndarray:
    """Site indices of each block point under every reflection (i, j).

    Returns an int array of shape (nx, ny, npoints) with flat torus site
    indices; nx = width // k, ny = height // l.
    """
    points = _block_points(corner, k, l)
    nx, ny = width // k, height // l
    table = np.empty((nx, ny, len(points)), dtype=np.int64)
    for i in range(nx):
        for j in range(ny):
            for p, q in enumerate(points):
                rx, ry = _reflected_point(q, i, j, corner, k, l)
                table[i, j, p] = (ry % height) * width + (rx % width)
    return table


def _patterns_for(masks: np.ndarray, site_idx: np.ndarray) -> np.ndarray:
    """Pattern ids of every configuration for one reflection."""
    out = np.zeros(len(masks), dtype=np.int64)
    for bit, s in enumerate(site_idx):
        out |= ((masks >> np.uint64(s)) & np.uint64(1)).astype(np.int64) << bit
    return out


def _eval_local(
    fn: LocalFunction, points: List[Point], pattern_ids: np.ndarray
) -> np.ndarray:
    """Evaluate a local function on every pattern id, memoizing patterns."""
    uniq, inverse = np.unique(pattern_ids, return_inverse=True)
    values = np.empty(len(uniq), dtype=np.float64)
    for idx, pid in enumerate(uniq):
        pat = {q: int(pid) >> b & 1 for b, q in enumerate(points)}
        values[idx] = float(fn(pat))
    return values[inverse]


def _torus_expectation(tiles: np.ndarray, values: np.ndarray, lam: float) -> float:
    """mu^per of a per-configuration value array."""
    weights = np.power(float(lam), tiles.astype(np.float64))
    return float((weights * values).sum() / weights.sum())


def chessboard_seminorm(
    query: SeminormQuery, lam: float, *, area_cap: int = DEFAULT_AREA_CAP
) -> float:
    """Chessboard seminorm: mu^per(prod over all reflections)^(1/#reflections).

    The expectation of the disseminated product is nonnegative by
    reflection positivity; tiny negative float residue is clamped to 0.
    """
    if lam <= 0:
        raise NonpositiveFugacity(f"fugacity must be positive, got {lam}")
    _check_enumerable(query.width, query.height, area_cap)
    masks, tiles = _ensemble(query.width, query.height, "periodic")
    table = _pattern_table(
        query.width, query.height, query.corner, query.block_width, query.block_height
    )
    points = _block_points(query.corner, query.block_width, query.block_height)
    nx, ny = table.shape[:2]
    values = np.ones(len(masks), dtype=np.float64)
    for i in range(nx):
        for j in range(ny):
            pats = _patterns_for(masks, table[i, j])
            values *= _eval_local(query.event, points, pats)
    value = max(_torus_expectation(tiles, values, lam), 0.0)
    return value ** (1.0 / (nx * ny))


def disseminated_expectation(
    width: int,
    height: int,
    lam: float,
    corner: Point,
    block_width: int,
    block_height: int,
    events: Mapping[Tuple[int, int], Event],
    *,
    area_cap: int = DEFAULT_AREA_CAP,
) -> float:
    """mu^per of a product of reflected block events, one per grid cell.

    ``events`` maps reflection indices (i, j), with 0 <= i < W/k and
    0 <= j < H/l, to block-local events; missing cells contribute no
    constraint. This is the left-hand side of the chessboard estimate.
    """
    if lam <= 0:
        raise NonpositiveFugacity(f"fugacity must be positive, got {lam}")
    _check_enumerable(width, height, area_cap)
    SeminormQuery(width, height, corner, block_width, block_height, lambda _: True)
    masks, tiles = _ensemble(width, height, "periodic")
    table = _pattern_table(width, height, corner, block_width, block_height)
    points = _block_points(corner, block_width, block_height)
    nx, ny = table.shape[:2]
    values = np.ones(len(masks), dtype=np.float64)
    for (i, j), event in events.items():
        if not (0 <= i < nx and 0 <= j < ny):
            raise BlockConditionViolated(f"reflection index {(i, j)} out of range")
        pats = _patterns_for(masks, table[i, j])
        values *= _eval_local(event, points, pats)
    return _torus_expectation(tiles, values, lam)


def reflection_pair_patterns(
    width: int, height: int, corner: Point, block_width: int, block_height: int
):
    """Identity and mirror pattern ids per configuration, plus weights data.

    The torus must be the block doubled along exactly one axis. Returns
    (points, p0, p1, tiles) where p0/p1 are pattern-id arrays aligned with
    the cached ensemble and tiles are the configuration tile counts.
    """
    if width == 2 * block_width and height == block_height:
        refl = (1, 0)
    elif height == 2 * block_height and width == block_width:
        refl = (0, 1)
    else:
        raise GeometryMismatch(
            f"torus {width}x{height} is not the block {block_width}x{block_height} "
            "doubled along one axis"
        )
    masks, tiles = _ensemble(width, height, "periodic")
    points = _block_points(corner, block_width, block_height)
    table = _pattern_table(width, height, corner, block_width, block_height)
    p0 = _patterns_for(masks, table[0, 0])
    p1 = _patterns_for(masks, table[refl])
    return points, p0, p1, tiles


def reflection_positivity_value(
    width: int,
    height: int,
    lam: float,
    corner: Point,
    block_width: int,
    block_height: int,
    f: LocalFunction,
    *,
    area_cap: int = DEFAULT_AREA_CAP,
) -> float:
    """mu^per(f * (f o reflection)) for a block-local function f.

    The torus must be the block doubled along one axis, with the
    reflection through the shared block edge. Nonnegative up to float
    rounding for every local f.
    """
    if lam <= 0:
        raise NonpositiveFugacity(f"fugacity must be positive, got {lam}")
    _check_enumerable(width, height, area_cap)
    points, p0, p1, tiles = reflection_pair_patterns(
        width, height, corner, block_width, block_height
    )

    cache: Dict[int, float] = {}

    def fval(pid: int) -> float:
        v = cache.get(pid)
        if v is None:
            v = float(f({q: pid >> b & 1 for b, q in enumerate(points)}))
            cache[pid] = v
        return v

    weights = np.power(float(lam), tiles.astype(np.float64))
    vals = np.array([fval(int(a)) * fval(int(b)) for a, b in zip(p0, p1)])
    return float((weights * vals).sum() / weights.sum())


def face_vacant_event(corner: Point) -> Tuple[Point, int, int, Event]:
    """Block and event for 'the unit face at corner is vacant'."""
    x0, y0 = corner
    cells = [(x0, y0), (x0 + 1, y0), (x0, y0 + 1), (x0 + 1, y0 + 1)]

    def event(pattern: Mapping[Point, int]) -> bool:
        return not any(pattern[c] for c in cells)

    return corner, 1, 1, event
