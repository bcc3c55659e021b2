"""Grand-canonical Markov chain Monte Carlo for the hard-square model.

The target measure weights a configuration by lambda^(number of tiles)
under the chosen boundary mode (equivalently the vacancy convention up
to a constant on tori). One sweep is

  1. a heat-bath pass over the four parity sublattices in fixed order:
     every site of a sublattice resamples its occupancy from the
     conditional law, occupied with probability lambda / (1 + lambda)
     when no other tile blocks it, forced vacant otherwise. Sites of one
     sublattice are at pairwise distance >= 2, so the simultaneous
     update equals the sequential one and the pass is a composition of
     exact heat-bath kernels;
  2. a run of single-tile translation proposals: a uniformly random site
     and direction, moved when the tile exists and the target
     neighborhood is free (weight-neutral, accepted with probability 1).

Both move families leave the target measure invariant; every
intermediate configuration is valid. Chains are deterministic functions
of their parameters: the RNG draw schedule is fixed per sweep, and the
two engines (bit-packed scalar for small grids, vectorized numpy for
large ones) consume identical streams and produce identical chains.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionError
from .lattice import Configuration, _unchecked, create_configuration
from .observables import ObservableReport, summarize_series
from .sticks import classify_phase, stick_census

SCALAR_ENGINE_MAX_SITES = 256
PHASE_SEEDS = ("ver0", "ver1", "hor0", "hor1")


def seed_phase_configuration(
    width: int,
    height: int,
    phase: str,
    offsets: Optional[Sequence[int]] = None,
    boundary: str = "periodic",
) -> Configuration:
    """Fully packed configuration of one column or row family.

    ver0 fills columns at odd x, column i shifted vertically by
    offsets[i] (alternating 0, 1 by default); ver1 is its translate by
    (1, 0); the hor phases exchange the axes.
    """
    if phase not in PHASE_SEEDS:
        raise ValueError(f"unknown phase {phase!r}")
    if width % 2 or height % 2:
        raise DimensionError("phase seeds need even dimensions")
    transpose = phase.startswith("hor")
    w, h = (height, width) if transpose else (width, height)
    ncols = w // 2
    if offsets is None:
        offsets = [i % 2 for i in range(ncols)]
    if len(offsets) != ncols:
        raise DimensionError(f"need {ncols} column offsets, got {len(offsets)}")
    occ = []
    for i, x in enumerate(range(1, w, 2)):
        t = offsets[i] % 2
        occ.extend((x, (1 + t + 2 * k) % h) for k in range(h // 2))
    cfg = create_configuration(w, h, boundary, occ)
    if transpose:
        cfg = cfg.transpose()
    if phase in ("ver1", "hor1"):
        cfg = cfg.translate(1, 0) if phase == "ver1" else cfg.translate(0, 1)
    return cfg


@dataclass(frozen=True)
class ChainParams:
    """Parameters of one Monte Carlo chain."""

    width: int
    height: int
    lam: float
    seed: int
    sweeps: int
    boundary: str = "periodic"
    burn_in: int = 0
    translation_move_fraction: float = 0.25
    thinning: int = 1
    initial: Union[str, Configuration, None] = None  # "empty", a phase seed, or explicit

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"fugacity must be positive, got {self.lam}")
        if self.sweeps < 0 or self.burn_in < 0:
            raise ValueError("sweeps and burn_in must be nonnegative")
        if not 0 <= self.translation_move_fraction <= 1:
            raise ValueError("translation_move_fraction must be in [0, 1]")
        if self.thinning < 1:
            raise ValueError("thinning must be at least 1")

    def initial_configuration(self) -> Configuration:
        if isinstance(self.initial, Configuration):
            return self.initial
        if self.initial in (None, "empty"):
            return create_configuration(self.width, self.height, self.boundary, [])
        return seed_phase_configuration(
            self.width, self.height, self.initial, boundary=self.boundary
        )

    def describe(self) -> dict:
        init = self.initial
        if isinstance(init, Configuration):
            init = "explicit"
        return {
            "width": self.width,
            "height": self.height,
            "boundary": self.boundary,
            "lambda": self.lam,
            "seed": self.seed,
            "sweeps": self.sweeps,
            "burn_in": self.burn_in,
            "translation_move_fraction": self.translation_move_fraction,
            "thinning": self.thinning,
            "initial": init or "empty",
        }


class _Geometry:
    """Site grid of the sampled model and precomputed move tables.

    Periodic mode samples all torus residues; the rectangle modes sample
    the interior lattice points, matching the enumeration paths.
    """

    def __init__(self, width: int, height: int, boundary: str):
        self.boundary = boundary
        self.periodic = boundary == "periodic"
        if self.periodic:
            self.nx, self.ny = width, height
            self.origin = (0, 0)
        else:
            self.nx, self.ny = width - 1, height - 1
            self.origin = (1, 1)
        self.n_sites = self.nx * self.ny
        nx, ny = self.nx, self.ny

        def flat(x, y):
            return y * nx + x

        self.class_indices: List[np.ndarray] = []
        for cy in (0, 1):
            for cx in (0, 1):
                idx = [
                    flat(x, y)
                    for y in range(cy, ny, 2)
                    for x in range(cx, nx, 2)
                ]
                self.class_indices.append(np.array(idx, dtype=np.int64))

        # 8-neighborhood of each site (for heat-bath feasibility)
        self.nbr: List[List[int]] = []
        for y in range(ny):
            for x in range(nx):
                cells = []
                for dx in (-1, 0, 1):
                    for dy in (-1, 0, 1):
                        if (dx, dy) == (0, 0):
                            continue
                        qx, qy = x + dx, y + dy
                        if self.periodic:
                            cells.append(flat(qx % nx, qy % ny))
                        elif 0 <= qx < nx and 0 <= qy < ny:
                            cells.append(flat(qx, qy))
                self.nbr.append(cells)

        # translation tables: for (site, direction), the target site and
        # the cells that must be empty (3x3 around the target minus the
        # source); None when the move leaves the grid
        dirs = ((1, 0), (-1, 0), (0, 1), (0, -1))
        self.move_target: List[List[Optional[int]]] = []
        self.move_blockers: List[List[Optional[List[int]]]] = []
        for y in range(ny):
            for x in range(nx):
                targets, blockers = [], []
                src = flat(x, y)
                for dx, dy in dirs:
                    tx, ty = x + dx, y + dy
                    if self.periodic:
                        tx, ty = tx % nx, ty % ny
                    elif not (0 <= tx < nx and 0 <= ty < ny):
                        targets.append(None)
                        blockers.append(None)
                        continue
                    cells = []
                    for bx in (-1, 0, 1):
                        for by in (-1, 0, 1):
                            qx, qy = tx + bx, ty + by
                            if self.periodic:
                                q = flat(qx % nx, qy % ny)
                            elif 0 <= qx < nx and 0 <= qy < ny:
                                q = flat(qx, qy)
                            else:
                                continue
                            if q != src:
                                cells.append(q)
                    targets.append(flat(tx, ty))
                    blockers.append(cells)
                self.move_target.append(targets)
                self.move_blockers.append(blockers)

    def to_centers(self, flat_indices: Iterable[int]) -> frozenset:
        ox, oy = self.origin
        return frozenset(
            (i % self.nx + ox, i // self.nx + oy) for i in flat_indices
        )

    def from_configuration(self, cfg: Configuration) -> List[int]:
        ox, oy = self.origin
        out = []
        for x, y in cfg.occupied:
            gx, gy = x - ox, y - oy
            if not (0 <= gx < self.nx and 0 <= gy < self.ny):
                raise DimensionError(
                    f"initial tile at {(x, y)} outside the sampled site grid"
                )
            out.append(gy * self.nx + gx)
        return out


class _ScalarEngine:
    """Bit-packed occupancy for small grids."""

    def __init__(self, geom: _Geometry, initial: List[int]):
        self.geom = geom
        self.nbr_masks = [sum(1 << q for q in cells) for cells in geom.nbr]
        self.block_masks = [
            [None if cells is None else sum(1 << q for q in cells) for cells in row]
            for row in geom.move_blockers
        ]
        self.occ = 0
        for i in initial:
            self.occ |= 1 << i

    def heat_bath(self, uniforms: np.ndarray, p_occ: float) -> None:
        occ = self.occ
        u = uniforms.tolist()
        for idx_arr in self.geom.class_indices:
            masks = self.nbr_masks
            for i in idx_arr.tolist():
                bit = 1 << i
                if occ & masks[i]:
                    occ &= ~bit
                elif u[i] < p_occ:
                    occ |= bit
                else:
                    occ &= ~bit
        self.occ = occ

    def translations(self, proposals: np.ndarray) -> None:
        occ = self.occ
        targets = self.geom.move_target
        blocks = self.block_masks
        for q in proposals.tolist():
            i, d = divmod(q, 4)
            bit = 1 << i
            if not occ & bit:
                continue
            t = targets[i][d]
            if t is None:
                continue
            if occ & blocks[i][d]:
                continue
            occ = (occ & ~bit) | (1 << t)
        self.occ = occ

    def occupied_indices(self) -> List[int]:
        occ, out, i = self.occ, [], 0
        while occ:
            if occ & 1:
                out.append(i)
            occ >>= 1
            i += 1
        return out


class _NumpyEngine:
    """Vectorized occupancy grid for large lattices."""

    def __init__(self, geom: _Geometry, initial: List[int]):
        self.geom = geom
        self.grid = np.zeros((geom.ny, geom.nx), dtype=np.int16)
        flat = self.grid.reshape(-1)
        for i in initial:
            flat[i] = 1
        # blocker index tables for scalar translation proposals
        self._move_target = geom.move_target
        self._move_blockers = [
            [None if c is None else np.array(c, dtype=np.int64) for c in row]
            for row in geom.move_blockers
        ]

    def _neighbor_counts(self) -> np.ndarray:
        g = self.grid
        if self.geom.periodic:
            total = np.zeros_like(g)
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    total += np.roll(np.roll(g, dy, axis=0), dx, axis=1)
            return total - g
        padded = np.zeros((g.shape[0] + 2, g.shape[1] + 2), dtype=g.dtype)
        padded[1:-1, 1:-1] = g
        total = np.zeros_like(g)
        for dx in (0, 1, 2):
            for dy in (0, 1, 2):
                total += padded[dy : dy + g.shape[0], dx : dx + g.shape[1]]
        return total - g

    def heat_bath(self, uniforms: np.ndarray, p_occ: float) -> None:
        flat = self.grid.reshape(-1)
        for idx in self.geom.class_indices:
            counts = self._neighbor_counts().reshape(-1)
            feasible = counts[idx] == 0
            flat[idx] = (feasible & (uniforms[idx] < p_occ)).astype(np.int16)

    def translations(self, proposals: np.ndarray) -> None:
        flat = self.grid.reshape(-1)
        for q in proposals.tolist():
            i, d = divmod(q, 4)
            if not flat[i]:
                continue
            t = self._move_target[i][d]
            if t is None:
                continue
            blockers = self._move_blockers[i][d]
            if flat[blockers].any():
                continue
            flat[i] = 0
            flat[t] = 1

    def occupied_indices(self) -> List[int]:
        return np.flatnonzero(self.grid.reshape(-1)).tolist()


class Chain:
    """Mutable chain state: current configuration, step counter, RNG."""

    def __init__(self, params: ChainParams, engine: Optional[str] = None):
        self.params = params
        self.geom = _Geometry(params.width, params.height, params.boundary)
        initial = self.geom.from_configuration(params.initial_configuration())
        if engine is None:
            engine = "scalar" if self.geom.n_sites <= SCALAR_ENGINE_MAX_SITES else "numpy"
        self.engine_name = engine
        cls = _ScalarEngine if engine == "scalar" else _NumpyEngine
        self.engine = cls(self.geom, initial)
        self.rng = np.random.default_rng(np.random.PCG64(params.seed))
        self.step = 0
        self.p_occ = params.lam / (1.0 + params.lam)
        self.n_trans = int(round(params.translation_move_fraction * self.geom.n_sites))

    def sweep(self, count: int = 1) -> "Chain":
        for _ in range(count):
            uniforms = self.rng.random(self.geom.n_sites)
            self.engine.heat_bath(uniforms, self.p_occ)
            if self.n_trans:
                proposals = self.rng.integers(
                    0, self.geom.n_sites * 4, size=self.n_trans
                )
                self.engine.translations(proposals)
            self.step += 1
        return self

    def configuration(self) -> Configuration:
        return _unchecked(
            self.params.width,
            self.params.height,
            self.params.boundary,
            self.geom.to_centers(self.engine.occupied_indices()),
        )

    def state_key(self) -> int:
        """Occupancy bitmask; cheap identity of the current state."""
        if isinstance(self.engine, _ScalarEngine):
            return self.engine.occ
        key = 0
        for i in self.engine.occupied_indices():
            key |= 1 << i
        return key


def mcmc_sweep(state: Chain, count: int = 1) -> Chain:
    """Advance the chain by full sweeps; returns the same (mutated) state."""
    return state.sweep(count)


# -- observable registry -------------------------------------------------------


def _tile_density(cfg: Configuration, params: ChainParams) -> float:
    geom_sites = (
        cfg.width * cfg.height
        if cfg.boundary == "periodic"
        else (cfg.width - 1) * (cfg.height - 1)
    )
    return cfg.tile_count / geom_sites


def _vacancy_density(cfg: Configuration, params: ChainParams) -> float:
    return 1.0 - 4.0 * cfg.tile_count / cfg.area


def _parity_density(cfg: Configuration, params: ChainParams) -> dict:
    from .observables import parity_density

    return parity_density([cfg])


def _tile_count(cfg: Configuration, params: ChainParams) -> float:
    return float(cfg.tile_count)


def _phase(cfg: Configuration, params: ChainParams) -> str:
    return classify_phase(cfg, lam=params.lam)


def _stick_counts(cfg: Configuration, params: ChainParams) -> dict:
    census = stick_census(cfg)
    return {t: float(c["count"]) for t, c in census.items()}


OBSERVABLES: Dict[str, Callable] = {
    "tile_count": _tile_count,
    "tile_density": _tile_density,
    "vacancy_density": _vacancy_density,
    "parity_density": _parity_density,
    "phase": _phase,
    "stick_counts": _stick_counts,
}


def run_chain(
    params: ChainParams,
    observables: Union[Sequence[str], Dict[str, Callable]] = ("tile_density",),
    *,
    keep_samples: bool = False,
    engine: Optional[str] = None,
) -> ObservableReport:
    """Run a chain and aggregate the requested observables.

    Measurements are taken every ``thinning`` sweeps after burn-in; with
    zero sweeps the initial configuration is measured once. Reports are
    deterministic functions of the parameters.
    """
    if isinstance(observables, dict):
        funcs = dict(observables)
    else:
        funcs = {name: OBSERVABLES[name] for name in observables}
    chain = Chain(params, engine=engine)
    chain.sweep(params.burn_in)
    series: Dict[str, List[float]] = {}
    labels: Dict[str, int] = {}
    samples: List[dict] = []
    measured = 0

    def measure():
        nonlocal measured
        cfg = chain.configuration()
        measured += 1
        for name, fn in funcs.items():
            value = fn(cfg, params)
            if isinstance(value, str):
                labels[value] = labels.get(value, 0) + 1
            elif isinstance(value, dict):
                for k, v in value.items():
                    series.setdefault(f"{name}.{k}", []).append(float(v))
            else:
                series.setdefault(name, []).append(float(value))
        if keep_samples:
            samples.append({"step": chain.step, "occupied": sorted(cfg.occupied)})

    if params.sweeps == 0:
        measure()
    else:
        remaining = params.sweeps
        while remaining > 0:
            block = min(params.thinning, remaining)
            chain.sweep(block)
            remaining -= block
            if block == params.thinning:
                measure()
        if measured == 0:
            measure()

    report = ObservableReport(
        params={**params.describe(), "engine": chain.engine_name},
        estimators=summarize_series(series) if series else {},
        phase_fractions={k: v / measured for k, v in labels.items()},
        weight_convention={
            "sampler": "tile count, weight lambda^n",
            "vacancy_offset": "on tori the vacancy convention differs by "
            "the constant lambda^(-Area/4)",
        },
        samples=samples if keep_samples else None,
        measurements=measured,
    )
    return report


def collect_samples(
    params: ChainParams, engine: Optional[str] = None
) -> List[Configuration]:
    """Thinned post-burn-in configurations of one chain."""
    chain = Chain(params, engine=engine)
    chain.sweep(params.burn_in)
    out = []
    remaining = params.sweeps
    while remaining > 0:
        block = min(params.thinning, remaining)
        chain.sweep(block)
        remaining -= block
        if block == params.thinning:
            out.append(chain.configuration())
    if not out:
        out.append(chain.configuration())
    return out
