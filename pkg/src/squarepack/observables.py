"""Estimators over configuration samples and the structured run report.

Standard errors use batch means with 32 batches, which is robust to the
autocorrelation of Markov chain output without spectral estimation.
Theta-style predictions are reported as fitted constants, never asserted
against unspecified universal constants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import InsufficientData
from .lattice import Configuration, model_sites

DEFAULT_BATCHES = 32


def batch_mean_stderr(values: Sequence[float], batches: int = DEFAULT_BATCHES):
    """(mean, stderr) by splitting the sequence into consecutive batches."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise InsufficientData("no measurements")
    mean = float(arr.mean())
    nb = min(batches, arr.size)
    if nb < 2:
        return mean, float("nan")
    usable = arr[: arr.size - arr.size % nb]
    means = usable.reshape(nb, -1).mean(axis=1)
    return mean, float(means.std(ddof=1) / math.sqrt(nb))


def parity_density(samples: Sequence[Configuration]) -> Dict[str, float]:
    """Occupation probability per residue class of (x mod 2, y mod 2).

    Averages over the model sites of each sample; classes are keyed
    "xy" by the two residues. Also reports the even/odd x marginals.
    """
    if not samples:
        raise InsufficientData("no samples")
    totals = {(i, j): 0.0 for i in (0, 1) for j in (0, 1)}
    sizes = {(i, j): 0 for i in (0, 1) for j in (0, 1)}
    for cfg in samples:
        sites = model_sites(cfg.width, cfg.height, cfg.boundary)
        counts = {(i, j): 0 for i in (0, 1) for j in (0, 1)}
        for x, y in cfg.occupied:
            counts[(x % 2, y % 2)] += 1
        for x, y in sites:
            sizes[(x % 2, y % 2)] += 1
        for key, c in counts.items():
            totals[key] += c
    out = {}
    for (i, j), c in totals.items():
        out[f"{i}{j}"] = c / sizes[(i, j)] if sizes[(i, j)] else 0.0
    even_sites = sizes[(0, 0)] + sizes[(0, 1)]
    odd_sites = sizes[(1, 0)] + sizes[(1, 1)]
    out["even_x"] = (totals[(0, 0)] + totals[(0, 1)]) / even_sites if even_sites else 0.0
    out["odd_x"] = (totals[(1, 0)] + totals[(1, 1)]) / odd_sites if odd_sites else 0.0
    return out


def two_point_covariance(
    samples: Sequence[Configuration], u, v
) -> Tuple[float, float]:
    """Empirical covariance of the occupancies at u and v, with stderr."""
    if not samples:
        raise InsufficientData("no samples")
    a = np.array([1.0 if c.is_occupied(u) else 0.0 for c in samples])
    b = np.array([1.0 if c.is_occupied(v) else 0.0 for c in samples])
    prod_mean, prod_err = batch_mean_stderr(a * b)
    cov = prod_mean - a.mean() * b.mean()
    return float(cov), prod_err


def occupancy_stack(samples: Sequence[Configuration]) -> np.ndarray:
    """Samples as a (n, H, W) float array over the torus site grid."""
    grids = [c.occupancy_grid().astype(np.float64) for c in samples]
    return np.stack(grids)


def autocorrelation_curve(
    samples: Sequence[Configuration], axis: str, lags: Sequence[int]
) -> Dict[int, float]:
    """Connected occupancy autocorrelation along one axis of a torus.

    The mean is removed per site (so the frozen parity pattern of an
    ordered phase does not masquerade as correlation), then products are
    averaged over positions and samples for each lag.
    """
    if not samples:
        raise InsufficientData("no samples")
    if samples[0].boundary != "periodic":
        raise InsufficientData("autocorrelation curves require a torus")
    stack = occupancy_stack(samples)
    centered = stack - stack.mean(axis=0, keepdims=True)
    var = float((centered**2).mean())
    if var <= 0:
        return {d: 0.0 for d in lags}
    shift_axis = 1 if axis == "y" else 2
    curve = {}
    for d in lags:
        shifted = np.roll(centered, -d, axis=shift_axis)
        curve[d] = float((centered * shifted).mean() / var)
    return curve


def fit_decay_length(
    curve: Mapping[int, float], floor: float = 1e-4
) -> Tuple[float, float]:
    """Least-squares exponential decay length from a correlation curve.

    Fits log c(d) = a - d / xi over the lags where the curve stays above
    the noise floor. Returns (xi, stderr); a curve already below the
    floor at the first lag fits as length 0 (below resolution).
    """
    pts = [(d, c) for d, c in sorted(curve.items()) if d > 0]
    usable = []
    for d, c in pts:
        if c <= floor:
            break
        usable.append((d, math.log(c)))
    if not usable:
        return 0.0, float("nan")
    if len(usable) < 2:
        raise InsufficientData("fewer than two usable lags for the decay fit")
    xs = np.array([d for d, _ in usable])
    ys = np.array([v for _, v in usable])
    slope, intercept = np.polyfit(xs, ys, 1)
    if slope >= 0:
        return float("inf"), float("nan")
    resid = ys - (slope * xs + intercept)
    dof = max(len(usable) - 2, 1)
    denom = float(((xs - xs.mean()) ** 2).sum())
    slope_err = math.sqrt(float((resid**2).sum()) / dof / denom) if denom else float("nan")
    xi = -1.0 / slope
    return float(xi), float(xi * xi * slope_err)


def correlation_length_fit(
    samples: Sequence[Configuration],
    axis: str,
    lags: Optional[Sequence[int]] = None,
    floor: float = 1e-4,
) -> Tuple[float, float]:
    """Exponential correlation length along "x" or "y", with stderr.

    Even lags step over the period-2 structure of columnar samples.
    """
    if not samples:
        raise InsufficientData("no samples")
    cfg = samples[0]
    if lags is None:
        span = cfg.width if axis == "x" else cfg.height
        lags = list(range(2, span // 2, 2))
    if not lags:
        raise InsufficientData("no usable lags for this geometry")
    curve = autocorrelation_curve(samples, axis, lags)
    return fit_decay_length(curve, floor)


def correlation_curve_csv(curves: Mapping[str, Mapping[int, float]]) -> str:
    """Correlation curves as CSV rows (axis, lag, value)."""
    lines = ["axis,lag,value"]
    for axis, curve in curves.items():
        for d in sorted(curve):
            lines.append(f"{axis},{d},{curve[d]:.8g}")
    return "\n".join(lines) + "\n"


def offset_row_vacancy_check(cfg: Configuration) -> List[dict]:
    """Structural check on offset tiles of a columnar sample.

    For every tile centered at even x, find the nearest flanking even-x
    vertical sticks spanning the tile's two face rows; where both exist,
    count the vacant faces strictly between the sticks in those rows.
    Each such tile forces at least four vacancies.
    """
    from .sticks import extract_sticks

    results = []
    sticks = [
        s
        for s in extract_sticks(cfg)
        if s.orientation == "vertical" and s.parity == 0
    ]
    w = cfg.width
    for (x, y) in sorted(cfg.occupied):
        if x % 2:
            continue
        rows = (y - 1, y)

        def spans(stick):
            sy = stick.anchor[1]
            if stick.wraps:
                return True
            return sy <= rows[0] and rows[1] + 1 <= sy + stick.length

        left = [s for s in sticks if spans(s) and (s.anchor[0] - x) % w > w // 2]
        right = [s for s in sticks if spans(s) and 0 < (s.anchor[0] - x) % w <= w // 2]
        if not left or not right:
            results.append({"center": (x, y), "flanked": False, "vacancies": None})
            continue
        lx = max(left, key=lambda s: (s.anchor[0] - x) % w).anchor[0]
        rx = min(right, key=lambda s: (s.anchor[0] - x) % w).anchor[0]
        count = 0
        a = lx
        while a != rx:
            for fy in rows:
                if cfg.is_face_vacant((a, fy)):
                    count += 1
            a = (a + 1) % w
        results.append({"center": (x, y), "flanked": True, "vacancies": count})
    return results


@dataclass
class ObservableReport:
    """Structured estimator output with provenance."""

    params: dict
    estimators: Dict[str, dict] = field(default_factory=dict)
    phase_fractions: Dict[str, float] = field(default_factory=dict)
    weight_convention: dict = field(default_factory=dict)
    samples: Optional[List[dict]] = None
    measurements: int = 0

    def to_json(self, indent: Optional[int] = 2) -> str:
        payload = {
            "params": self.params,
            "measurements": self.measurements,
            "estimators": self.estimators,
            "phase_fractions": self.phase_fractions,
            "weight_convention": self.weight_convention,
        }
        if self.samples is not None:
            payload["samples"] = self.samples
        return json.dumps(payload, indent=indent)


def summarize_series(
    series: Mapping[str, List[float]], batches: int = DEFAULT_BATCHES
) -> Dict[str, dict]:
    out = {}
    for name, values in series.items():
        mean, err = batch_mean_stderr(values, batches)
        out[name] = {"mean": mean, "stderr": err, "n": len(values)}
    return out
