import math
import random

import numpy as np
import pytest

from squarepack.errors import InsufficientData
from squarepack.lattice import create_configuration
from squarepack.observables import (
    autocorrelation_curve,
    batch_mean_stderr,
    correlation_length_fit,
    fit_decay_length,
    offset_row_vacancy_check,
    parity_density,
    two_point_covariance,
)
from squarepack.sampler import seed_phase_configuration


def test_batch_mean_stderr_iid():
    rng = np.random.default_rng(0)
    values = rng.normal(3.0, 1.0, size=3200)
    mean, err = batch_mean_stderr(values)
    assert mean == pytest.approx(3.0, abs=0.1)
    assert err == pytest.approx(1.0 / math.sqrt(3200), rel=0.6)


def test_batch_mean_stderr_empty():
    with pytest.raises(InsufficientData):
        batch_mean_stderr([])


def test_parity_density_ver0_packed():
    cfg = seed_phase_configuration(8, 8, "ver0")
    dens = parity_density([cfg])
    assert dens["odd_x"] == pytest.approx(0.5)
    assert dens["even_x"] == 0.0
    # alternating offsets split the odd columns between the y-classes
    assert dens["10"] + dens["11"] == pytest.approx(1.0)


def test_parity_density_empty():
    cfg = create_configuration(6, 6, "periodic", [])
    dens = parity_density([cfg])
    assert all(v == 0.0 for v in dens.values())


def test_parity_weighted_sum_matches_global_density():
    rng = random.Random(3)
    cfgs = []
    for _ in range(5):
        occ = set()
        for _ in range(10):
            c = (rng.randrange(8), rng.randrange(8))
            try:
                create_configuration(8, 8, "periodic", occ | {c})
                occ.add(c)
            except Exception:
                pass
        cfgs.append(create_configuration(8, 8, "periodic", occ))
    dens = parity_density(cfgs)
    by_class = (dens["00"] + dens["01"] + dens["10"] + dens["11"]) / 4
    global_density = sum(c.tile_count for c in cfgs) / (64 * len(cfgs))
    assert by_class == pytest.approx(global_density, rel=1e-12)


def test_estimators_order_independent():
    cfgs = [
        create_configuration(8, 8, "periodic", occ)
        for occ in ([(1, 1)], [(3, 3), (6, 6)], [], [(1, 5)])
    ]
    assert parity_density(cfgs) == parity_density(list(reversed(cfgs)))
    a, _ = two_point_covariance(cfgs, (1, 1), (3, 3))
    b, _ = two_point_covariance(list(reversed(cfgs)), (1, 1), (3, 3))
    assert a == pytest.approx(b)


def test_two_point_covariance_identical_site():
    cfgs = [
        create_configuration(4, 4, "periodic", occ)
        for occ in ([(1, 1)], [], [(1, 1)], [(1, 1)], [])
    ]
    cov, _ = two_point_covariance(cfgs, (1, 1), (1, 1))
    p = 3 / 5
    assert cov == pytest.approx(p * (1 - p), rel=1e-12)


def test_two_point_covariance_synthetic_independent():
    rng = random.Random(1)
    cfgs = []
    for _ in range(400):
        occ = []
        if rng.random() < 0.5:
            occ.append((1, 1))
        if rng.random() < 0.5:
            occ.append((5, 5))
        cfgs.append(create_configuration(8, 8, "periodic", occ))
    cov, _ = two_point_covariance(cfgs, (1, 1), (5, 5))
    assert abs(cov) < 0.05


def test_fit_decay_length_exact_exponential():
    xi_true = 4.0
    curve = {d: math.exp(-d / xi_true) for d in range(1, 12)}
    xi, err = fit_decay_length(curve)
    assert xi == pytest.approx(xi_true, rel=1e-9)


def test_fit_decay_length_noise_floor():
    curve = {1: 1e-6, 2: 1e-7}
    xi, _ = fit_decay_length(curve, floor=1e-4)
    assert xi == 0.0


def test_correlation_length_iid_noise_below_resolution():
    rng = random.Random(5)
    cfgs = []
    for _ in range(60):
        occ = {
            (x, y)
            for x in range(1, 16, 4)
            for y in range(1, 16, 4)
            if rng.random() < 0.5
        }
        cfgs.append(create_configuration(16, 16, "periodic", occ))
    xi, _ = correlation_length_fit(cfgs, "y", lags=[2, 4, 6], floor=0.05)
    assert xi == 0.0


def test_autocorrelation_curve_requires_torus():
    cfg = create_configuration(6, 6, "free", [])
    with pytest.raises(InsufficientData):
        autocorrelation_curve([cfg], "y", [2])


def test_offset_row_vacancy_check_counts_four():
    # columns 1/3 and 9/11 fully packed with opposite offsets (wrapping
    # even sticks at x=2 and x=10), columns 5 and 7 empty except one
    # offset tile centered at even x=6: the columnar order proof forces
    # at least four vacancies in its rows between the flanking sticks
    w = h = 12
    occ = []
    for x, t in ((1, 0), (3, 1), (9, 1), (11, 0)):
        occ.extend((x, (1 + t + 2 * k) % h) for k in range(h // 2))
    occ.append((6, 5))
    cfg = create_configuration(w, h, "periodic", occ)
    results = offset_row_vacancy_check(cfg)
    flanked = [r for r in results if r["flanked"]]
    assert flanked, "the offset tile must be flanked by even sticks"
    for r in flanked:
        assert r["vacancies"] >= 4
