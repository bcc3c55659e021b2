import random
from fractions import Fraction

import pytest

from squarepack.coupling import (
    disagreement_cluster_of,
    disagreement_set,
    king_clusters,
    radius_tail_experiment,
    swap_map,
)
from squarepack.errors import ShapeMismatch
from squarepack.lattice import create_configuration, mask_to_configuration
from squarepack.sampler import ChainParams

from oracles import king_clusters_bfs


def cfg(occ, w=8, h=8, boundary="periodic"):
    return create_configuration(w, h, boundary, occ)


# -- disagreement sets -----------------------------------------------------------


def test_disagreement_identical_and_symmetry():
    a = cfg([(1, 1), (5, 5)])
    b = cfg([(1, 1), (3, 3)])
    assert disagreement_set(a, a) == frozenset()
    d = disagreement_set(a, b)
    assert d == disagreement_set(b, a)
    assert d == frozenset({(5, 5), (3, 3)})


def test_disagreement_single_site():
    a = cfg([(1, 1)])
    b = cfg([])
    assert disagreement_set(a, b) == frozenset({(1, 1)})


def test_disagreement_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        disagreement_set(cfg([]), cfg([], w=10))
    with pytest.raises(ShapeMismatch):
        disagreement_set(cfg([]), cfg([], boundary="free"))


# -- king clusters ----------------------------------------------------------------


def test_king_clusters_basic():
    assert len(king_clusters({(0, 0), (1, 1)})) == 1
    assert len(king_clusters({(0, 0), (2, 2)})) == 2
    assert king_clusters(set()) == []


def test_king_clusters_periodic_wrap():
    clusters = king_clusters({(0, 0), (7, 7)}, 8, 8, periodic=True)
    assert len(clusters) == 1


@pytest.mark.parametrize("seed", range(10))
def test_king_clusters_match_bfs_oracle(seed):
    rng = random.Random(seed)
    pts = {(rng.randrange(10), rng.randrange(10)) for _ in range(rng.randrange(30))}
    periodic = seed % 2 == 0
    ours = king_clusters(pts, 10, 10, periodic=periodic)
    oracle = king_clusters_bfs(pts, 10, 10, periodic=periodic)
    assert set(ours) == set(oracle)


# -- swap map ----------------------------------------------------------------------


def test_swap_map_identity_without_anchor_disagreement():
    a = cfg([(1, 1)])
    b = cfg([(5, 5)])
    wa, wb = swap_map(a, b, [(3, 3)])
    assert wa is a and wb is b


def test_swap_map_is_involution_and_valid():
    a = cfg([(1, 1), (5, 1)])
    b = cfg([(2, 1), (5, 1)])
    wa, wb = swap_map(a, b, [(1, 1)])
    # the swapped pair re-validates as proper configurations
    create_configuration(8, 8, "periodic", wa.occupied)
    create_configuration(8, 8, "periodic", wb.occupied)
    ra, rb = swap_map(wa, wb, [(1, 1)])
    assert (ra.occupied, rb.occupied) == (a.occupied, b.occupied)


def test_swap_map_preserves_product_measure_exactly():
    """Exhaustive check on the 4x4 torus at lambda = 2 with exact weights."""
    from squarepack.lattice import iter_valid_masks

    lam = 2
    states = [
        (mask, cnt) for mask, cnt in iter_valid_masks(4, 4, "periodic")
    ]
    configs = {
        mask: mask_to_configuration(4, 4, "periodic", mask) for mask, _ in states
    }
    anchors = [(0, 0)]
    before = {}
    after = {}
    for m1, n1 in states:
        for m2, n2 in states:
            w = Fraction(lam) ** (n1 + n2)
            key = (m1, m2)
            before[key] = before.get(key, 0) + w
            wa, wb = swap_map(configs[m1], configs[m2], anchors)
            sk = (_mask_of(wa), _mask_of(wb))
            after[sk] = after.get(sk, 0) + w
    assert before == after


def _mask_of(config):
    from squarepack.lattice import model_sites

    sites = model_sites(config.width, config.height, config.boundary)
    index = {p: i for i, p in enumerate(sites)}
    m = 0
    for p in config.occupied:
        m |= 1 << index[p]
    return m


def test_disagreement_cluster_of_multiple_anchors():
    a = cfg([(1, 1), (5, 5)])
    b = cfg([])
    cl = disagreement_cluster_of(a, b, [(1, 1), (5, 5)])
    assert cl == frozenset({(1, 1), (5, 5)})
    cl_one = disagreement_cluster_of(a, b, [(1, 1)])
    assert cl_one == frozenset({(1, 1)})


# -- tail experiment ---------------------------------------------------------------


def test_tail_anisotropy_deep_in_ordered_phase():
    # well above the ordering transition, horizontal bridging through
    # offset tiles is subcritical and the directional decay lengths of
    # cluster reach separate clearly
    template = ChainParams(
        width=32,
        height=256,
        lam=400.0,
        seed=1,
        sweeps=8000,
        burn_in=2000,
        thinning=40,
        translation_move_fraction=0.0,
        initial="ver0",
    )
    report = radius_tail_experiment(template, (5, 6), phase="ver0")
    assert report.pairs_skipped == 0
    xi_x = report.fits["horizontal"]["decay_length"]
    xi_y = report.fits["vertical"]["decay_length"]
    assert xi_y / xi_x > 3


def test_radius_tail_experiment_smoke():
    template = ChainParams(
        width=16,
        height=16,
        lam=40.0,
        seed=0,
        sweeps=300,
        burn_in=150,
        thinning=10,
        initial="ver0",
    )
    report = radius_tail_experiment(template, (11, 12), phase="ver0", min_count=5)
    assert report.pairs_used + report.pairs_skipped == 30
    assert report.totals == report.pairs_used * 256
    # d = 0 tail probability equals the disagreement density estimate
    p0 = report.probability("vertical", 0)
    assert 0 <= p0 <= 1
    assert report.probability("vertical", 2) <= p0
    csv = report.to_csv()
    assert csv.startswith("direction,d,count,probability")
    # tails are nonincreasing in d
    for direction in ("horizontal", "vertical"):
        hist = report.counts[direction]
        if not hist:
            continue
        probs = [report.probability(direction, d) for d in range(max(hist) + 1)]
        assert all(a >= b for a, b in zip(probs, probs[1:]))
