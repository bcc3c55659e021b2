import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from squarepack import exact
from squarepack.errors import NonpositiveFugacity, OddLength, TooLarge

from oracles import (
    cyclic_independent_set_counts,
    torus_partition_counts,
    z1d_periodic_enumeration,
)


# -- one-dimensional transfer matrix ------------------------------------


def test_one_dim_transfer_golden_ratio():
    gp, gm = exact.one_dim_transfer(1.0)
    assert gp == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-12)
    assert gm == pytest.approx((1 - math.sqrt(5)) / 2, rel=1e-12)


def test_one_dim_transfer_large_lambda_limit():
    gp, gm = exact.one_dim_transfer(1e12)
    assert gp == pytest.approx(1.0, abs=1e-5)
    assert gm == pytest.approx(-1.0, abs=1e-5)


@given(st.floats(min_value=0.01, max_value=1e6))
def test_one_dim_transfer_determinant(lam):
    gp, gm = exact.one_dim_transfer(lam)
    assert gp * gm == pytest.approx(-1.0, rel=1e-9)


def test_one_dim_transfer_rejects_nonpositive():
    with pytest.raises(NonpositiveFugacity):
        exact.one_dim_transfer(0.0)
    with pytest.raises(NonpositiveFugacity):
        exact.one_dim_transfer(-2.0)


def test_z1d_periodic_small_values():
    assert exact.z1d_periodic(2, 1.0) == pytest.approx(3.0, rel=1e-12)
    assert exact.z1d_periodic(4, 1.0) == pytest.approx(7.0, rel=1e-12)
    assert exact.z1d_periodic(2, 4.0) == pytest.approx(2.25, rel=1e-12)


def test_z1d_periodic_rejects_odd():
    with pytest.raises(OddLength):
        exact.z1d_periodic(3, 1.0)


@pytest.mark.parametrize("length", [2, 4, 6, 8, 10])
@pytest.mark.parametrize("lam", [0.5, 1.0, 4.0, 100.0])
def test_z1d_periodic_matches_sequence_enumeration(length, lam):
    oracle = z1d_periodic_enumeration(length, lam)
    assert exact.z1d_periodic(length, lam) == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("length", [2, 4, 8, 12])
def test_z1d_periodic_polynomial_identity(length):
    # Tr(M^L) in t = lam^(-1/2) has coefficient N_cyc(L, n) at power L - 2n
    coeffs = exact.z1d_periodic_coeffs(length)
    counts = cyclic_independent_set_counts(length)
    expected = [0] * (length + 1)
    for n, c in enumerate(counts):
        expected[length - 2 * n] = c
    assert list(coeffs) + [0] * (length + 1 - len(coeffs)) == expected


@pytest.mark.parametrize("length", [2, 4, 6, 10, 20])
@pytest.mark.parametrize("lam", [0.25, 1.0, 9.0])
def test_z1d_periodic_lower_bound(length, lam):
    assert exact.z1d_periodic(length, lam) >= (1 + 0.5 * lam**-0.5) ** length


def test_z1d_free_values():
    assert exact.z1d_free(0, 3.0) == pytest.approx(1.0)
    assert exact.z1d_free(2, 4.0) == pytest.approx(1.25, rel=1e-12)
    # L=4: n=0: C(4,0) lam^-2, n=1: C(3,1) lam^-1, n=2: C(2,2) lam^0
    lam = 2.0
    assert exact.z1d_free(4, lam) == pytest.approx(
        lam**-2 + 3 * lam**-1 + 1, rel=1e-12
    )


@pytest.mark.parametrize("length", [2, 6, 10, 20])
@pytest.mark.parametrize("lam", [0.5, 4.0, 100.0])
def test_z1d_free_quadratic_lower_bound(length, lam):
    assert exact.z1d_free(length, lam) >= 1 + length**2 / (8 * lam)


# -- partition polynomials -----------------------------------------------


def test_partition_4x4_torus_against_mask_oracle():
    # direct enumeration over all 2^16 masks with pairwise checks
    oracle = torus_partition_counts(4, 4)
    poly = exact.partition_polynomial(4, 4, "periodic", method="brute")
    assert poly.coefficients == oracle
    assert poly.coefficients == (1, 16, 56, 48, 12)


@pytest.mark.parametrize(
    "dims,boundary",
    [
        ((4, 4), "periodic"),
        ((4, 6), "periodic"),
        ((6, 4), "periodic"),
        ((6, 6), "periodic"),
        ((8, 4), "periodic"),
        ((4, 4), "free"),
        ((6, 6), "free"),
        ((6, 4), "fully_packed"),
    ],
)
def test_brute_and_transfer_agree(dims, boundary):
    w, h = dims
    brute = exact.partition_polynomial(w, h, boundary, method="brute")
    transfer = exact.partition_polynomial(w, h, boundary, method="transfer")
    assert brute.coefficients == transfer.coefficients


def test_free_and_fully_packed_polynomials_coincide():
    # for even rectangles the two boundary conditions admit the same
    # interior configurations
    free = exact.partition_polynomial(6, 6, "free")
    packed = exact.partition_polynomial(6, 6, "fully_packed")
    assert free.coefficients == packed.coefficients


def test_a0_is_one_and_bounds():
    poly = exact.partition_polynomial(6, 4, "periodic")
    assert poly.coefficients[0] == 1
    assert all(a >= 0 for a in poly.coefficients)
    assert poly.n_max <= poly.area // 4


def test_partition_too_large():
    with pytest.raises(TooLarge):
        exact.partition_polynomial(10, 10, "periodic", method="brute")
    with pytest.raises(TooLarge):
        exact.partition_polynomial(16, 4, "periodic", method="transfer")


def test_partition_parallel_matches_serial():
    serial = exact.partition_polynomial(6, 4, "periodic", method="brute")
    parallel = exact.partition_polynomial(
        6, 4, "periodic", method="brute", threads=2
    )
    assert serial.coefficients == parallel.coefficients


def test_evaluations_and_report():
    poly = exact.partition_polynomial(4, 4, "periodic")
    lam = 2.0
    tile = sum(a * lam**n for n, a in enumerate(poly.coefficients))
    assert poly.evaluate_tile(lam) == pytest.approx(tile)
    assert poly.evaluate_vacancy(lam) == pytest.approx(tile * lam**-4)
    report = poly.report([1.0, 2.0])
    assert report["coefficients"] == [1, 16, 56, 48, 12]
    assert len(report["evaluations"]) == 2


# -- event weights ---------------------------------------------------------


def test_event_weight_true_false():
    lam = 2.0
    poly = exact.partition_polynomial(4, 4, "periodic")
    z = exact.event_weight(4, 4, "periodic", lam, lambda cfg: True)
    assert z == pytest.approx(poly.evaluate_vacancy(lam), rel=1e-12)
    assert exact.event_weight(4, 4, "periodic", lam, lambda cfg: False) == 0.0


def test_event_weight_face_vacant():
    from squarepack.lattice import iter_valid_masks, mask_to_configuration

    lam = 1.0
    w = exact.event_weight(
        4, 4, "periodic", lam, lambda cfg: cfg.is_face_vacant((0, 0))
    )
    # at lam=1 every configuration has weight 1: count configurations
    # leaving the face at (0, 0) vacant
    count = sum(
        1
        for mask, _ in iter_valid_masks(4, 4, "periodic")
        if mask_to_configuration(4, 4, "periodic", mask).is_face_vacant((0, 0))
    )
    assert w == pytest.approx(count, rel=1e-12)


def test_z1d_periodic_equals_torus_event_weight():
    # the smallest representable torus is 4 wide, holding two independent
    # odd columns; restricting to a single column recovers the periodic
    # 1D value up to the empty strip's exact factor lam^(-L/2), and
    # restricting to even horizontal parity squares it.
    lam = 3.0
    for length in (4, 6):
        single = exact.event_weight(
            4,
            length,
            "periodic",
            lam,
            lambda cfg: all(x == 1 for x, _ in cfg.occupied),
        )
        z = exact.z1d_periodic(length, lam)
        assert single * lam ** (length / 2.0) == pytest.approx(z, rel=1e-12)
        both = exact.event_weight(
            4, length, "periodic", lam, lambda cfg: all(x % 2 for x, _ in cfg.occupied)
        )
        assert both == pytest.approx(z * z, rel=1e-12)
