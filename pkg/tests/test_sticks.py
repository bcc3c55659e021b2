import pytest

from squarepack.errors import DimensionError, WrapError
from squarepack.lattice import create_configuration
from squarepack.sticks import (
    Rect,
    classify_phase,
    detect_stick_edges,
    divided_directions,
    divides,
    extract_sticks,
    properly_divides,
    psi_set,
    stick_census,
)


def aligned_packing(w, h):
    return create_configuration(
        w, h, "periodic", [(x, y) for x in range(1, w, 2) for y in range(1, h, 2)]
    )


def offset_columns(w, h, offsets):
    """Fully packed columns at odd x, column i shifted up by offsets[i]."""
    occ = []
    for i, x in enumerate(range(1, w, 2)):
        t = offsets[i] % 2
        occ.extend((x, (1 + t + 2 * k) % h) for k in range(h // 2))
    return create_configuration(w, h, "periodic", occ)


# -- stick edges -------------------------------------------------------------


def test_empty_config_no_stick_edges():
    assert detect_stick_edges(create_configuration(6, 6, "periodic", [])) == set()


def test_aligned_packing_no_stick_edges():
    assert detect_stick_edges(aligned_packing(8, 8)) == set()


def test_offset_columns_make_vertical_stick():
    # columns at x=1 (offset 0) and x=3 (offset 1) share stick edges on x=2
    cfg = offset_columns(8, 8, [0, 1, 1, 1])
    edges = detect_stick_edges(cfg)
    vertical_at_2 = {e for e in edges if e[0] == "v" and e[1] == 2}
    assert len(vertical_at_2) == 8  # full wrap
    assert all(e[0] == "v" for e in edges)


def test_wrapping_stick_extraction():
    # columns 3, 5, 7 shifted: parity boundaries at x=2 and the seam x=0
    cfg = offset_columns(8, 8, [0, 1, 1, 1])
    sticks = extract_sticks(cfg)
    wrapping = [s for s in sticks if s.wraps]
    assert len(wrapping) == 2
    assert {s.anchor[0] for s in wrapping} == {0, 2}
    for s in wrapping:
        assert s.orientation == "vertical"
        assert s.length == 8
        assert s.type == "ver0"


def test_sticks_end_at_vacancies_in_window():
    # one tile shifted off the aligned packing inside a fully packed
    # window: the offset tile borders both neighbor columns with distinct
    # parity along its own two face rows, and the sticks stop at the
    # vacant faces above and below it
    w = h = 8
    occ = [(x, y) for x in range(1, w, 2) for y in range(1, h, 2)]
    occ.remove((3, 3))
    occ.remove((3, 5))
    occ.append((3, 4))
    cfg = create_configuration(w, h, "fully_packed", occ)
    sticks = extract_sticks(cfg)
    assert {s.anchor[0] for s in sticks} == {2, 4}
    for s in sticks:
        assert s.orientation == "vertical"
        assert not s.wraps
        assert s.anchor[1] == 3
        assert s.length == 2  # the offset tile's own two face rows
    # sticks end at vacant faces: vacancy pairs sit below and above the
    # shifted tile
    assert cfg.is_face_vacant((2, 2)) and cfg.is_face_vacant((3, 2))
    assert cfg.is_face_vacant((2, 5)) and cfg.is_face_vacant((3, 5))


def test_sticks_never_share_vertices():
    cfg = offset_columns(8, 8, [0, 1, 0, 0])
    sticks = extract_sticks(cfg)
    seen = set()
    for s in sticks:
        x, y = s.anchor
        if s.orientation == "vertical":
            pts = {(x, y + k) for k in range(s.length + 1)}
        else:
            pts = {(x + k, y) for k in range(s.length + 1)}
        assert not (seen & pts)
        seen |= pts


def test_stick_type_parity():
    cfg = offset_columns(8, 8, [0, 1, 1, 1]).translate(1, 0)
    sticks = extract_sticks(cfg)
    assert {s.type for s in sticks} == {"ver1"}


# -- division predicates -------------------------------------------------------


def test_divides_examples():
    r = Rect((1, 0), 2, 2)
    assert divides((2, 0), (2, 2), r)
    assert not divides((2, 0), (2, 2), Rect((2, 0), 2, 2))  # not strictly interior
    assert not divides((0, 1), (2, 1), r)  # horizontal cannot divide vertically
    assert divides((0, 1), (4, 1), Rect((0, 0), 4, 2))


def test_divides_requires_full_span():
    r = Rect((0, 0), 4, 4)
    assert not divides((2, 1), (2, 3), r)
    assert divides((2, 0), (2, 4), r)
    assert divides((2, -3), (2, 9), r)


def test_properly_divides():
    cfg = offset_columns(16, 16, [0, 1, 0, 1, 0, 1, 0, 1])
    sticks = extract_sticks(cfg)
    rect = Rect((0, 0), 16, 16)
    assert any(properly_divides(s, rect, cfg, 4) for s in sticks)
    with pytest.raises(DimensionError):
        properly_divides(sticks[0], Rect((0, 0), 10, 16), cfg, 4)


def test_figure_style_division_cases():
    # reconstruct the worked 16x16 window cases: a window divided by a
    # vertical stick too close to the edge plus a horizontal stick that
    # only spans the inner rectangle is not properly divided; a window
    # with a long interior (ver,1) stick is.
    rect = Rect((0, 0), 16, 16)
    inner = rect.inner(4)
    # vertical segment at x=2 spanning the window divides rect only
    assert divides((2, -1), (2, 17), rect) and not divides((2, -1), (2, 17), inner)
    # horizontal segment at y=6 spanning [4, 12] divides inner only
    assert divides((3, 6), (13, 6), inner) and not divides((3, 6), (13, 6), rect)
    # interior vertical line at odd x properly divides
    assert divides((7, -1), (7, 17), rect) and divides((7, -1), (7, 17), inner)


def test_psi_set_ver0_columns():
    cfg = offset_columns(32, 32, [0, 1] * 8)
    psi = psi_set(cfg, 4, 4, "ver0", 4)
    expected = {(x, y) for x in range(5) for y in range(5)}
    assert psi == expected
    assert psi_set(cfg, 4, 4, "hor0", 4) == set()
    assert psi_set(cfg, 4, 4, "ver1", 4) == set()


def test_psi_set_empty_config():
    cfg = create_configuration(16, 16, "periodic", [])
    for t in ("ver0", "ver1", "hor0", "hor1"):
        assert psi_set(cfg, 4, 4, t, 4) == set()


def test_psi_wrap_error():
    cfg = create_configuration(8, 8, "periodic", [])
    with pytest.raises(WrapError):
        psi_set(cfg, 4, 4, "ver0", 4)  # 16x16 window in an 8x8 torus


def test_psi_ver1_from_shifted_columns():
    cfg = offset_columns(32, 32, [0, 1] * 8).translate(1, 0)
    assert psi_set(cfg, 4, 4, "ver1", 4) != set()
    assert psi_set(cfg, 4, 4, "ver0", 4) == set()


def test_no_rect_divided_both_ways():
    cfg = offset_columns(16, 16, [1, 0, 0, 1, 0, 1, 1, 0])
    sticks = extract_sticks(cfg)
    for corner in [(0, 0), (3, 2), (5, 5), (8, 1)]:
        ver, hor = divided_directions(cfg, Rect(corner, 6, 6), sticks)
        assert not (ver and hor)


# -- phase classification ------------------------------------------------------


def test_classify_phase_ver0():
    cfg = offset_columns(16, 16, [0, 1, 0, 1, 1, 0, 1, 0])
    assert classify_phase(cfg, b=4) == "ver0"


def test_classify_phase_symmetries():
    cfg = offset_columns(16, 16, [0, 1, 0, 1, 1, 0, 1, 0])
    assert classify_phase(cfg.transpose(), b=4) == "hor0"
    assert classify_phase(cfg.translate(1, 0), b=4) == "ver1"
    assert classify_phase(cfg.transpose().translate(0, 1), b=4) == "hor1"


def test_classify_phase_empty_undetermined():
    assert classify_phase(create_configuration(8, 8, "periodic", []), b=2) == "undetermined"


def test_classify_phase_aligned_undetermined():
    assert classify_phase(aligned_packing(8, 8), b=2) == "undetermined"


def test_stick_side_parities_constant():
    # the tiles bounding a stick keep one parity per side along its run
    from squarepack.lattice import tile_parity_class
    from squarepack.sampler import Chain, ChainParams

    chain = Chain(
        ChainParams(width=16, height=16, lam=50.0, seed=6, sweeps=0, initial="ver0")
    )
    chain.sweep(500)
    for _ in range(20):
        chain.sweep(25)
        cfg = chain.configuration()
        for s in extract_sticks(cfg):
            sides = ([], [])
            for k in range(s.length):
                if s.orientation == "vertical":
                    x, y = s.anchor[0], s.anchor[1] + k
                    faces = ((x - 1, y), (x, y))
                else:
                    x, y = s.anchor[0] + k, s.anchor[1]
                    faces = ((x, y - 1), (x, y))
                for side, face in zip(sides, faces):
                    cover = cfg.face_cover_center(face)
                    assert cover is not None
                    side.append(tile_parity_class(cover).as_tuple())
            for side in sides:
                assert len(set(side)) == 1


def test_stick_census_totals():
    cfg = offset_columns(16, 16, [0, 1, 0, 1, 1, 0, 1, 0])
    census = stick_census(cfg)
    total = sum(c["count"] for c in census.values())
    assert total == len(extract_sticks(cfg))
    assert census["hor0"]["count"] == census["hor1"]["count"] == 0
