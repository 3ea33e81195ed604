import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stereoquant import (
    Region,
    auto_region,
    coplanar_rig,
    density_to_spacing,
    generate_grid,
    locate_pixel,
)
from stereoquant.errors import (
    DegenerateRegion,
    OutsideRegion,
    TargetNotVisible,
    TooManyPoints,
)
from stereoquant.scene_grid import analytic_footprint, frustum_halfspaces, intersection_bounds

RIG = coplanar_rig(100.0)


def test_unit_cube_half_spacing():
    g = generate_grid(Region([0, 0, 0], [1, 1, 1]), 0.5)
    assert g.counts == (3, 3, 3)
    assert g.size == 27


def test_spacing_larger_than_region_gives_min_corner_only():
    g = generate_grid(Region([0, 0, 0], [1, 1, 1]), 2.0)
    assert g.size == 1
    np.testing.assert_array_equal(g.coordinates(0), [0, 0, 0])


def test_three_points_per_cm():
    assert density_to_spacing(3) == pytest.approx(0.003333333, abs=1e-9)


def test_counts_survive_rounding():
    # 0.3 / 0.1 is 2.9999999999999996 in floating point
    g = generate_grid(Region([0, 0, 0], [0.3, 0.3, 0.3]), 0.1)
    assert g.counts == (4, 4, 4)


@pytest.mark.parametrize("lo,hi", [([0, 0, 0], [1, 1, 0]), ([0, 0, 0], [-1, 1, 1]),
                                   ([0, 0, np.nan], [1, 1, 1])])
def test_degenerate_region(lo, hi):
    with pytest.raises(DegenerateRegion):
        Region(lo, hi)


def test_bad_spacing():
    with pytest.raises(DegenerateRegion):
        generate_grid(Region([0, 0, 0], [1, 1, 1]), 0.0)


def test_point_cap_reports_memory():
    with pytest.raises(TooManyPoints) as info:
        generate_grid(Region([0, 0, 0], [1, 1, 1]), 0.01, max_points=1000)
    assert info.value.count == 101**3
    assert info.value.bytes_needed > 0
    assert isinstance(info.value, MemoryError)


def test_flat_order_and_point_formula():
    g = generate_grid(Region([1, 2, 3], [1.2, 2.3, 3.4]), 0.1)
    assert g.counts == (3, 4, 5)
    idx = np.arange(g.size)
    ijk = g.unravel(idx)
    np.testing.assert_array_equal(ijk[1], [0, 0, 1])  # z fastest
    np.testing.assert_allclose(g.coordinates(idx), [1, 2, 3] + 0.1 * ijk, rtol=0, atol=1e-15)
    np.testing.assert_array_equal(g.ravel(ijk), idx)
    np.testing.assert_array_equal(g.point(2, 3, 4), g.coordinates(g.size - 1))
    # no duplicate points
    assert np.unique(g.coordinates(idx).round(9), axis=0).shape[0] == g.size


@settings(max_examples=100, deadline=None)
@given(st.tuples(st.integers(1, 7), st.integers(1, 7), st.integers(1, 7)),
       st.floats(1e-3, 10), st.tuples(*[st.floats(-100, 100)] * 3))
def test_index_round_trip(counts, s, lo):
    lo = np.array(lo)
    g = generate_grid(Region(lo, lo + s * (np.array(counts) - 1) + s / 2), s)
    assert g.counts == counts
    idx = np.arange(g.size)
    pts = g.coordinates(idx)
    back = [g.nearest_index(p) for p in pts]
    np.testing.assert_array_equal(back, idx)


@settings(max_examples=50, deadline=None)
@given(st.tuples(*[st.integers(-20, 20)] * 3), st.floats(0.01, 2))
def test_translation_by_whole_spacings(shift, s):
    r = Region([0, 0, 0], [3 * s, 2 * s, 4 * s])
    d = s * np.array(shift, dtype=float)
    a = generate_grid(r, s)
    b = generate_grid(r.translated(d), s)
    assert a.counts == b.counts
    idx = np.arange(a.size)
    np.testing.assert_allclose(b.coordinates(idx), a.coordinates(idx) + d, atol=1e-9 * (1 + abs(d).max()))


def test_nearest_index_tie_goes_low():
    g = generate_grid(Region([0, 0, 0], [1, 1, 1]), 0.5)
    assert g.nearest_index([0.25, 0, 0]) == g.ravel([0, 0, 0])
    assert g.nearest_index([0.75, 0.75, 0.75]) == g.ravel([1, 1, 1])
    assert g.nearest_index([0.76, 0, 0]) == g.ravel([2, 0, 0])
    with pytest.raises(OutsideRegion):
        g.nearest_index([1.01, 0, 0])


def test_boundary_mask():
    g = generate_grid(Region([0, 0, 0], [1, 1, 1]), 0.5)
    inner = g.ravel([1, 1, 1])
    mask = g.boundary_mask(np.arange(g.size))
    assert not mask[inner]
    assert mask.sum() == 26


def test_halfspaces_contain_target():
    target = np.array([3.0, -7.0, 100.0])
    pixels = [locate_pixel(target, c) for c in RIG]
    A, b = frustum_halfspaces(RIG, pixels)
    assert A.shape == (8, 3)
    assert np.all(A @ target <= b + 1e-12)


def test_intersection_bounds_match_analytic_footprint():
    target = (0.0, 0.0, 100.0)
    pixels = [locate_pixel(target, c) for c in RIG]
    lo, hi = intersection_bounds(RIG, pixels)
    approx = analytic_footprint(RIG, target)
    # lateral extent is one pixel footprint, depth extent two (front and back cones)
    ext = hi - lo
    assert ext[0] == pytest.approx(approx[0], rel=0.05)
    assert ext[1] == pytest.approx(approx[1], rel=0.05)
    assert ext[2] == pytest.approx(2 * approx[2], rel=0.05)


def test_analytic_footprint_numbers():
    dx, dy, dz = analytic_footprint(RIG, (0, 0, 100))
    assert dx == pytest.approx(100 * 20e-6 / 15e-3)
    assert dz == pytest.approx(100**2 * 20e-6 / (15e-3 * 100))


def test_auto_region_at_margin_3():
    r = auto_region(RIG, (0, 0, 100), 3.0)
    half = r.extent / 2
    # about +-0.2 m laterally and +-0.4 m in depth
    assert half[0] == pytest.approx(0.2, rel=0.05)
    assert half[1] == pytest.approx(0.2, rel=0.05)
    assert half[2] == pytest.approx(0.4, rel=0.05)
    assert r.contains((0, 0, 100))


def test_auto_region_target_on_lattice():
    s = 0.01
    r = auto_region(RIG, (0.123, 4.5, 100), 1.1, spacing=s)
    g = generate_grid(r, s)
    assert g.lattice_index((0.123, 4.5, 100)) is not None


def test_auto_region_lattice_nested_across_margins():
    s = 0.01
    a = generate_grid(auto_region(RIG, (0, 0, 100), 1.5, spacing=s), s)
    b = generate_grid(auto_region(RIG, (0, 0, 100), 3.0, spacing=s), s)
    # the small lattice is a sub-lattice of the large one
    off = (a.origin - b.origin) / s
    np.testing.assert_allclose(off, np.rint(off), atol=1e-6)


@pytest.mark.parametrize("m", [0.0, -1.0])
def test_auto_region_bad_margin(m):
    with pytest.raises(ValueError):
        auto_region(RIG, (0, 0, 100), m)


def test_auto_region_invisible_target():
    with pytest.raises(TargetNotVisible):
        auto_region(RIG, (0, 0, -5), 1.1)
    with pytest.raises(TargetNotVisible):
        auto_region(RIG, (500, 0, 100), 1.1)
