import math

import numpy as np
import pytest

from dwshell import geometry


def square(center=0j, half=1.0):
    return center + half * np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])


def test_dedupe_consecutive():
    v = np.array([0, 0, 1, 1, 2, 0], dtype=complex)
    out = geometry.dedupe_consecutive(v)
    np.testing.assert_allclose(out, [0, 1, 2])


def test_boundary_curve_mirror():
    crv = geometry.BoundaryCurve2D(np.array([1.0, 2.0 + 1j]), symmetry_axis=0.0)
    full = crv.full_polygon()
    assert np.any(np.abs(full - (2.0 - 1j)) < 1e-12)


def test_boundary_curve_rejects_wrong_half():
    with pytest.raises(ValueError):
        geometry.BoundaryCurve2D(np.array([1.0 - 1j]), symmetry_axis=0.0)


def test_convex_hull_basic():
    pts = np.array([0, 1, 1j, 1 + 1j, 0.5 + 0.5j])
    hull = geometry.convex_hull_2d(pts)
    assert hull.size == 4
    pts_line = np.array([0, 1, 2, 3], dtype=complex)
    hull_line = geometry.convex_hull_2d(pts_line)
    assert sorted(hull_line.real.tolist()) == [0, 3]
    assert geometry.convex_hull_2d(np.array([2 + 1j])).size == 1


def test_point_in_polygon():
    sq = square()
    inside = geometry.point_in_polygon([0j, 0.5 + 0.5j, 2 + 0j], sq)
    assert inside.tolist() == [True, True, False]


def test_polygon_distance_disjoint_and_nested():
    a = square(0j, 1.0)
    b = square(5 + 0j, 1.0)
    assert geometry.polygon_pair_distance(a, b) == pytest.approx(3.0)
    inner = square(0j, 0.2)
    assert geometry.polygon_pair_distance(a, inner) == 0.0  # containment counts
    assert geometry.polygons_intersect(a, inner)
    assert not geometry.polygons_intersect(a, b)


def test_hausdorff_polyline():
    a = square(0j, 1.0)
    b = square(0j, 1.0) + 0.1
    d = geometry.polyline_hausdorff(a, b)
    assert d == pytest.approx(0.1, abs=1e-12)


def test_hausdorff_large_inputs_match_small():
    t = np.linspace(0, 2 * math.pi, 3000, endpoint=False)
    c1 = np.exp(1j * t)
    c2 = 1.001 * np.exp(1j * (t + 0.001))
    d = geometry.polyline_hausdorff(c1, c2)
    assert d == pytest.approx(0.001, abs=1e-4)


def test_resample_polygon_keeps_vertices():
    sq = square()
    out = geometry.resample_closed_polygon(sq, 40)
    for v in sq:
        assert np.min(np.abs(out - v)) < 1e-12
    assert out.size >= 36


def test_hull_margins_3d():
    pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    probes = np.array([[0.2, 0.2, 0.2], [1.0, 1.0, 1.0]])
    m = geometry.hull_margins(pts, probes)
    assert m[0] <= 1e-12
    assert m[1] > 0.5


def test_hull_margins_degenerate():
    # planar, collinear and single-point clouds all classify correctly
    plane = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], dtype=float)
    m = geometry.hull_margins(plane, np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 1.0]]))
    assert m[0] <= 1e-12 and m[1] == pytest.approx(1.0, abs=1e-9)
    line = np.array([[0, 0, 0], [1, 0, 0]], dtype=float)
    m2 = geometry.hull_margins(line, np.array([[0.5, 0, 0], [2.0, 0, 0]]))
    assert m2[0] <= 1e-12 and m2[1] == pytest.approx(1.0, abs=1e-9)
    point = np.array([[1.0, 1.0, 1.0]])
    m3 = geometry.hull_margins(point, np.array([[1.0, 1.0, 1.0], [1.0, 1.0, 2.0]]))
    assert m3[0] <= 1e-12 and m3[1] == pytest.approx(1.0, abs=1e-9)


def test_line_region_components():
    sq = square()  # [-1,1]^2
    comps = geometry.line_region_components([sq], 0j, 1.0 + 0j, 1e-7, 1e-9)
    assert len(comps) == 1
    assert comps[0][0] == pytest.approx(-1.0, abs=1e-9)
    assert comps[0][1] == pytest.approx(1.0, abs=1e-9)
    # two squares -> two components with a unit gap between them
    two = [square(0j, 0.5), square(2 + 0j, 0.5)]
    comps2 = geometry.line_region_components(two, 0j, 1.0 + 0j, 1e-7, 1e-9)
    assert len(comps2) == 2
    assert comps2[1][0] - comps2[0][1] == pytest.approx(1.0, abs=1e-9)
    # a line that misses entirely
    assert geometry.line_region_components([sq], 5j, 1.0 + 0j, 1e-7, 1e-9) == []


def test_circle_region_components():
    sq = square()  # [-1,1]^2
    comps = geometry.circle_region_components([sq], 0j, 0.5, 1e-7, 1e-9)
    assert len(comps) == 1
    assert comps[0][1] - comps[0][0] == pytest.approx(2 * math.pi, abs=1e-9)
    # radius between 1 and sqrt(2): four corner arcs
    comps2 = geometry.circle_region_components([sq], 0j, 1.2, 1e-7, 1e-9)
    assert len(comps2) == 4
    # big circle misses the region entirely
    assert geometry.circle_region_components([sq], 0j, 5.0, 1e-7, 1e-9) == []
