import math

import numpy as np
import pytest

from dwshell import tomography
from dwshell.geometry import polyline_hausdorff
from dwshell.linalg import hermitian_part

from conftest import random_complex
from oracles import brute_slice_max, srg_points, unit_vectors_2d


def test_slice_diag_value_and_witness():
    prob = tomography.CrossSectionProblem(np.diag([1.0, 2.0]), 0.0, 1.5, "max")
    res = tomography.cross_section_extremum(prob)
    assert res.value == pytest.approx(2.5, abs=1e-7)
    assert res.gap < 1e-7
    assert abs(res.witness[0]) ** 2 == pytest.approx(0.5, abs=1e-6)
    assert abs(res.witness[1]) ** 2 == pytest.approx(0.5, abs=1e-6)


def test_slice_identity_both_orientations():
    for orient in ("max", "min"):
        res = tomography.cross_section_extremum(
            tomography.CrossSectionProblem(np.eye(2), 0.0, 1.0, orient))
        assert res.value == pytest.approx(1.0, abs=1e-9)


def test_slice_nilpotent_value(nilpotent):
    res = tomography.cross_section_extremum(
        tomography.CrossSectionProblem(nilpotent, 0.0, 0.25, "max"))
    # sphere cross-section: 0.5 + sqrt(1/4 - k^2)
    expected = 0.5 + math.sqrt(0.25 - 0.0625)
    assert res.value == pytest.approx(expected, abs=1e-7)
    brute = brute_slice_max(nilpotent, 0.0, 0.25)
    assert res.value == pytest.approx(brute, abs=2e-3)
    assert res.gap < 1e-7


def test_slice_infeasible_raises():
    with pytest.raises(tomography.InfeasibleSliceError):
        tomography.cross_section_extremum(
            tomography.CrossSectionProblem(np.diag([1.0, 2.0]), 0.0, 5.0, "max"))


def test_slice_losslessness_random(rng):
    for _ in range(6):
        n = int(rng.integers(2, 7))
        a = random_complex(rng, n)
        theta = rng.uniform(-math.pi / 2, math.pi / 2)
        m = hermitian_part(np.exp(-1j * theta) * a)
        vals = np.linalg.eigvalsh(m)
        ks = np.linspace(vals[0], vals[-1], 21)
        his, los = tomography.slice_extrema(a, theta, ks)
        q = a.conj().T @ a
        for res, k in zip(his + los, np.concatenate([ks, ks])):
            assert res.gap < 1e-7
            x = res.witness
            assert abs(np.linalg.norm(x) - 1) < 1e-9
            assert abs(float(np.real(x.conj() @ m @ x)) - k) < 1e-7
            assert abs(float(np.real(x.conj() @ q @ x)) - res.value) < 1e-7


def test_slice_monotone_feasibility(rng):
    a = random_complex(rng, 4)
    m = hermitian_part(a)
    vals = np.linalg.eigvalsh(m)
    ks = np.linspace(vals[0], vals[-1], 15)
    his, los = tomography.slice_extrema(a, 0.0, ks)
    for h, l, k in zip(his, los, ks):
        assert h.value >= l.value - 1e-9
        assert l.value >= k * k - 1e-7  # slices live above the paraboloid


def test_endpoint_collapse(rng):
    a = random_complex(rng, 4)
    theta = 0.37
    m = hermitian_part(np.exp(-1j * theta) * a)
    vals = np.linalg.eigvalsh(m)
    his, los = tomography.slice_extrema(a, theta, [vals[0], vals[-1]])
    for h, l in zip(his, los):
        assert abs(h.value - l.value) < 1e-6


def test_dual_objective_convexity(rng):
    a = random_complex(rng, 4)
    m = hermitian_part(a)
    q = a.conj().T @ a
    vals = np.linalg.eigvalsh(m)
    k = float(0.3 * vals[0] + 0.7 * vals[-1])
    ys = rng.uniform(-5, 5, size=30)
    for y1, y2 in zip(ys[:15], ys[15:]):
        g1 = tomography._g_batch(q, m, np.array([k]), np.array([y1]))[0]
        g2 = tomography._g_batch(q, m, np.array([k]), np.array([y2]))[0]
        gm = tomography._g_batch(q, m, np.array([k]), np.array([(y1 + y2) / 2]))[0]
        assert gm <= 0.5 * (g1 + g2) + 1e-9


def test_plot_scalar_multiple_of_identity():
    curve = tomography.plot_theta_srg(2.5 * np.eye(3), 0.0, 32)
    assert curve.vertices.size == 1
    assert abs(curve.vertices[0] - 2.5) < 1e-9


def test_plot_diag_arc():
    curve = tomography.plot_theta_srg(np.diag([1.0, 2.0]), 0.0, 50)
    top = curve.vertices[:50]
    assert np.max(np.abs(np.abs(top - 1.5) - 0.5)) < 1e-6
    # edge rays touch the axis at the eigenvalues
    assert abs(curve.vertices[0] - 1.0) < 1e-9
    assert abs(curve.vertices[49] - 2.0) < 1e-9


def test_plot_nilpotent_touches_origin(nilpotent):
    # odd resolution puts a slice exactly through the origin
    curve = tomography.plot_theta_srg(nilpotent, 0.0, 101)
    full = curve.full_polygon()
    assert np.min(np.abs(full)) < 1e-7
    # the extreme rays approach 0 and pi at curve resolution
    devs = np.angle(curve.vertices[np.abs(curve.vertices) > 1e-8])
    assert devs.min() < 0.05 and devs.max() > math.pi - 0.05


def test_plot_contains_srg_samples(rng):
    a = random_complex(rng, 3)
    curve = tomography.plot_theta_srg(a, 0.0, 400)
    from dwshell.geometry import point_in_polygon

    gen = np.random.default_rng(0)
    xs = gen.normal(size=(3, 500)) + 1j * gen.normal(size=(3, 500))
    xs /= np.linalg.norm(xs, axis=0, keepdims=True)
    samples = srg_points(a, xs)
    inside = point_in_polygon(samples, curve.full_polygon())
    # interior sampling should land inside the polygon essentially always
    assert np.mean(inside) > 0.995


def test_vnumran_path_agreement_basic():
    ca = tomography.plot_theta_srg(np.diag([1.0, 2.0]), 0.0, 128,
                                   spacing="cosine", sagitta=2e-6)
    cb = tomography.plot_theta_srg_via_vnumran(np.diag([1.0, 2.0]), 0.0, 128, sagitta=2e-6)
    assert polyline_hausdorff(ca.full_polygon(), cb.full_polygon()) < 1e-5


def test_vnumran_rotation_identity(rng):
    a = random_complex(rng, 3)
    alpha = 0.9
    c1 = tomography.plot_theta_srg_via_vnumran(np.exp(1j * alpha) * a, alpha, 96)
    c2 = tomography.plot_theta_srg_via_vnumran(a, 0.0, 96)
    assert polyline_hausdorff(c1.full_polygon(),
                              np.exp(1j * alpha) * c2.full_polygon()) < 1e-6


def test_vnumran_hermitian_segment_endpoints():
    # for diag(1,3) the carrier range is the segment (1,1)-(3,9); its image
    # runs through 1 and 3 on the axis with the apex at 2
    cb = tomography.plot_theta_srg_via_vnumran(np.diag([1.0, 3.0]), 0.0, 64)
    pts = cb.vertices
    assert np.min(np.abs(pts - 1.0)) < 1e-9
    assert np.min(np.abs(pts - 3.0)) < 1e-9
    # segment midpoint (2, 5) maps to the arc apex 2 + i
    assert np.min(np.abs(pts - (2.0 + 1j))) < 1e-3


def test_ssg_hermitian_branches_mirror():
    a = np.diag([1.0, 2.0])
    upper, lower = tomography.plot_ssg(a, 40)
    assert polyline_hausdorff(upper.vertices, np.conj(lower.vertices)) < 1e-6


def test_ssg_scalar_rotation():
    upper, lower = tomography.plot_ssg(np.array([[1j]]), 16)
    assert upper.vertices.size == 1 and abs(upper.vertices[0] - 1j) < 1e-9
    assert lower.vertices.size == 0


def test_ssg_plus_minus_i():
    upper, lower = tomography.plot_ssg(np.diag([1j, -1j]), 24)
    assert np.max(np.abs(upper.vertices - 1j)) < 1e-8
    assert np.max(np.abs(lower.vertices + 1j)) < 1e-8


def test_ssg_sign_constraint_respected(rng):
    a = random_complex(rng, 3)
    s = (a - a.conj().T) / 2j
    upper, lower = tomography.plot_ssg(a, 32)
    # brute samples split by the sign of the skew form
    gen = np.random.default_rng(1)
    xs = gen.normal(size=(3, 3000)) + 1j * gen.normal(size=(3, 3000))
    xs /= np.linalg.norm(xs, axis=0, keepdims=True)
    sgn = np.einsum("ik,ij,jk->k", xs.conj(), s, xs).real
    ax = a @ xs
    ip = np.einsum("ik,ik->k", xs.conj(), ax)
    ny = np.linalg.norm(ax, axis=0)
    ang = np.arccos(np.clip(ip.real / np.maximum(ny, 1e-300), -1.0, 1.0))
    pts_up = ny[sgn >= 0] * np.exp(1j * ang[sgn >= 0])
    from dwshell.geometry import point_in_polygon

    inside = point_in_polygon(pts_up, upper.full_polygon())
    assert np.mean(inside) > 0.99
