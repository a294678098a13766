import math

import numpy as np
import pytest

from dwshell import linalg, shell
from dwshell.geometry import hull_margins, shellpoints_to_xyz

from conftest import random_complex
from oracles import shell_points_of, unit_vectors_2d


def rotate_directions(dirs, alpha):
    c, s = math.cos(alpha), math.sin(alpha)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return dirs @ rot.T


def test_support_point_identity():
    p, val = shell.dw_support_point(np.eye(2), (1.0, 0.0, 0.0))
    assert abs(p.z - 1) < 1e-12 and abs(p.nu - 1) < 1e-12
    assert val == pytest.approx(1.0)


def test_support_point_diag_vertical():
    p, val = shell.dw_support_point(np.diag([1.0, 2.0]), (0.0, 0.0, 1.0))
    assert abs(p.z - 2) < 1e-12 and abs(p.nu - 4) < 1e-12
    assert val == pytest.approx(4.0)


def test_support_point_nilpotent(nilpotent):
    p, val = shell.dw_support_point(nilpotent, (0.0, 0.0, 1.0))
    assert abs(p.z) < 1e-12 and p.nu == pytest.approx(1.0)
    assert val == pytest.approx(1.0)


def test_support_point_rejects_bad_direction():
    with pytest.raises(ValueError):
        shell.dw_support_point(np.eye(2), (1.0, 1.0, 0.0))


def test_boundary_scalar():
    b = shell.dw_boundary(np.array([[3.0]]), 64)
    assert np.allclose(b.zs, 3.0) and np.allclose(b.nus, 9.0)


def test_boundary_normal_segment():
    # a normal matrix's shell is the hull of its lifted spectrum; here a
    # 3-D segment between (-i, 1) and (1, 1)
    a = np.diag([-1j, 1.0])
    b = shell.dw_boundary(a, 200)
    assert np.allclose(b.nus, 1.0, atol=1e-9)
    t = (b.zs.real + b.zs.imag + 1.0) / 2.0  # affine coordinate on the segment
    seg = (1 - t) * (-1j) + t * 1.0
    assert np.max(np.abs(b.zs - seg)) < 1e-7


def test_boundary_nilpotent_sphere(nilpotent):
    b = shell.dw_boundary(nilpotent, 500)
    resid = np.abs(np.abs(b.zs) ** 2 + (b.nus - 0.5) ** 2 - 0.25)
    assert np.max(resid) < 1e-9


def test_boundary_in_epigraph(rng):
    for n in (1, 2, 4, 6):
        a = random_complex(rng, n, scale=2.0)
        b = shell.dw_boundary(a, 200)
        assert shell.epigraph_violation(b.zs, b.nus) < 1e-9


def test_support_inequality(rng):
    a = random_complex(rng, 3)
    b = shell.dw_boundary(a, 100)
    pts = shellpoints_to_xyz(b.zs, b.nus)
    vals = b.support_values()
    # every stored point is extreme in its own direction
    assert np.max(pts @ b.directions.T - vals[None, :]) < 1e-8


def test_rotation_covariance(rng):
    a = random_complex(rng, 4)
    alpha = rng.uniform(0, 2 * math.pi)
    b = shell.dw_boundary(a, 300)
    rotated = shell.dw_boundary(np.exp(1j * alpha) * a,
                                directions=rotate_directions(b.directions, alpha))
    assert np.max(np.abs(rotated.zs - np.exp(1j * alpha) * b.zs)) < 1e-8
    assert np.max(np.abs(rotated.nus - b.nus)) < 1e-8


def test_paraboloidal_scaling(rng):
    a = random_complex(rng, 3)
    gamma = 1.7
    b = shell.dw_boundary(a, 300)
    dirs = b.directions.copy()
    dirs[:, 0] /= gamma
    dirs[:, 1] /= gamma
    dirs[:, 2] /= gamma**2
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    scaled = shell.dw_boundary(gamma * a, directions=dirs)
    assert np.max(np.abs(scaled.zs - gamma * b.zs)) < 1e-8
    assert np.max(np.abs(scaled.nus - gamma**2 * b.nus)) < 1e-7


def test_transpose_and_adjoint(rng):
    a = random_complex(rng, 4)
    b = shell.dw_boundary(a, 300)
    bt = shell.dw_boundary(a.T, directions=b.directions)
    assert np.max(np.abs(bt.zs - b.zs)) < 1e-7
    assert np.max(np.abs(bt.nus - b.nus)) < 1e-7
    refl = b.directions.copy()
    refl[:, 1] *= -1.0
    badj = shell.dw_boundary(a.conj().T, directions=refl)
    assert np.max(np.abs(badj.zs - np.conj(b.zs))) < 1e-7
    assert np.max(np.abs(badj.nus - b.nus)) < 1e-7


def test_unitary_similarity(rng):
    a = random_complex(rng, 4)
    u = linalg.haar_unitary(4, rng)
    b = shell.dw_boundary(a, 300)
    bu = shell.dw_boundary(u.conj().T @ a @ u, directions=b.directions)
    assert np.max(np.abs(bu.zs - b.zs)) < 1e-8
    assert np.max(np.abs(bu.nus - b.nus)) < 1e-7


def test_spectrum_lift_inside_hull(rng):
    a = random_complex(rng, 4)
    b = shell.dw_boundary(a, 400)
    pts = shellpoints_to_xyz(b.zs, b.nus)
    lifts = linalg.lift_spectrum(a)
    probes = shellpoints_to_xyz([p.z for p in lifts], [p.nu for p in lifts])
    assert np.max(hull_margins(pts, probes)) < 1e-7


def test_normal_matrix_hull(rng):
    d = np.diag(rng.normal(size=4) + 1j * rng.normal(size=4))
    u = linalg.haar_unitary(4, rng)
    a = u.conj().T @ d @ u
    b = shell.dw_boundary(a, 400)
    lifts = linalg.lift_spectrum(a)
    lift_xyz = shellpoints_to_xyz([p.z for p in lifts], [p.nu for p in lifts])
    shell_xyz = shellpoints_to_xyz(b.zs, b.nus)
    # all support points live in the hull of the lifted spectrum...
    assert np.max(hull_margins(lift_xyz, shell_xyz)) < 1e-6
    # ...and every lift is hit exactly by its touching direction
    d2 = np.min(np.linalg.norm(shell_xyz[None] - lift_xyz[:, None], axis=2), axis=1)
    assert np.max(d2) < 1e-6


def test_f_inv_examples():
    assert shell.f_inv_map(linalg.ShellPoint(1.0, 1.0)) == linalg.ShellPoint(1.0, 1.0)
    p = shell.f_inv_map(linalg.ShellPoint(1j, 2.0))
    assert p.z == pytest.approx(-0.5j) and p.nu == pytest.approx(0.5)
    with pytest.raises(ValueError):
        shell.f_inv_map(linalg.ShellPoint(0.0, 0.0))


def test_f_inv_involution(rng):
    zs = rng.normal(size=100) + 1j * rng.normal(size=100)
    nus = np.abs(zs) ** 2 + rng.uniform(0.01, 2.0, size=100)
    z2, nu2 = shell.f_inv_arrays(*shell.f_inv_arrays(zs, nus))
    assert np.max(np.abs(z2 - zs)) < 1e-12
    assert np.max(np.abs(nu2 - nus)) < 1e-12


def test_inverse_boundary_scalar():
    inv = shell.inverse_dw_boundary(np.array([[2.0]]), 64)
    assert np.allclose(inv.zs, 0.5) and np.allclose(inv.nus, 0.25)
    assert not inv.truncated


def test_inverse_matches_shell_of_inverse(rng):
    a = np.diag([1.0, 2.0])
    inv = shell.inverse_dw_boundary(a, 200)
    direct = shell.dw_boundary(np.diag([1.0, 0.5]), directions=inv.support_directions)
    assert np.max(np.abs(inv.zs - direct.zs)) < 1e-9
    assert np.max(np.abs(inv.nus - direct.nus)) < 1e-9
    b = random_complex(rng, 3) + 2 * np.eye(3)
    invb = shell.inverse_dw_boundary(b, 300)
    directb = shell.dw_boundary(np.linalg.inv(b), directions=invb.support_directions)
    assert np.max(np.abs(invb.zs - directb.zs)) < 1e-8
    assert np.max(np.abs(invb.nus - directb.nus)) < 1e-8


def test_inverse_boundary_nilpotent_truncates(nilpotent):
    inv = shell.inverse_dw_boundary(nilpotent, 400, nu_cap=10.0)
    assert inv.truncated
    # the image is the boundary of a shifted epigraph resting on (0, 1)
    assert np.min(inv.nus - (np.abs(inv.zs) ** 2 + 1.0)) > -1e-6


def test_inverse_gain_interval_cases(nilpotent):
    gi = shell.inverse_gain_interval(np.diag([1.0, 2.0]))
    assert gi.lo == pytest.approx(0.25) and gi.hi == pytest.approx(1.0)
    gi_n = shell.inverse_gain_interval(nilpotent)
    assert gi_n.lo == pytest.approx(1.0) and math.isinf(gi_n.hi)
    assert shell.inverse_gain_interval(np.zeros((2, 2))).empty


def test_zero_eigen_normality(nilpotent):
    assert shell.zero_eigen_normality(np.eye(3)) == shell.NONSINGULAR
    assert shell.zero_eigen_normality(np.diag([1.0, 0.0])) == shell.NORMAL_ZERO
    assert shell.zero_eigen_normality(nilpotent) == shell.NONNORMAL_ZERO


def test_inverse_numerical_range_cases(nilpotent):
    crv = shell.inverse_numerical_range(np.diag([2.0, 4.0]), 64)
    vals = crv.vertices
    assert np.max(np.abs(vals.imag)) < 1e-9
    assert vals.real.min() == pytest.approx(0.25, abs=1e-9)
    assert vals.real.max() == pytest.approx(0.5, abs=1e-9)
    assert shell.inverse_numerical_range(nilpotent) is None
    single = shell.inverse_numerical_range(np.diag([1.0, 0.0]), 64)
    assert np.max(np.abs(single.vertices - 1.0)) < 1e-9


def test_inverse_numerical_range_equals_range_of_inverse(rng):
    a = random_complex(rng, 3) + 1.5 * np.eye(3)
    crv = shell.inverse_numerical_range(a, 256)
    gen = np.random.default_rng(5)
    xs = gen.normal(size=(3, 4000)) + 1j * gen.normal(size=(3, 4000))
    xs /= np.linalg.norm(xs, axis=0, keepdims=True)
    z, nu = shell_points_of(a, xs)
    inv_samples = np.conj(z) / nu
    # sampled inverse range sits inside the computed convex boundary
    from dwshell.geometry import point_in_polygon

    inside = point_in_polygon(inv_samples, crv.vertices)
    assert np.mean(inside) > 0.999
    # and the boundary supports match the range of the inverse matrix
    ainv = np.linalg.inv(a)
    for phi in np.linspace(0, 2 * math.pi, 17):
        supp_curve = float(np.max(np.real(np.exp(-1j * phi) * crv.vertices)))
        herm = (np.exp(-1j * phi) * ainv + np.exp(1j * phi) * ainv.conj().T) / 2
        supp_true = float(np.linalg.eigvalsh(herm)[-1])
        assert supp_curve <= supp_true + 1e-9
        assert supp_curve >= supp_true - 1e-3  # inner polygon, modest resolution
