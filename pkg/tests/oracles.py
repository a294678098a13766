"""Independent brute-force oracles used to freeze expected test values.

These stay deliberately dumb: dense parameter sweeps and rejection
sampling, never the production code paths they are meant to check.
"""

import numpy as np


def unit_vectors_2d(n_t=181, n_phi=181):
    """Grid of unit vectors (cos t, sin t e^{i phi}) covering C^2 shells."""
    ts = np.linspace(0.0, np.pi / 2, n_t)
    phis = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    t, p = np.meshgrid(ts, phis, indexing="ij")
    x = np.stack([np.cos(t).ravel(), (np.sin(t) * np.exp(1j * p)).ravel()])
    return x


def random_unit_vectors(n, count, seed=0):
    gen = np.random.default_rng(seed)
    x = gen.normal(size=(n, count)) + 1j * gen.normal(size=(n, count))
    return x / np.linalg.norm(x, axis=0, keepdims=True)


def shell_points_of(a, x):
    """(z, nu) pairs generated by unit columns of x."""
    a = np.asarray(a, dtype=complex)
    ax = a @ x
    z = np.einsum("ik,ik->k", x.conj(), ax)
    nu = np.einsum("ik,ik->k", ax.conj(), ax).real
    return z, nu


def brute_slice_max(a, theta, k, band=5e-4, n_t=400, n_phi=400):
    """Brute-force slice maximum of ||Ax||^2 near x*H(e^{-i th}A)x = k (2x2)."""
    a = np.asarray(a, dtype=complex)
    x = unit_vectors_2d(n_t, n_phi)
    m = (np.exp(-1j * theta) * a + np.exp(1j * theta) * a.conj().T) / 2.0
    z, nu = shell_points_of(a, x)
    c = np.einsum("ik,ij,jk->k", x.conj(), m, x).real
    sel = np.abs(c - k) < band
    return float(np.max(nu[sel])) if np.any(sel) else np.nan


def srg_points(a, x):
    """Scaled-relative-graph sample points (upper-half representatives)."""
    a = np.asarray(a, dtype=complex)
    ax = a @ x
    ip = np.einsum("ik,ik->k", x.conj(), ax)
    ny = np.linalg.norm(ax, axis=0)
    nx = np.linalg.norm(x, axis=0)
    ok = ny > 1e-14
    cosang = np.clip(ip.real[ok] / (nx[ok] * ny[ok]), -1.0, 1.0)
    return (ny[ok] / nx[ok]) * np.exp(1j * np.arccos(cosang))


def haar_moment_abs_u11_sq(n, draws, seed=0):
    """Monte-Carlo E|U_11|^2 for Haar unitaries (exact value: 1/n)."""
    from dwshell.linalg import haar_unitaries

    us = haar_unitaries(n, draws, seed)
    return float(np.mean(np.abs(us[:, 0, 0]) ** 2))
