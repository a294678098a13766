"""Davis-Wielandt shell boundaries, the inversion map, and inverse sets.

The shell of a square matrix A is ``{(x* A x, ||Ax||^2) : ||x|| = 1}``, a
compact subset of C x R sitting inside the epigraph of the unit
paraboloid ``|z|^2 <= nu``.  Boundary points are support points: for a
unit direction ``d = (z_d, nu_d)`` the farthest shell point in direction d
comes from the top eigenvector of ``H(conj(z_d) A) + nu_d A* A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BoundaryCurve2D, convex_hull_2d
from .linalg import (
    MEMBER_TOL,
    RANK_RTOL,
    ShellPoint,
    as_square_matrix,
    hermitian_part,
    lift_spectrum,
    numerical_range_points,
    singular_value_extremes,
    toeplitz_parts,
)

DEFAULT_NU_CAP = 1e6

NONSINGULAR = "nonsingular"
NORMAL_ZERO = "normal_zero"
NONNORMAL_ZERO = "nonnormal_zero"


@dataclass
class ShellBoundary:
    """Support points of a DW shell with the directions that produced them."""

    zs: np.ndarray
    nus: np.ndarray
    directions: np.ndarray  # (N, 3) unit rows (Re z_d, Im z_d, nu_d)
    matrix_dim: int

    @property
    def points(self) -> list[ShellPoint]:
        return [ShellPoint(complex(z), float(nu)) for z, nu in zip(self.zs, self.nus)]

    def support_values(self) -> np.ndarray:
        return (
            self.directions[:, 0] * self.zs.real
            + self.directions[:, 1] * self.zs.imag
            + self.directions[:, 2] * self.nus
        )


@dataclass
class InverseShellBoundary:
    """Image of a shell boundary under the inversion map, possibly truncated.

    ``truncated`` is set when source points at (or mapping beyond) the cap
    were discarded, which happens exactly when the source matrix is
    singular at the default cap.
    """

    zs: np.ndarray
    nus: np.ndarray
    nu_cap: float
    truncated: bool
    support_directions: np.ndarray = field(default=None, repr=False)

    @property
    def points(self) -> list[ShellPoint]:
        return [ShellPoint(complex(z), float(nu)) for z, nu in zip(self.zs, self.nus)]


@dataclass(frozen=True)
class GainInterval:
    """Closed interval of squared gains; ``hi`` may be infinite."""

    lo: float
    hi: float
    empty: bool = False

    def __post_init__(self):
        if not self.empty and self.lo > self.hi:
            raise ValueError("gain interval requires lo <= hi")

    @classmethod
    def empty_interval(cls) -> "GainInterval":
        return cls(math.inf, math.inf, empty=True)


def fibonacci_sphere(n: int) -> np.ndarray:
    """Quasi-uniform unit directions on S^2 (golden-angle spiral)."""
    i = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def default_directions(a: np.ndarray, n: int) -> np.ndarray:
    """Fibonacci grid plus the poles and the spectral touching directions.

    The shell touches the unit paraboloid exactly at the lifted
    eigenvalues; the direction ``(2 lambda, -1)`` exposes that contact
    point, so including it makes spectrum-containment checks exact.
    """
    if n < 8:
        raise ValueError("resolution must be at least 8")
    dirs = [fibonacci_sphere(n), np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])]
    eigs = np.linalg.eigvals(a)
    spectral = np.column_stack([2.0 * eigs.real, 2.0 * eigs.imag, -np.ones(eigs.size)])
    dirs.append(spectral / np.linalg.norm(spectral, axis=1, keepdims=True))
    return np.vstack(dirs)


def _support_batch(a: np.ndarray, directions: np.ndarray):
    """Support points for a stack of unit directions (batched eigh)."""
    h, s = toeplitz_parts(a)
    gram = a.conj().T @ a
    zr = directions[:, 0][:, None, None]
    zi = directions[:, 1][:, None, None]
    nu = directions[:, 2][:, None, None]
    # H(conj(z_d) A) = Re(z_d) H(A) + Im(z_d) S(A)
    stack = zr * h + zi * s + nu * gram
    vals, vecs = np.linalg.eigh(stack)
    x = vecs[:, :, -1]
    zs = np.einsum("ki,ij,kj->k", x.conj(), a, x)
    ax = np.einsum("ij,kj->ki", a, x)
    nus = np.einsum("ki,ki->k", ax.conj(), ax).real
    return zs, nus, vals[:, -1].real, x


def dw_support_point(a, direction) -> tuple[ShellPoint, float]:
    """Farthest shell point in a unit direction of C x R.

    Returns the point and the support value, which equals the largest
    eigenvalue of the direction-dependent Hermitian matrix.  For 2x2
    matrices the point is extreme over the convex hull of the shell
    surface.
    """
    m = as_square_matrix(a)
    d = np.asarray(direction, dtype=float).ravel()
    if d.shape != (3,):
        raise ValueError("direction must be a 3-vector (Re z, Im z, nu)")
    if abs(np.linalg.norm(d) - 1.0) > 1e-9:
        raise ValueError("direction must be unit-norm")
    zs, nus, vals, _ = _support_batch(m, d[None, :])
    return ShellPoint(complex(zs[0]), float(nus[0])), float(vals[0])


def dw_boundary(a, n: int = 400, directions: np.ndarray | None = None) -> ShellBoundary:
    """Shell support points over a quasi-uniform direction grid.

    An explicit ``directions`` array (unit rows) overrides the default
    grid; covariance checks use this to compare matched parametrizations.
    """
    m = as_square_matrix(a)
    dirs = default_directions(m, n) if directions is None else np.asarray(directions, float)
    zs, nus, _, _ = _support_batch(m, dirs)
    nus = np.maximum(nus, 0.0)
    return ShellBoundary(zs=zs, nus=nus, directions=dirs, matrix_dim=m.shape[0])


def f_inv_map(p: ShellPoint) -> ShellPoint:
    """Inversion ``(z, nu) -> (conj(z)/nu, 1/nu)``; undefined at nu = 0."""
    if p.nu <= 0.0:
        raise ValueError("inversion requires nu > 0 (the image is at infinity)")
    return ShellPoint(np.conj(p.z) / p.nu, 1.0 / p.nu)


def f_inv_arrays(zs: np.ndarray, nus: np.ndarray):
    return np.conj(zs) / nus, 1.0 / nus


def inverse_dw_boundary(a, n: int = 400, nu_cap: float = DEFAULT_NU_CAP,
                        directions: np.ndarray | None = None) -> InverseShellBoundary:
    """Inversion image of the shell boundary, truncated above ``nu_cap``.

    Support planes map to support planes under the inversion: a source
    direction ``(w, q)`` with support value c becomes the image direction
    ``(conj(w), -c)`` (normalized), which is recorded per retained point.
    """
    if nu_cap <= 0:
        raise ValueError("nu_cap must be positive")
    bnd = dw_boundary(a, n=n, directions=directions)
    sup = bnd.support_values()
    tiny = 1.0 / nu_cap
    keep = bnd.nus > tiny
    truncated = bool(np.any(~keep))
    zs, nus = f_inv_arrays(bnd.zs[keep], bnd.nus[keep])
    image_dirs = np.column_stack([
        bnd.directions[keep, 0],
        -bnd.directions[keep, 1],
        -sup[keep],
    ])
    norms = np.linalg.norm(image_dirs, axis=1, keepdims=True)
    image_dirs = image_dirs / np.where(norms > 0, norms, 1.0)
    return InverseShellBoundary(zs=zs, nus=nus, nu_cap=float(nu_cap),
                                truncated=truncated, support_directions=image_dirs)


def inverse_gain_interval(a) -> GainInterval:
    """Squared-gain interval of the inverse shell.

    ``[1/s_max^2, 1/s_min^2]`` for nonsingular A, ``[1/s_max^2, inf)`` for
    singular A with nonzero norm, and empty for the zero matrix.
    """
    m = as_square_matrix(a)
    smin, smax = singular_value_extremes(m)
    if smax <= 0.0:
        return GainInterval.empty_interval()
    if smin <= RANK_RTOL * smax:
        return GainInterval(1.0 / smax**2, math.inf)
    return GainInterval(1.0 / smax**2, 1.0 / smin**2)


def zero_eigen_normality(a, rtol: float = RANK_RTOL) -> str:
    """Classify the zero eigenvalue of A.

    ``nonsingular`` when the smallest singular value clears the
    scale-relative rank tolerance; otherwise ``normal_zero`` when the
    kernel of A is orthogonal to its range (every kernel vector x also
    satisfies A* x = 0), else ``nonnormal_zero``.
    """
    m = as_square_matrix(a)
    u, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    if smax > 0 and s[-1] > rtol * smax:
        return NONSINGULAR
    scale = max(smax, 1.0)
    kernel = vh[s <= rtol * smax].conj().T if smax > 0 else vh.conj().T
    if kernel.shape[1] == 0:
        return NONSINGULAR
    resid = np.linalg.norm(m.conj().T @ kernel, axis=0)
    return NORMAL_ZERO if np.all(resid <= 1e-8 * scale) else NONNORMAL_ZERO


def range_isometry(a, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of range(A) as columns (rank-revealing SVD)."""
    m = as_square_matrix(a)
    u, s, _ = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    return u[:, s > rtol * smax]


def inverse_numerical_range(a, n: int = 64) -> BoundaryCurve2D | None:
    """Boundary of the vertical projection of the inverse shell.

    Returns ``None`` (the whole-plane marker) when 0 is a non-normal
    eigenvalue of A.  Otherwise the set equals the numerical range of the
    pseudoinverse compressed to range(A) by an isometry U, i.e. W(U* A+ U),
    which reduces to W(A^-1) for nonsingular A.
    """
    if n < 16:
        raise ValueError("resolution must be at least 16")
    m = as_square_matrix(a)
    kind = zero_eigen_normality(m)
    if kind == NONNORMAL_ZERO:
        return None
    u = range_isometry(m)
    if u.shape[1] == 0:  # zero matrix: empty inverse range
        return BoundaryCurve2D(np.array([], dtype=complex), closed=True)
    comp = u.conj().T @ np.linalg.pinv(m) @ u
    pts = numerical_range_points(comp, n)
    return BoundaryCurve2D(convex_hull_2d(pts), closed=True)


def shell_samples(a, x: np.ndarray):
    """Shell points generated by the unit columns of x (oracle helper)."""
    m = as_square_matrix(a)
    x = x / np.linalg.norm(x, axis=0, keepdims=True)
    ax = m @ x
    zs = np.einsum("ik,ik->k", x.conj(), ax)
    nus = np.einsum("ik,ik->k", ax.conj(), ax).real
    return zs, nus


def epigraph_violation(zs, nus) -> float:
    """Largest amount by which points poke below the unit paraboloid."""
    return float(np.max(np.abs(np.asarray(zs)) ** 2 - np.asarray(nus), initial=0.0))
