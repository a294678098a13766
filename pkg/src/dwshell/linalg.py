"""Dense complex linear algebra primitives and the 3-D geometric vocabulary.

All matrices are plain square ``complex128`` numpy arrays.  Points of the
gain-lifted space C x R are ``ShellPoint`` pairs ``(z, nu)`` with ``nu`` the
squared input-output gain.  The real inner product on C x R is
``<(u, p), (v, q)> = Re(conj(u) v) + p q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Shared tolerances.  Eigen/SVD residuals are held to EIG_TOL, geometric
# membership to MEMBER_TOL and separation margins to MARGIN_TOL; double
# precision leaves headroom for accumulated projection error.
EIG_TOL = 1e-10
MEMBER_TOL = 1e-9
MARGIN_TOL = 1e-7
RANK_RTOL = 1e-10
ANGLE_TOL = 1e-9


class ShellPoint(NamedTuple):
    """One point ``(z, nu)`` of a gain-lifted set; ``nu >= 0``."""

    z: complex
    nu: float


class EigenPair(NamedTuple):
    value: float
    vector: np.ndarray


@dataclass(frozen=True)
class Hyperplane3:
    """Hyperplane in C x R given by a nonzero normal and an anchor point.

    The plane is ``{p : <normal, p - anchor> = 0}`` under the real inner
    product of C x R.
    """

    normal: tuple[complex, float]
    anchor: tuple[complex, float]

    def __post_init__(self):
        w, q = self.normal
        if not (abs(w) ** 2 + q * q) > 0.0:
            raise ValueError("hyperplane normal must be nonzero")

    def offset(self) -> float:
        """Support value ``<normal, anchor>``."""
        return ip3(self.normal, self.anchor)

    def signed_distance(self, point) -> float:
        w, q = self.normal
        scale = math.sqrt(abs(w) ** 2 + q * q)
        return (ip3(self.normal, point) - self.offset()) / scale

    @classmethod
    def vertical(cls, theta: float, d: float) -> "Hyperplane3":
        """Vertical plane with horizontal normal ``e^{i theta}`` at offset d."""
        n = complex(np.exp(1j * theta))
        return cls((n, 0.0), (d * n, 0.0))

    @classmethod
    def horizontal(cls, gamma: float) -> "Hyperplane3":
        """Horizontal plane ``nu = gamma`` (normal pointing down)."""
        return cls((0j, -1.0), (0j, float(gamma)))


@dataclass(frozen=True)
class Paraboloid:
    """Upright paraboloid ``{(z, nu) : |z|^2 = a^2 nu}`` through ``(a, 1)``.

    Stored alongside planes so cross-section requests can name either kind
    of cutting surface.
    """

    a: float

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("paraboloid parameter must be nonnegative")

    def contains(self, point, tol: float = MEMBER_TOL) -> bool:
        z, nu = point
        return abs(abs(z) ** 2 - self.a**2 * nu) <= tol


def ip3(u, v) -> float:
    """Real inner product on C x R."""
    return float(np.real(np.conj(u[0]) * v[0]) + u[1] * v[1])


def as_square_matrix(a) -> np.ndarray:
    """Validate and convert to a square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix entries must be finite")
    return m


def toeplitz_parts(a) -> tuple[np.ndarray, np.ndarray]:
    """Split ``A = H + iS`` into its Hermitian and skew parts.

    Returns ``H = (A + A*)/2`` and ``S = (A - A*)/(2i)``; both Hermitian.
    """
    m = as_square_matrix(a)
    h = (m + m.conj().T) / 2.0
    s = (m - m.conj().T) / 2j
    return h, s


def hermitian_part(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    return (m + m.conj().T) / 2.0


def hermitian_extreme_eigs(m, tol: float = EIG_TOL) -> tuple[EigenPair, EigenPair]:
    """Smallest and largest eigenpairs of a Hermitian matrix.

    Inputs with asymmetry below ``tol`` (relative) are symmetrized before
    the solve; anything worse is rejected rather than silently fixed.
    """
    mat = as_square_matrix(m)
    scale = max(1.0, float(np.linalg.norm(mat)))
    asym = float(np.linalg.norm(mat - mat.conj().T))
    if asym > tol * scale:
        raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    mat = (mat + mat.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(mat)
    lo = EigenPair(float(vals[0]), vecs[:, 0].copy())
    hi = EigenPair(float(vals[-1]), vecs[:, -1].copy())
    return lo, hi


def singular_value_extremes(a) -> tuple[float, float]:
    """``(sigma_min, sigma_max)``; the squares are extreme eigenvalues of A*A."""
    m = as_square_matrix(a)
    s = np.linalg.svd(m, compute_uv=False)
    return float(s[-1]), float(s[0])


def haar_unitary(n: int, rng) -> np.ndarray:
    """Haar-distributed random unitary via QR of a complex Ginibre matrix.

    ``rng`` is an integer seed or a ``numpy.random.Generator``; the caller
    owns the generator, so repeated calls with the same generator advance
    its stream.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    gen = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    z = (gen.normal(size=(n, n)) + 1j * gen.normal(size=(n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    # Phase-normalize the triangular factor so the distribution is Haar.
    ph = d / np.abs(d)
    return q * ph


def haar_unitaries(n: int, count: int, rng) -> np.ndarray:
    """Stack of ``count`` independent Haar unitaries, shape (count, n, n)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    gen = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    z = (gen.normal(size=(count, n, n)) + 1j * gen.normal(size=(count, n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[:, None, :]


def lift_spectrum(a) -> list[ShellPoint]:
    """Eigenvalues lifted onto the unit paraboloid: ``(lambda, |lambda|^2)``."""
    m = as_square_matrix(a)
    vals = np.linalg.eigvals(m)
    return [ShellPoint(complex(v), float(abs(v) ** 2)) for v in vals]


def numerical_range_points(a, num_angles: int) -> np.ndarray:
    """Boundary points of the numerical range by the rotation method.

    For each angle phi, the top eigenvector x of ``H(e^{-i phi} A)`` gives
    the support point ``x* A x``.  Returned in angle (counterclockwise)
    order.
    """
    m = as_square_matrix(a)
    h, s = toeplitz_parts(m)
    phis = np.linspace(0.0, 2.0 * np.pi, num_angles, endpoint=False)
    # H(e^{-i phi} A) = cos(phi) H + sin(phi) S
    stack = np.cos(phis)[:, None, None] * h + np.sin(phis)[:, None, None] * s
    _, vecs = np.linalg.eigh(stack)
    x = vecs[:, :, -1]
    return np.einsum("ki,ij,kj->k", x.conj(), m, x)
