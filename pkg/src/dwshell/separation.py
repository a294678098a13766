"""Nonsingularity certificates for ``I + A U* B U`` over the unitary orbit.

The master test separates the inverse shell of A from the shell of -B.  A
scalar rotation parameter reduces it to planar convex separations of side
projections, and coarser gain/phase conditions follow by covering those
sets with discs and cones.  Verdict semantics: ``separated`` certifies
nonsingularity for every unitary; ``intersecting`` means the condition's
own sets meet (for the shell-level tests this certifies a singularizing
unitary exists); ``undecided`` is reserved for truncation- or
resolution-limited outcomes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import graphs, shell, tomography
from .geometry import (
    convex_hull_2d,
    hull_margins,
    point_in_polygon,
    polygon_diameter,
    polygon_pair_distance,
    polygons_intersect,
    shellpoints_to_xyz,
)
from .graphs import UndefinedPhaseError
from .linalg import MARGIN_TOL, ShellPoint, as_square_matrix, haar_unitaries, singular_value_extremes

SMALL_GAIN = "small_gain"
LARGE_GAIN = "large_gain"
NUMERICAL_RANGE = "numerical_range"
SECTORIAL_PHASE = "sectorial_phase"
SRG_STANDARD = "srg_standard"
NNR = "nnr"
SINGULAR_ANGLE_SMALL = "singular_angle_small"
SINGULAR_ANGLE_LARGE = "singular_angle_large"
SEGMENTAL_PHASE = "segmental_phase"
THETA_SRG_PHASE = "theta_srg_phase"
THETA_SRG_SEPARATION = "theta_srg_separation"
DW_SEPARATION = "dw_separation"

ALL_CONDITIONS = (
    SMALL_GAIN, LARGE_GAIN, NUMERICAL_RANGE, SECTORIAL_PHASE, SRG_STANDARD,
    NNR, SINGULAR_ANGLE_SMALL, SINGULAR_ANGLE_LARGE, SEGMENTAL_PHASE,
    THETA_SRG_PHASE, THETA_SRG_SEPARATION, DW_SEPARATION,
)

SEPARATED = "separated"
INTERSECTING = "intersecting"
UNDECIDED = "undecided"

DEFAULT_THETA_GRID = 181


@dataclass
class SeparationVerdict:
    status: str
    condition_id: str
    margin: float = math.nan
    witness_theta: float | None = None
    witness_point: ShellPoint | None = None
    reason: str = ""

    @property
    def separated(self) -> bool:
        return self.status == SEPARATED


class ImplicationViolation(AssertionError):
    """A logged implication between conditions failed on a concrete pair."""


# ---------------------------------------------------------------------------
# side-projection machinery


def _side_polygon(mat, theta: float, n_phi: int = 96) -> np.ndarray:
    """Convex boundary of {(Re(e^{-i theta} z), nu)} over the shell of mat."""
    return tomography.vnumran_polygon(mat, theta, n_phi)


def _inverse_side_polygon(a, theta: float, n_phi: int = 96, n_dirs: int = 400,
                          nu_cap: float = shell.DEFAULT_NU_CAP):
    """Side projection of the inverse shell: (polygon, exact, truncated)."""
    m = as_square_matrix(a)
    if shell.zero_eigen_normality(m) == shell.NONSINGULAR:
        inv = np.linalg.inv(m)
        return _side_polygon(inv, theta, n_phi), True, False
    bnd = shell.inverse_dw_boundary(m, n=n_dirs, nu_cap=nu_cap)
    if bnd.zs.size == 0:
        return np.array([], dtype=complex), True, bnd.truncated
    pts = (bnd.zs * np.exp(-1j * theta)).real + 1j * bnd.nus
    return convex_hull_2d(pts), False, bnd.truncated


def _polygon_witness(p, q, theta):
    """Representative common point of two intersecting side polygons."""
    for src, dst in ((p, q), (q, p)):
        if dst.size >= 3:
            inside = point_in_polygon(src, dst)
            if np.any(inside):
                w = src[np.argmax(inside)]
                return ShellPoint(complex(np.exp(1j * theta) * w.real), float(w.imag))
    w = p[0]
    return ShellPoint(complex(np.exp(1j * theta) * w.real), float(w.imag))


def theta_srg_separation(a, b, theta: float, n: int = 96) -> SeparationVerdict:
    """Disjointness of the inverse rotated SRG of A and the SRG of -B.

    Tested on the equivalent convex side projections, which carry exactly
    the same information.  Singular A yields a truncation-limited verdict
    unless the companion set stays safely below the truncation level.
    """
    a = as_square_matrix(a)
    b = as_square_matrix(b)
    poly_b = _side_polygon(-b, theta, n)
    poly_a, exact, truncated = _inverse_side_polygon(a, theta, n)
    if poly_a.size == 0:  # zero matrix: empty inverse shell
        return SeparationVerdict(SEPARATED, THETA_SRG_SEPARATION, margin=math.inf,
                                 witness_theta=theta, reason="inverse shell empty")
    dist = polygon_pair_distance(poly_a, poly_b)
    scale = max(polygon_diameter(poly_a), polygon_diameter(poly_b), 1.0)
    if dist == 0.0:
        return SeparationVerdict(INTERSECTING, THETA_SRG_SEPARATION, margin=0.0,
                                 witness_theta=theta,
                                 witness_point=_polygon_witness(poly_a, poly_b, theta))
    if dist <= 1e-9 * scale:
        return SeparationVerdict(UNDECIDED, THETA_SRG_SEPARATION, margin=dist,
                                 witness_theta=theta, reason="resolution-limited margin")
    if not exact:
        cap_needed = 4.0 * (float(np.max(poly_b.imag)) + 1.0)
        if truncated and shell.DEFAULT_NU_CAP < cap_needed:
            return SeparationVerdict(UNDECIDED, THETA_SRG_SEPARATION, margin=dist,
                                     witness_theta=theta,
                                     reason="truncated inverse shell reaches the companion set")
        return SeparationVerdict(SEPARATED, THETA_SRG_SEPARATION, margin=dist,
                                 witness_theta=theta,
                                 reason="sampled inverse shell (singular input)")
    return SeparationVerdict(SEPARATED, THETA_SRG_SEPARATION, margin=dist, witness_theta=theta)


def theta_srg_separation_polygons(a, b, theta: float, n: int = 256) -> bool:
    """Cross-check: direct polygon disjointness of the nonconvex graphs.

    Pointwise inversion of the mirrored-axis SRG of A gives its inverse
    graph; only meaningful for nonsingular A.
    """
    curve_a = tomography.plot_theta_srg(a, -theta, n)
    pts = curve_a.full_polygon()
    inv_pts = 1.0 / pts[np.abs(pts) > 1e-12]
    curve_b = tomography.plot_theta_srg(-np.asarray(b, dtype=complex), theta, n)
    return not polygons_intersect(inv_pts, curve_b.full_polygon())


def _theta_margins(a, b, thetas, n_phi: int = 64):
    """Side-projection separation margins over a grid of rotation angles."""
    margins = np.empty(len(thetas))
    for i, th in enumerate(thetas):
        pa, _, _ = _inverse_side_polygon(a, th, n_phi)
        pb = _side_polygon(-np.asarray(b, dtype=complex), th, n_phi)
        margins[i] = polygon_pair_distance(pa, pb) if pa.size else math.inf
    return margins


def dw_separation(a, b, theta_grid_size: int = DEFAULT_THETA_GRID,
                  n: int = 96) -> SeparationVerdict:
    """Master shell-separation test with a scan over the rotation angle.

    Separation of the inverse shell of A from the shell of -B is
    equivalent to separation of the side projections at some angle in
    [-pi/2, pi/2); the scan plus golden refinement finds a certifying
    angle or, failing that, looks for a 3-D membership witness.
    """
    if theta_grid_size < 3:
        raise ValueError("need at least 3 grid angles")
    a = as_square_matrix(a)
    b = as_square_matrix(b)
    if not np.any(np.abs(a) > 0):
        return SeparationVerdict(SEPARATED, DW_SEPARATION, margin=math.inf,
                                 reason="inverse shell of the zero matrix is empty")
    thetas = np.linspace(-math.pi / 2, math.pi / 2, theta_grid_size, endpoint=False)
    margins = _theta_margins(a, b, thetas, n_phi=48)
    best = int(np.argmax(margins))
    span = math.pi / theta_grid_size
    lo, hi = thetas[best] - span, thetas[best] + span
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - phi * (hi - lo), lo + phi * (hi - lo)
    fc = -_theta_margins(a, b, [c], n)[0]
    fd = -_theta_margins(a, b, [d], n)[0]
    for _ in range(20):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - phi * (hi - lo)
            fc = -_theta_margins(a, b, [c], n)[0]
        else:
            lo, c, fc = c, d, fd
            d = lo + phi * (hi - lo)
            fd = -_theta_margins(a, b, [d], n)[0]
    theta_star = 0.5 * (lo + hi)
    verdict = theta_srg_separation(a, b, theta_star, n)
    if verdict.separated:
        return SeparationVerdict(SEPARATED, DW_SEPARATION, margin=verdict.margin,
                                 witness_theta=theta_star, reason=verdict.reason)

    # no separating angle: look for a common 3-D point via hull membership
    bnd_b = shell.dw_boundary(-b, n=400)
    pts_b = shellpoints_to_xyz(bnd_b.zs, bnd_b.nus)
    inv_a = shell.inverse_dw_boundary(a, n=400)
    if inv_a.zs.size:
        pts_a = shellpoints_to_xyz(inv_a.zs, inv_a.nus)
        scale = max(1.0, float(np.max(np.abs(pts_a))), float(np.max(np.abs(pts_b))))
        m_a_in_b = hull_margins(pts_b, pts_a)
        j = int(np.argmin(m_a_in_b))
        if m_a_in_b[j] <= 1e-7 * scale:
            wit = ShellPoint(complex(inv_a.zs[j]), float(inv_a.nus[j]))
            return SeparationVerdict(INTERSECTING, DW_SEPARATION, margin=float(m_a_in_b[j]),
                                     witness_point=wit, witness_theta=theta_star)
        m_b_in_a = hull_margins(pts_a, pts_b)
        j = int(np.argmin(m_b_in_a))
        if m_b_in_a[j] <= 1e-7 * scale:
            wit = ShellPoint(complex(bnd_b.zs[j]), float(bnd_b.nus[j]))
            return SeparationVerdict(INTERSECTING, DW_SEPARATION, margin=float(m_b_in_a[j]),
                                     witness_point=wit, witness_theta=theta_star)
    return SeparationVerdict(UNDECIDED, DW_SEPARATION, margin=verdict.margin,
                             witness_theta=theta_star,
                             reason="no separating angle found and no membership witness")


# ---------------------------------------------------------------------------
# phase machinery


def srg_phase_condition(a, b, theta: float, n: int = graphs.PHASE_RESOLUTION) -> SeparationVerdict:
    """Opposite-centric rotated-SRG phase test at one angle.

    Certifies when the lower deviations sum beyond pi (large branch) or
    the upper deviations stay under pi (small branch).
    """
    try:
        pa = graphs.theta_srg_phases(a, -theta, n)
        pb = graphs.theta_srg_phases(b, theta, n)
    except UndefinedPhaseError as exc:
        return SeparationVerdict(UNDECIDED, THETA_SRG_PHASE, witness_theta=theta,
                                 reason=f"undefined phases: {exc}")
    lo_sum = pa.lo + pb.lo
    hi_sum = pa.hi + pb.hi
    if lo_sum > math.pi:
        return SeparationVerdict(SEPARATED, THETA_SRG_PHASE, margin=lo_sum - math.pi,
                                 witness_theta=theta, reason="large branch")
    if hi_sum < math.pi:
        return SeparationVerdict(SEPARATED, THETA_SRG_PHASE, margin=math.pi - hi_sum,
                                 witness_theta=theta, reason="small branch")
    return SeparationVerdict(INTERSECTING, THETA_SRG_PHASE,
                             margin=-min(lo_sum - math.pi if lo_sum > math.pi else math.inf,
                                         math.pi - hi_sum if hi_sum < math.pi else math.inf,
                                         math.pi - lo_sum, hi_sum - math.pi),
                             witness_theta=theta, reason="both branches fail")


def _phase_condition_scan(a, b, step_deg: float = 1.0, n_phi: int = 96):
    """(theta, margin, branch) of the best phase verdict over a grid."""
    thetas = np.arange(-90.0, 90.0, step_deg) * math.pi / 180.0
    try:
        lo_a, hi_a = graphs.theta_srg_phase_profile(a, -thetas, n_phi)
        lo_b, hi_b = graphs.theta_srg_phase_profile(b, thetas, n_phi)
    except UndefinedPhaseError:
        return None
    large = (lo_a + lo_b) - math.pi
    small = math.pi - (hi_a + hi_b)
    margin = np.maximum(large, small)
    j = int(np.argmax(margin))
    branch = "large branch" if large[j] >= small[j] else "small branch"
    return float(thetas[j]), float(margin[j]), branch


def theta_srg_phase_condition(a, b, step_deg: float = 1.0) -> SeparationVerdict:
    """Existence version of the phase test over the half-period of angles."""
    scan = _phase_condition_scan(a, b, step_deg)
    if scan is None:
        return SeparationVerdict(UNDECIDED, THETA_SRG_PHASE, reason="undefined phases")
    theta, margin, branch = scan
    if margin > 0:
        fine = srg_phase_condition(a, b, theta)
        if fine.separated:
            return SeparationVerdict(SEPARATED, THETA_SRG_PHASE, margin=fine.margin,
                                     witness_theta=theta, reason=fine.reason)
    return SeparationVerdict(INTERSECTING, THETA_SRG_PHASE, margin=margin,
                             witness_theta=theta, reason="no certifying angle on the grid")


def eigen_cone_bound(a, b, theta: float, n: int = graphs.PHASE_RESOLUTION):
    """Argument cone for the nonzero spectrum of AB implied by phase margins.

    Returns (lo, hi) in radians, or None when neither phase branch fires.
    """
    try:
        pa = graphs.theta_srg_phases(a, -theta, n)
        pb = graphs.theta_srg_phases(b, theta, n)
    except UndefinedPhaseError:
        return None
    lo_sum = pa.lo + pb.lo
    hi_sum = pa.hi + pb.hi
    if lo_sum > math.pi:
        return lo_sum - 2.0 * math.pi, 2.0 * math.pi - lo_sum
    if hi_sum < math.pi:
        return -hi_sum, hi_sum
    return None


def segmental_condition_bicentric(a, b, step_deg: float = 1.0, n_phi: int = 96) -> bool:
    """Literal two-center segmental test over a product grid of centers.

    The half-spread of the minimal covering segment at center c equals the
    upper phase deviation at axis c, and at the antipodal center it is pi
    minus the lower deviation, so one half-period profile per matrix
    covers all centers.
    """
    thetas = np.arange(-90.0, 90.0, step_deg) * math.pi / 180.0
    try:
        lo_a, hi_a = graphs.theta_srg_phase_profile(a, thetas, n_phi)
        lo_b, hi_b = graphs.theta_srg_phase_profile(b, thetas, n_phi)
    except UndefinedPhaseError:
        return False
    centers = np.concatenate([thetas, thetas + math.pi])
    delta_a = np.concatenate([hi_a, math.pi - lo_a])
    delta_b = np.concatenate([hi_b, math.pi - lo_b])
    s_mid = centers[:, None] + centers[None, :]
    s_rad = delta_a[:, None] + delta_b[None, :]
    for k in range(-2, 3):
        ok = (s_mid - s_rad > 2 * k * math.pi - math.pi) & (s_mid + s_rad < 2 * k * math.pi + math.pi)
        if bool(np.any(ok)):
            return True
    return False


# ---------------------------------------------------------------------------
# the condition battery


def check_condition(a, b, which: str, n: int = 96) -> SeparationVerdict:
    """Evaluate one sufficient nonsingularity condition for I + A U* B U."""
    a = as_square_matrix(a)
    b = as_square_matrix(b)
    if a.shape != b.shape:
        raise ValueError("matrices must have equal dimensions")
    if which == SMALL_GAIN:
        prod = singular_value_extremes(a)[1] * singular_value_extremes(b)[1]
        status = SEPARATED if prod < 1.0 else INTERSECTING
        return SeparationVerdict(status, SMALL_GAIN, margin=1.0 - prod)
    if which == LARGE_GAIN:
        prod = singular_value_extremes(a)[0] * singular_value_extremes(b)[0]
        status = SEPARATED if prod > 1.0 else INTERSECTING
        return SeparationVerdict(status, LARGE_GAIN, margin=prod - 1.0)
    if which == NUMERICAL_RANGE:
        inv_nr = shell.inverse_numerical_range(a, max(n, 64))
        nr_b = graphs.numerical_range_boundary(-b, max(n, 64))
        if inv_nr is None:
            return SeparationVerdict(INTERSECTING, NUMERICAL_RANGE, margin=-math.inf,
                                     reason="inverse numerical range is the whole plane")
        if inv_nr.vertices.size == 0:
            return SeparationVerdict(SEPARATED, NUMERICAL_RANGE, margin=math.inf,
                                     reason="inverse numerical range empty")
        dist = polygon_pair_distance(inv_nr.vertices, nr_b.vertices)
        if dist == 0.0:
            return SeparationVerdict(INTERSECTING, NUMERICAL_RANGE, margin=0.0,
                                     witness_point=_polygon_witness(inv_nr.vertices,
                                                                    nr_b.vertices, 0.0))
        return SeparationVerdict(SEPARATED, NUMERICAL_RANGE, margin=dist)
    if which == SECTORIAL_PHASE:
        sa = graphs.sectorial_phases(a, max(n, 128))
        sb = graphs.sectorial_phases(b, max(n, 128))
        if not (sa.defined and sb.defined):
            return SeparationVerdict(UNDECIDED, SECTORIAL_PHASE,
                                     reason="a factor is not semisectorial")
        lo_sum, hi_sum = sa.lo + sb.lo, sa.hi + sb.hi
        for k in range(-2, 3):
            if 2 * k * math.pi - math.pi < lo_sum and hi_sum < 2 * k * math.pi + math.pi:
                margin = min(lo_sum - (2 * k * math.pi - math.pi),
                             (2 * k * math.pi + math.pi) - hi_sum)
                return SeparationVerdict(SEPARATED, SECTORIAL_PHASE, margin=margin,
                                         reason=f"k={k}")
        return SeparationVerdict(INTERSECTING, SECTORIAL_PHASE,
                                 reason="no feasible winding integer")
    if which == SRG_STANDARD:
        v = theta_srg_separation(a, b, 0.0, n)
        return SeparationVerdict(v.status, SRG_STANDARD, margin=v.margin,
                                 witness_theta=0.0, witness_point=v.witness_point,
                                 reason=v.reason)
    if which == NNR:
        try:
            cloud_a = np.conj(graphs.nnr_sample(a, seed=11))
            cloud_b = graphs.nnr_sample(-b, seed=12)
        except UndefinedPhaseError as exc:
            return SeparationVerdict(UNDECIDED, NNR, reason=str(exc))
        d = np.abs(cloud_a[:, None] - cloud_b[None, :])
        dist = float(d.min())
        dilation = 1e-3 * 2.0  # clouds live in the unit disc
        if dist > dilation:
            return SeparationVerdict(SEPARATED, NNR, margin=dist - dilation)
        return SeparationVerdict(UNDECIDED, NNR, margin=dist - dilation,
                                 reason="clouds within the conservative dilation")
    if which == SINGULAR_ANGLE_SMALL:
        try:
            pa = graphs.theta_srg_phases(a, 0.0)
            pb = graphs.theta_srg_phases(b, 0.0)
        except UndefinedPhaseError as exc:
            return SeparationVerdict(UNDECIDED, SINGULAR_ANGLE_SMALL, reason=str(exc))
        s = pa.hi + pb.hi
        status = SEPARATED if s < math.pi else INTERSECTING
        return SeparationVerdict(status, SINGULAR_ANGLE_SMALL, margin=math.pi - s)
    if which == SINGULAR_ANGLE_LARGE:
        try:
            pa = graphs.theta_srg_phases(a, 0.0)
            pb = graphs.theta_srg_phases(b, 0.0)
        except UndefinedPhaseError as exc:
            return SeparationVerdict(UNDECIDED, SINGULAR_ANGLE_LARGE, reason=str(exc))
        s = pa.lo + pb.lo
        status = SEPARATED if s > math.pi else INTERSECTING
        return SeparationVerdict(status, SINGULAR_ANGLE_LARGE, margin=s - math.pi)
    if which == SEGMENTAL_PHASE:
        v = theta_srg_phase_condition(a, b)
        return SeparationVerdict(v.status, SEGMENTAL_PHASE, margin=v.margin,
                                 witness_theta=v.witness_theta, reason=v.reason)
    if which == THETA_SRG_PHASE:
        return theta_srg_phase_condition(a, b)
    if which == THETA_SRG_SEPARATION:
        v = dw_separation(a, b, n=n)
        status = v.status if v.status != INTERSECTING else INTERSECTING
        return SeparationVerdict(status, THETA_SRG_SEPARATION, margin=v.margin,
                                 witness_theta=v.witness_theta,
                                 witness_point=v.witness_point, reason=v.reason)
    if which == DW_SEPARATION:
        return dw_separation(a, b, n=n)
    raise ValueError(f"unknown condition {which!r}")


# ---------------------------------------------------------------------------
# constructive direction and falsification


def construct_singularizing_unitary(a, b, point: ShellPoint, x, y) -> np.ndarray:
    """Build a unitary U with ``I + A U* B U`` singular from a shared point.

    The witness is a common point of the inverse shell of A and the shell
    of -B with certificate vectors x, y: ``conj(x* A x)/||Ax||^2 = z =
    -y* B y`` and ``1/||Ax||^2 = nu = ||By||^2``.  Expanding x against the
    normalized output direction a = Ax/||Ax|| and By against y, a unitary
    matching those frames sends a back through the loop onto -a.
    """
    a_mat = as_square_matrix(a)
    b_mat = as_square_matrix(b)
    nd = a_mat.shape[0]
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    x = x / np.linalg.norm(x)
    y = y / np.linalg.norm(y)
    z, nu = complex(point.z), float(point.nu)
    ax = a_mat @ x
    nax = float(np.linalg.norm(ax))
    by = b_mat @ y
    res = max(
        abs(np.conj(x.conj() @ ax) / nax**2 - z),
        abs(-(y.conj() @ by) - z),
        abs(1.0 / nax**2 - nu),
        abs(float(np.linalg.norm(by)) ** 2 - nu),
    )
    if res > 1e-6 * (1.0 + abs(z) + nu):
        raise ValueError(f"witness residual {res:.3e} too large")
    avec = ax / nax
    beta = x - avec * (avec.conj() @ x)
    nb = float(np.linalg.norm(beta))
    a_perp = beta / nb if nb > 1e-9 else _any_orthonormal(avec)
    w = by + z * y
    nw = float(np.linalg.norm(w))
    y_perp = w / nw if nw > 1e-9 else _any_orthonormal(y)
    if nd == 1:
        return (y * np.conj(avec)).reshape(1, 1)
    q = _complete_basis(np.column_stack([avec, a_perp]))
    r = _complete_basis(np.column_stack([y, -y_perp]))
    return r @ q.conj().T


def _any_orthonormal(v: np.ndarray) -> np.ndarray:
    n = v.size
    if n == 1:
        return v.copy()
    basis = np.eye(n, dtype=complex)
    cand = basis[:, int(np.argmin(np.abs(v)))]
    w = cand - v * (v.conj() @ cand)
    return w / np.linalg.norm(w)


def _complete_basis(cols: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a full unitary (deterministic)."""
    n, k = cols.shape
    if k >= n:
        return cols[:, :n]
    proj = np.eye(n, dtype=complex) - cols @ cols.conj().T
    u, s, _ = np.linalg.svd(proj)
    return np.column_stack([cols, u[:, : n - k]])


def witness_from_null_vector(a, b, u) -> tuple[ShellPoint, np.ndarray, np.ndarray]:
    """Recover a shared shell point from a (near-)singular closed loop.

    Takes the null direction of ``I + A U* B U`` and converts it into the
    certificate vectors for the two shells; the caller should check the
    returned residual structure via construct_singularizing_unitary.
    """
    a_mat = as_square_matrix(a)
    b_mat = as_square_matrix(b)
    u = np.asarray(u, dtype=complex)
    bt = u.conj().T @ b_mat @ u
    m = np.eye(a_mat.shape[0]) + a_mat @ bt
    _, _, vh = np.linalg.svd(m)
    y_loc = vh[-1].conj()
    bty = bt @ y_loc
    nrm = float(np.linalg.norm(bty))
    if nrm <= 1e-14:
        raise ValueError("null direction does not excite the loop")
    x = bty / nrm
    ax = a_mat @ x
    nax2 = float(np.linalg.norm(ax)) ** 2
    z = complex(np.conj(x.conj() @ ax) / nax2)
    point = ShellPoint(z, 1.0 / nax2)
    return point, x, u @ y_loc


def unitary_orbit_falsifier(a, b, trials: int = 1000, seed=0):
    """Haar sampling (plus local polish) of ``min sigma_min(I + A U* B U)``."""
    if trials < 1:
        raise ValueError("need at least one trial")
    a_mat = as_square_matrix(a)
    b_mat = as_square_matrix(b)
    nd = a_mat.shape[0]
    gen = np.random.default_rng(seed)
    best_sigma = math.inf
    best_u = np.eye(nd, dtype=complex)
    chunk = 512
    done = 0
    eye = np.eye(nd)
    while done < trials:
        m = min(chunk, trials - done)
        us = haar_unitaries(nd, m, gen)
        loops = eye[None] + a_mat[None] @ np.transpose(us.conj(), (0, 2, 1)) @ b_mat[None] @ us
        sig = np.linalg.svd(loops, compute_uv=False)[:, -1]
        j = int(np.argmin(sig))
        if sig[j] < best_sigma:
            best_sigma, best_u = float(sig[j]), us[j]
        done += m
    # local polish: random tangent kicks, kept only on improvement
    eps = 0.05
    for _ in range(20):
        g = gen.normal(size=(nd, nd)) + 1j * gen.normal(size=(nd, nd))
        h = (g + g.conj().T) / 2.0
        rot = _unitary_exp(1j * eps * h)
        cand = best_u @ rot
        sig = float(np.linalg.svd(eye + a_mat @ cand.conj().T @ b_mat @ cand,
                                  compute_uv=False)[-1])
        if sig < best_sigma:
            best_sigma, best_u = sig, cand
        else:
            eps *= 0.7
    return best_sigma, best_u


def _unitary_exp(skew: np.ndarray) -> np.ndarray:
    """exp of a skew-Hermitian matrix via its Hermitian eigensystem."""
    h = (skew / 1j + (skew / 1j).conj().T) / 2.0
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


# ---------------------------------------------------------------------------
# implication audit

# head condition separated => tail condition must not report intersecting
IMPLICATIONS: tuple[tuple[str, str], ...] = (
    (SMALL_GAIN, SRG_STANDARD),
    (SMALL_GAIN, THETA_SRG_SEPARATION),
    (SMALL_GAIN, DW_SEPARATION),
    (LARGE_GAIN, SRG_STANDARD),
    (LARGE_GAIN, THETA_SRG_SEPARATION),
    (LARGE_GAIN, DW_SEPARATION),
    (NUMERICAL_RANGE, DW_SEPARATION),
    (SECTORIAL_PHASE, NUMERICAL_RANGE),
    (SECTORIAL_PHASE, THETA_SRG_PHASE),
    (SECTORIAL_PHASE, DW_SEPARATION),
    (SRG_STANDARD, THETA_SRG_SEPARATION),
    (SRG_STANDARD, DW_SEPARATION),
    (NNR, DW_SEPARATION),
    (SINGULAR_ANGLE_SMALL, SRG_STANDARD),
    (SINGULAR_ANGLE_SMALL, THETA_SRG_PHASE),
    (SINGULAR_ANGLE_SMALL, SEGMENTAL_PHASE),
    (SINGULAR_ANGLE_SMALL, DW_SEPARATION),
    (SINGULAR_ANGLE_LARGE, SRG_STANDARD),
    (SINGULAR_ANGLE_LARGE, THETA_SRG_PHASE),
    (SINGULAR_ANGLE_LARGE, SEGMENTAL_PHASE),
    (SINGULAR_ANGLE_LARGE, DW_SEPARATION),
    (SEGMENTAL_PHASE, THETA_SRG_PHASE),
    (SEGMENTAL_PHASE, NNR),
    (SEGMENTAL_PHASE, DW_SEPARATION),
    (THETA_SRG_PHASE, SEGMENTAL_PHASE),
    (THETA_SRG_PHASE, THETA_SRG_SEPARATION),
    (THETA_SRG_PHASE, DW_SEPARATION),
    (THETA_SRG_SEPARATION, DW_SEPARATION),
)


def implication_audit(a, b, n: int = 96, strict: bool = True):
    """Run every condition and check the logged implication edges.

    Returns (table, violations); with ``strict`` a violation raises, since
    it indicates an implementation bug rather than a mathematical failure.
    """
    table = {cond: check_condition(a, b, cond, n) for cond in ALL_CONDITIONS}
    violations = []
    for head, tail in IMPLICATIONS:
        if table[head].status == SEPARATED and table[tail].status == INTERSECTING:
            violations.append(
                f"{head} certified separation but {tail} reported intersection "
                f"(margins {table[head].margin:.3e} / {table[tail].margin:.3e})")
    if strict and violations:
        raise ImplicationViolation("; ".join(violations))
    return table, violations
