"""Cross-section extrema of DW shells via a lossless relaxation dual.

The slice problem -- extremize ``x* Q x`` subject to ``x* M x = k`` and
``||x|| = 1`` with Hermitian Q, M -- has a semidefinite relaxation that is
exact for this class, so the optimal value equals the scalar convex dual

    min_y  [ y k + lambda_max(Q - y M) ]

which we minimize by bracketed golden section with an eigenvalue oracle.
A rank-one witness is recovered from the top eigenspace at the optimum,
rotating between extreme Rayleigh directions when that eigenspace is
degenerate.  All slices of a plot are solved in lockstep through batched
Hermitian eigensolves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BoundaryCurve2D, dedupe_consecutive, resample_closed_polygon
from .linalg import as_square_matrix, hermitian_part, toeplitz_parts

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
GAP_TOL = 1e-7
_BRACKET_DOUBLINGS = 70
_ENDPOINT_DUST = 1e-12


class InfeasibleSliceError(ValueError):
    """The requested plane offset lies outside the feasible spectral band."""


class SolverFailureError(RuntimeError):
    """Dual bracketing blew up or witness recovery failed."""


@dataclass(frozen=True)
class CrossSectionProblem:
    """One vertical-slice extremum request.

    ``k`` is the plane offset along the theta axis; feasibility requires it
    inside the spectral interval of ``H(e^{-i theta} A)``.
    """

    A: np.ndarray
    theta: float
    k: float
    orientation: str = "max"

    def __post_init__(self):
        if self.orientation not in ("max", "min"):
            raise ValueError("orientation must be 'max' or 'min'")


@dataclass
class DualSolveResult:
    value: float
    multiplier: float | None
    witness: np.ndarray
    gap: float


def vnumran_matrix(a, theta: float) -> np.ndarray:
    """``H(e^{-i theta} A) + i A* A``: the side-projection carrier matrix."""
    m = as_square_matrix(a)
    return hermitian_part(np.exp(-1j * theta) * m) + 1j * (m.conj().T @ m)


def _q_stack(Q, count):
    q = np.asarray(Q)
    if q.ndim == 3:
        return q
    return np.broadcast_to(q, (count, *q.shape))


def _g_batch(Q, M, ks, ys):
    z = _q_stack(Q, ks.size) - ys[:, None, None] * M[None, :, :]
    lam = np.linalg.eigvalsh(z)[:, -1]
    return ys * ks + lam


def _subgrad_batch(Q, M, ks, ys):
    z = _q_stack(Q, ks.size) - ys[:, None, None] * M[None, :, :]
    _, vecs = np.linalg.eigh(z)
    v = vecs[:, :, -1]
    vmv = np.einsum("ki,ij,kj->k", v.conj(), M, v).real
    return ks - vmv


def _polish_batch(Q, M, ks, ys):
    """Sharpen dual multipliers by bisection on the monotone subgradient.

    Golden section leaves a window around the optimum that is too wide for
    rank-one recovery (the top eigenvector's Rayleigh quotient drifts off
    the slice offset); thirty bisection steps pin it near machine width.
    """
    d = 1e-6 * (1.0 + np.abs(ys))
    lo, hi = ys - d, ys + d
    for _ in range(40):
        bad = _subgrad_batch(Q, M, ks, lo) > 0
        if not np.any(bad):
            break
        lo[bad] -= d[bad]
        d[bad] *= 4.0
    d = 1e-6 * (1.0 + np.abs(ys))
    for _ in range(40):
        bad = _subgrad_batch(Q, M, ks, hi) < 0
        if not np.any(bad):
            break
        hi[bad] += d[bad]
        d[bad] *= 4.0
    for _ in range(26):
        mid = 0.5 * (lo + hi)
        pos = _subgrad_batch(Q, M, ks, mid) >= 0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
    return 0.5 * (lo + hi)


def _dual_minimize_batch(Q, M, ks):
    """Vectorized dual minimization for a batch of slice offsets.

    Returns (values, multipliers).  Assumes every k is strictly inside the
    spectral interval of M; callers peel off endpoint slices first.
    """
    ks = np.asarray(ks, dtype=float)
    mvals = np.linalg.eigvalsh(M)
    spread = max(float(mvals[-1] - mvals[0]), 1e-8)
    q = np.asarray(Q)
    normq = float(np.max(np.sqrt(np.sum(np.abs(q) ** 2, axis=(-2, -1)))))
    b0 = 10.0 * (normq + np.abs(ks) + 1.0) / spread
    lo, hi = -b0.copy(), b0.copy()

    # widen until the subgradient k - v*Mv brackets zero (it is nondecreasing)
    for _ in range(_BRACKET_DOUBLINGS):
        bad = _subgrad_batch(Q, M, ks, lo) > 0
        if not np.any(bad):
            break
        lo[bad] *= 2.0
    else:
        raise SolverFailureError("dual bracket blow-up on the lower side")
    for _ in range(_BRACKET_DOUBLINGS):
        bad = _subgrad_batch(Q, M, ks, hi) < 0
        if not np.any(bad):
            break
        hi[bad] *= 2.0
    else:
        raise SolverFailureError("dual bracket blow-up on the upper side")

    # the bisection polish picks up from a 1e-6-wide neighborhood, so the
    # golden phase only needs to land inside it
    width = float(np.max(hi - lo))
    target = 3e-8 * (1.0 + float(np.max(np.abs(lo))) + float(np.max(np.abs(hi))))
    iters = min(140, max(24, int(math.ceil(math.log(max(width / target, 4.0)) / -math.log(GOLDEN)))))

    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    gc = _g_batch(Q, M, ks, c)
    gd = _g_batch(Q, M, ks, d)
    for _ in range(iters):
        left = gc < gd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        c = hi - GOLDEN * (hi - lo)
        d = lo + GOLDEN * (hi - lo)
        # one fresh evaluation per slice; the surviving interior point
        # inherits its known value (d' = old c on the left, c' = old d on
        # the right, up to float dust)
        ynew = np.where(left, c, d)
        gnew = _g_batch(Q, M, ks, ynew)
        gc, gd = np.where(left, gnew, gd), np.where(left, gc, gnew)
    ystar = 0.5 * (lo + hi)
    return _g_batch(Q, M, ks, ystar), ystar


def _recover_witness(Q, M, k, y):
    """Rank-one recovery from the top eigenspace of ``Q - y M``.

    Expects a polished multiplier.  At a smooth optimum the top
    eigenvector already meets the slice constraint; at a kink the two
    extreme Rayleigh directions of M inside the (tightly clustered) top
    eigenspace straddle k, and a planar rotation meets it exactly (the
    cross term vanishes between eigenvectors of the compressed M).  The
    cluster width stays capped: mixing in spectrally distant eigenvectors
    would satisfy the constraint while wrecking the objective.
    """
    z = Q - y * M
    vals, vecs = np.linalg.eigh(z)
    scale = max(1.0, float(np.max(np.abs(vals))))
    ktol = 1e-9 * (1.0 + abs(k))
    best = vecs[:, -1]
    best_res = abs(float(np.real(best.conj() @ M @ best)) - k)
    if best_res <= ktol:
        return best
    ctol = 1e-12 * scale
    while ctol <= 1e-6 * scale:
        sel = vals >= vals[-1] - ctol
        if int(sel.sum()) >= 2:
            v = vecs[:, sel]
            mt = v.conj().T @ M @ v
            mt = (mt + mt.conj().T) / 2.0
            mu, w = np.linalg.eigh(mt)
            if mu[0] - ktol <= k <= mu[-1] + ktol:
                if mu[-1] - mu[0] <= 1e-15 * scale:
                    x = v @ w[:, -1]
                else:
                    s2 = float(np.clip((k - mu[0]) / (mu[-1] - mu[0]), 0.0, 1.0))
                    t = math.asin(math.sqrt(s2))
                    x = v @ (w[:, 0] * math.cos(t) + w[:, -1] * math.sin(t))
                return x / np.linalg.norm(x)
            cand = v @ w[:, -1] if abs(mu[-1] - k) < abs(mu[0] - k) else v @ w[:, 0]
            res = abs(float(np.real(cand.conj() @ M @ cand)) - k)
            if res < best_res:
                best, best_res = cand, res
        ctol *= 10.0
    return best / np.linalg.norm(best)


def _solve_result(Q, M, k, value, y) -> DualSolveResult:
    x = _recover_witness(Q, M, k, y)
    obj = float(np.real(x.conj() @ Q @ x))
    con = float(np.real(x.conj() @ M @ x))
    gap = max(abs(obj - value), abs(con - k), abs(float(np.linalg.norm(x)) - 1.0))
    return DualSolveResult(value=float(value), multiplier=float(y), witness=x, gap=gap)


def _endpoint_result(Q, M, k, lam_ref) -> DualSolveResult:
    """Exact solve when the slice sits at a spectral endpoint of M.

    The dual infimum is not attained there, so extremize Q compressed to
    the eigenspace of M at that endpoint instead.
    """
    vals, vecs = np.linalg.eigh(M)
    scale = max(1.0, float(np.max(np.abs(vals))))
    sel = np.abs(vals - lam_ref) <= 1e-9 * scale
    if not np.any(sel):
        sel = np.abs(vals - lam_ref) == np.min(np.abs(vals - lam_ref))
    v = vecs[:, sel]
    qt = v.conj().T @ Q @ v
    qt = (qt + qt.conj().T) / 2.0
    qvals, qvecs = np.linalg.eigh(qt)
    x = v @ qvecs[:, -1]
    x = x / np.linalg.norm(x)
    value = float(qvals[-1])
    con = float(np.real(x.conj() @ M @ x))
    gap = abs(con - k)
    return DualSolveResult(value=value, multiplier=None, witness=x, gap=gap)


def slice_extrema(a, theta: float, ks) -> tuple[list[DualSolveResult], list[DualSolveResult]]:
    """Max and min of ``x* (A*A) x`` on each vertical slice.

    Minimization reuses the max machinery on -Q; endpoint offsets are
    peeled off and solved by eigenspace compression.
    """
    m = as_square_matrix(a)
    M = hermitian_part(np.exp(-1j * theta) * m)
    Q = m.conj().T @ m
    ks = np.asarray(ks, dtype=float)
    mvals = np.linalg.eigvalsh(M)
    lam_lo, lam_hi = float(mvals[0]), float(mvals[-1])
    scale = max(abs(lam_lo), abs(lam_hi), 1.0)
    ftol = 1e-9 * scale
    if np.any(ks < lam_lo - ftol) or np.any(ks > lam_hi + ftol):
        raise InfeasibleSliceError("slice offset outside the spectral interval")

    dust = max(_ENDPOINT_DUST * scale, 1e-14)
    at_end = (np.abs(ks - lam_lo) <= dust) | (np.abs(ks - lam_hi) <= dust)
    if lam_hi - lam_lo <= 1e-8 * scale:
        at_end = np.ones_like(at_end)

    interior = ~at_end
    hi_results: list[DualSolveResult | None] = [None] * ks.size
    lo_results: list[DualSolveResult | None] = [None] * ks.size
    if np.any(interior):
        kin = ks[interior]
        m = kin.size
        # both orientations ride one doubled batch with per-slice signs
        q2 = np.concatenate([np.broadcast_to(Q, (m, *Q.shape)),
                             np.broadcast_to(-Q, (m, *Q.shape))])
        k2 = np.concatenate([kin, kin])
        _, ys = _dual_minimize_batch(q2, M, k2)
        ys = _polish_batch(q2, M, k2, ys)
        vals = _g_batch(q2, M, k2, ys)
        idxs = np.nonzero(interior)[0]
        for j, k in enumerate(kin):
            hi_results[idxs[j]] = _solve_result(Q, M, float(k), float(vals[j]), float(ys[j]))
            res_m = _solve_result(-Q, M, float(k), float(vals[m + j]), float(ys[m + j]))
            lo_results[idxs[j]] = DualSolveResult(
                value=-res_m.value, multiplier=res_m.multiplier,
                witness=res_m.witness, gap=res_m.gap)
    for j in np.nonzero(at_end)[0]:
        lam_ref = lam_lo if abs(ks[j] - lam_lo) <= abs(ks[j] - lam_hi) else lam_hi
        hi_results[j] = _endpoint_result(Q, M, float(ks[j]), lam_ref)
        res_m = _endpoint_result(-Q, M, float(ks[j]), lam_ref)
        lo_results[j] = DualSolveResult(value=-res_m.value, multiplier=None,
                                        witness=res_m.witness, gap=res_m.gap)
    return hi_results, lo_results


def cross_section_extremum(prob: CrossSectionProblem) -> DualSolveResult:
    """Solve one vertical-slice extremum (see module docstring)."""
    his, los = slice_extrema(prob.A, prob.theta, [prob.k])
    return his[0] if prob.orientation == "max" else los[0]


def slice_offsets(lam_lo: float, lam_hi: float, n: int, spacing: str = "uniform") -> np.ndarray:
    """Slice grid over the spectral interval, endpoints always included.

    ``cosine`` clusters offsets near the endpoints, which resolves the
    square-root turning of the boundary there far better than a uniform
    grid at the same count.
    """
    if n < 2:
        raise ValueError("need at least two slices")
    if spacing == "uniform":
        return np.linspace(lam_lo, lam_hi, n)
    if spacing == "cosine":
        j = np.arange(n, dtype=float)
        mid, half = 0.5 * (lam_lo + lam_hi), 0.5 * (lam_hi - lam_lo)
        return mid - half * np.cos(math.pi * j / (n - 1))
    raise ValueError(f"unknown spacing {spacing!r}")


def _project_upper(theta: float, ks: np.ndarray, nus: np.ndarray) -> np.ndarray:
    root = np.sqrt(np.maximum(nus - ks**2, 0.0))  # round-off can dip negative
    return np.exp(1j * theta) * (ks + 1j * root)


def _solve_slices_forgiving(m, theta, ks):
    """slice_extrema with per-slice fallback; returns value arrays + flag."""
    try:
        his, los = slice_extrema(m, theta, ks)
        return (np.array([r.value for r in his]), np.array([r.value for r in los]),
                his, los, False)
    except SolverFailureError:
        hi_vals = np.full(len(ks), np.nan)
        lo_vals = np.full(len(ks), np.nan)
        his, los = [None] * len(ks), [None] * len(ks)
        for j, k in enumerate(ks):
            try:
                h, l = slice_extrema(m, theta, [k])
                hi_vals[j], lo_vals[j] = h[0].value, l[0].value
                his[j], los[j] = h[0], l[0]
            except (SolverFailureError, InfeasibleSliceError):
                pass
        return hi_vals, lo_vals, his, los, True


def plot_theta_srg(a, theta: float, n: int = 256, spacing: str = "uniform",
                   sagitta: float | None = None, return_solves: bool = False):
    """Half-boundary of the rotated SRG by slice tomography.

    Slices the shell along the theta axis, solving both slice orientations,
    and assembles the high array followed by the reversed low array into a
    closed polygon for the upper half; the mirror across the axis is
    implied by ``symmetry_axis``.  A failed slice marks the curve degraded
    instead of aborting.

    ``sagitta`` switches on adaptive slice insertion: an interval is
    bisected until the solved midpoint deviates from the chord by less
    than the tolerance on both boundary arrays.  Eigenvalues sitting close
    to the theta axis dent the low boundary on a scale far below any fixed
    grid, so curve-accurate plots need this.
    """
    m = as_square_matrix(a)
    M = hermitian_part(np.exp(-1j * theta) * m)
    mvals = np.linalg.eigvalsh(M)
    lam_lo, lam_hi = float(mvals[0]), float(mvals[-1])
    ks = slice_offsets(lam_lo, lam_hi, n, spacing)
    if sagitta is not None:
        # seed the grid at eigenvalue projections: eigenvalues near the
        # theta axis dent the low boundary on the scale of their axial
        # distance, which blind bisection can straddle without noticing
        eigs = np.linalg.eigvals(m) * np.exp(-1j * theta)
        seeds = []
        for lam in eigs:
            w = max(abs(lam.imag), 1e-9)
            seeds.extend(lam.real + w * np.array([0.0, -0.5, 0.5, -1, 1, -2, 2, -4, 4]))
        seeds = np.clip(np.asarray(seeds), lam_lo, lam_hi)
        ks = np.unique(np.concatenate([ks, seeds]))
    hi_vals, lo_vals, his, los, degraded = _solve_slices_forgiving(m, theta, ks)
    ok = ~np.isnan(hi_vals)
    ks, hi_vals, lo_vals = ks[ok], hi_vals[ok], lo_vals[ok]
    his = [r for r, good in zip(his, ok) if good]
    los = [r for r, good in zip(los, ok) if good]

    if sagitta is not None and ks.size >= 2:
        width_floor = 1e-11 * max(lam_hi - lam_lo, 1e-6)
        active = np.ones(ks.size - 1, dtype=bool)
        for _ in range(16):
            gaps = np.diff(ks)
            active &= gaps > width_floor
            if not np.any(active) or ks.size > max(60 * n, 20000):
                break
            # deterministic jitter breaks symmetric blind spots, and the
            # tighter deactivation threshold refines one level past passing
            idx = np.nonzero(active)[0]
            ts = 0.5 + 0.1 * np.sin(987.6543 * ks[idx])
            mids = ks[idx] + ts * gaps[idx]
            mh, ml, mhis, mlos, bad = _solve_slices_forgiving(m, theta, mids)
            degraded = degraded or bad
            w_hi = _project_upper(theta, ks, hi_vals)
            w_lo = _project_upper(theta, ks, lo_vals)
            mw_hi = _project_upper(theta, mids, mh)
            mw_lo = _project_upper(theta, mids, ml)
            dev = np.maximum(
                np.abs(mw_hi - (w_hi[idx] + ts * (w_hi[idx + 1] - w_hi[idx]))),
                np.abs(mw_lo - (w_lo[idx] + ts * (w_lo[idx + 1] - w_lo[idx]))),
            )
            still = dev > 0.4 * sagitta
            # splice midpoints in; children stay active where the parent
            # interval had not yet converged
            new_ks = np.empty(ks.size + mids.size)
            new_hi = np.empty_like(new_ks)
            new_lo = np.empty_like(new_ks)
            new_active = np.zeros(new_ks.size - 1, dtype=bool)
            new_his, new_los = [], []
            pos = 0
            mid_j = 0
            for i in range(ks.size):
                new_ks[pos], new_hi[pos], new_lo[pos] = ks[i], hi_vals[i], lo_vals[i]
                new_his.append(his[i])
                new_los.append(los[i])
                if i < ks.size - 1 and active[i]:
                    keep = bool(still[mid_j]) and not np.isnan(mh[mid_j])
                    if not np.isnan(mh[mid_j]):
                        new_active[pos] = keep
                        pos += 1
                        new_ks[pos], new_hi[pos], new_lo[pos] = mids[mid_j], mh[mid_j], ml[mid_j]
                        new_his.append(mhis[mid_j])
                        new_los.append(mlos[mid_j])
                        new_active[pos] = keep
                    mid_j += 1
                pos += 1
            ks, hi_vals, lo_vals = new_ks[:pos], new_hi[:pos], new_lo[:pos]
            active = new_active[:pos - 1]
            his, los = new_his, new_los
            if not np.any(active):
                break

    pts_high = _project_upper(theta, ks, hi_vals)
    pts_low = _project_upper(theta, ks, lo_vals)
    vertices = np.concatenate([pts_high, pts_low[::-1]])
    curve = BoundaryCurve2D(vertices, closed=True, symmetry_axis=theta, degraded=degraded)
    if return_solves:
        return curve, (his, los)
    return curve


def vnumran_polygon(a, theta: float, n: int = 64) -> np.ndarray:
    """Boundary of the side projection ``{(Re(e^{-i theta} z), nu)}``.

    Computed as the numerical range of the carrier matrix by the rotation
    method; returned as complex points ``a + i nu`` in boundary order.
    """
    t = vnumran_matrix(a, theta)
    h, p = toeplitz_parts(t)
    phis = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    stack = np.cos(phis)[:, None, None] * h + np.sin(phis)[:, None, None] * p
    _, vecs = np.linalg.eigh(stack)
    x = vecs[:, :, -1]
    return np.einsum("ki,ij,kj->k", x.conj(), t, x)


def _vnumran_support(t_herm, t_skew, t, phis):
    stack = np.cos(phis)[:, None, None] * t_herm + np.sin(phis)[:, None, None] * t_skew
    _, vecs = np.linalg.eigh(stack)
    x = vecs[:, :, -1]
    return np.einsum("ki,ij,kj->k", x.conj(), t, x)


def _edge_arc_points(p0: complex, p1: complex, tol: float) -> np.ndarray:
    """Image of one (a, nu) boundary edge, sampled on its exact circle.

    A straight segment ``nu = alpha a + beta`` maps to the circle
    ``|w - alpha/2| = sqrt(alpha^2/4 + beta)`` centered on the real axis,
    so subdivision points can be placed exactly on the image curve; the
    endpoint p1 is excluded (it opens the next edge).
    """
    a0, nu0 = p0.real, p0.imag
    a1, nu1 = p1.real, p1.imag
    w0 = a0 + 1j * math.sqrt(max(nu0 - a0 * a0, 0.0))
    w1 = a1 + 1j * math.sqrt(max(nu1 - a1 * a1, 0.0))
    if abs(a1 - a0) <= 1e-14 * (1.0 + abs(a0) + abs(a1)):
        return np.array([w0])  # vertical edge: the image is a straight segment
    alpha = (nu1 - nu0) / (a1 - a0)
    beta = nu0 - alpha * a0
    r2 = alpha * alpha / 4.0 + beta
    if r2 <= 0.0:
        return np.array([w0])
    r = math.sqrt(r2)
    c = alpha / 2.0
    ph0 = math.atan2(w0.imag, w0.real - c)
    ph1 = math.atan2(w1.imag, w1.real - c)
    chord = abs(w1 - w0)
    if chord <= 0.0:
        return np.array([w0])
    m = int(min(np.ceil((abs(ph1 - ph0) * r) / max(math.sqrt(8.0 * r * tol), 1e-12)), 1024))
    if m <= 1:
        return np.array([w0])
    phs = np.linspace(ph0, ph1, m + 1)[:-1]
    return c + r * np.exp(1j * phs)


def plot_theta_srg_via_vnumran(a, theta: float, n: int = 256,
                               sagitta: float | None = None) -> BoundaryCurve2D:
    """Cross-check path: map the convex side projection onto the half-SRG.

    Each boundary point (a, nu) of the vertical numerical range maps to
    ``e^{i theta} (a + i sqrt(nu - a^2))``.  Support angles are refined
    until the mapped midpoint hugs the mapped chord (the map stretches hard
    where the boundary dips toward the axis), then each remaining polygon
    edge is subdivided along its exact image circle, so flat faces (normal
    matrices) also follow the curve rather than its chord.
    """
    if n < 16:
        raise ValueError("resolution must be at least 16")
    t = vnumran_matrix(a, theta)
    h, p = toeplitz_parts(t)
    phis = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    # seed support angles that expose the paraboloid touch points, where
    # the projection map is at its most distorting
    eigs = np.linalg.eigvals(as_square_matrix(a)) * np.exp(-1j * theta)
    seeds = []
    for lam in eigs:
        phi0 = math.atan2(-1.0, 2.0 * lam.real)
        seeds.extend(phi0 + np.array([0.0, -1e-3, 1e-3, -1e-2, 1e-2, -5e-2, 5e-2]))
    phis = np.unique(np.concatenate([phis, np.asarray(seeds) % (2.0 * math.pi)]))
    pts = _vnumran_support(h, p, t, phis)
    if sagitta is None:
        mapped = _project_upper(theta, pts.real, pts.imag)
        diam = float(np.max(np.abs(mapped[:, None] - mapped[None, ::max(1, mapped.size // 64)])))
        sagitta = max(2e-6 * max(diam, 1e-6), 1e-14)
    scale = max(1.0, float(np.max(np.abs(pts))))
    # adaptive support probing at edge normals: the probe it returns is the
    # deepest boundary point beyond the edge, so the measured deviation is
    # the true edge-to-boundary gap (and faces terminate immediately)
    active = np.ones(phis.size, dtype=bool)  # edge i: pts[i] -> pts[i+1] (cyclic)
    cap = max(64 * n, 20000)
    for _ in range(28):
        if not np.any(active) or phis.size > cap:
            break
        nxt_pts = np.roll(pts, -1)
        edge = nxt_pts - pts
        act = active & (np.abs(edge) > 1e-13 * scale)
        if not np.any(act):
            break
        idx = np.nonzero(act)[0]
        phin = (np.angle(edge[idx]) - 0.5 * math.pi) % (2.0 * math.pi)
        probe = _vnumran_support(h, p, t, phin)
        # support gap beyond the edge, in the side plane; the map can
        # compress this direction at the probe yet magnify it elsewhere on
        # the edge, so the convergence test scales the gap by the worst
        # stretch of the map over the edge instead of remeasuring it there
        nvec = np.exp(1j * phin)
        gap = (np.conj(nvec) * probe).real - (np.conj(nvec) * pts[idx]).real
        im0 = np.sqrt(np.maximum(pts[idx].imag - pts[idx].real ** 2, 0.0))
        im1 = np.sqrt(np.maximum(nxt_pts[idx].imag - nxt_pts[idx].real ** 2, 0.0))
        imp = np.sqrt(np.maximum(probe.imag - probe.real ** 2, 0.0))
        im_min = np.maximum(np.minimum(np.minimum(im0, im1), imp), 1e-9)
        a_max = np.maximum(np.abs(pts[idx].real), np.abs(nxt_pts[idx].real))
        stretch = np.abs(np.cos(phin)) * (1.0 + a_max / im_min) + np.abs(np.sin(phin)) / (2.0 * im_min)
        flat = np.abs(gap) <= 1e-13 * scale
        keep = (gap * stretch > 0.25 * sagitta) & ~flat
        orig_flags = np.zeros(phis.size, dtype=bool)
        orig_flags[idx] = keep
        ins = ~flat
        all_phis = np.concatenate([phis, phin[ins]])
        all_pts = np.concatenate([pts, probe[ins]])
        child_flags = np.concatenate([orig_flags, keep[ins]])
        order = np.argsort(all_phis)
        phis, pts, active = all_phis[order], all_pts[order], child_flags[order]
    poly = dedupe_consecutive(pts, closed=True)
    if poly.size == 1:
        w = _project_upper(theta, poly.real, poly.imag)
        return BoundaryCurve2D(w, closed=True, symmetry_axis=theta)
    pieces = [
        _edge_arc_points(complex(p0), complex(p1), sagitta)
        for p0, p1 in zip(poly, np.roll(poly, -1))
    ]
    local = np.concatenate(pieces)
    return BoundaryCurve2D(np.exp(1j * theta) * local, closed=True, symmetry_axis=theta)


# ---------------------------------------------------------------------------
# Signed variant: slices with a sign constraint on x* S(A) x


def _sign_constrained_max(Q, S, sign: float, ceiling: float = 1e12):
    """``max x* Q x`` subject to ``sign * x* S x >= 0`` on the unit sphere.

    Scalar dual ``min_{mu >= 0} lambda_max(Q + mu sign S)``; returns
    (value, witness, gap) or None when the branch is infeasible.
    """
    svals = np.linalg.eigvalsh(sign * S)
    sscale = max(1.0, float(np.max(np.abs(svals))))
    if svals[-1] < -1e-12 * sscale:
        return None  # no unit vector satisfies the sign constraint
    if svals[0] >= -1e-12 * sscale:
        vals, vecs = np.linalg.eigh(Q)
        x = vecs[:, -1]
        return float(vals[-1]), x, 0.0

    def phi(mu):
        return float(np.linalg.eigvalsh(Q + mu * sign * S)[-1])

    lo, hi = 0.0, 1.0
    for _ in range(_BRACKET_DOUBLINGS):
        zc = Q + hi * sign * S
        vals, vecs = np.linalg.eigh(zc)
        v = vecs[:, -1]
        sub = float(np.real(v.conj() @ (sign * S) @ v))
        if sub >= 0.0 or hi > ceiling:
            break
        hi *= 2.0
    c = hi - GOLDEN * hi
    d = GOLDEN * hi
    fc, fd = phi(c), phi(d)
    for _ in range(110):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = phi(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = phi(d)
    mu = 0.5 * (lo + hi)
    value = phi(mu)
    # recover a feasible witness in the top eigenspace
    z = Q + mu * sign * S
    vals, vecs = np.linalg.eigh(z)
    top = float(vals[-1])
    scale = max(1.0, float(np.max(np.abs(vals))))
    sel = vals >= top - 1e-8 * scale
    v = vecs[:, sel]
    st = v.conj().T @ (sign * S) @ v
    st = (st + st.conj().T) / 2.0
    su, sw = np.linalg.eigh(st)
    if su[-1] >= 0.0 and su[0] <= 0.0 and su.size > 1:
        s2 = float(np.clip((0.0 - su[0]) / (su[-1] - su[0]), 0.0, 1.0))
        t = math.asin(math.sqrt(s2))
        x = v @ (sw[:, 0] * math.cos(t) + sw[:, -1] * math.sin(t))
    else:
        x = v @ sw[:, -1]
    x = x / np.linalg.norm(x)
    obj = float(np.real(x.conj() @ Q @ x))
    feas = float(np.real(x.conj() @ (sign * S) @ x))
    gap = max(abs(obj - value), max(0.0, -feas))
    return value, x, gap


def _ssg_slice_value(Q, M, S, sign: float, k: float):
    """Nested 2-D dual for one signed slice (max orientation)."""

    def inner(mu):
        vals, _ = _dual_minimize_batch(Q + mu * sign * S, M, np.array([k]))
        return float(vals[0])

    lo, hi = 0.0, 1.0
    f_lo = inner(lo)
    for _ in range(40):
        f_hi = inner(hi)
        if f_hi >= f_lo or hi > 1e9:
            break
        lo, f_lo = 0.0, f_lo
        hi *= 4.0
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = inner(c), inner(d)
    for _ in range(36):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = inner(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = inner(d)
    mu = 0.5 * (lo + hi)
    vals, ys = _dual_minimize_batch(Q + mu * sign * S, M, np.array([k]))
    return float(vals[0]), float(mu), float(ys[0])


def _ssg_witness(Q, M, S, sign: float, k: float, mu: float, y: float):
    x = _recover_witness(Q + mu * sign * S, M, k, y)
    return x


def plot_ssg(a, n: int = 96) -> tuple[BoundaryCurve2D, BoundaryCurve2D]:
    """Upper and lower branches of the signed SRG.

    Branch membership follows the sign of ``x* S(A) x``; slices where that
    form can vanish contribute to both branches.  Each branch is assembled
    like the unsigned plot but over its own feasible offset range.
    """
    if n < 2:
        raise ValueError("need at least two slices")
    m = as_square_matrix(a)
    M, S = toeplitz_parts(m)
    Q = m.conj().T @ m
    curves = []
    for sign, flip in ((1.0, 1.0), (-1.0, -1.0)):
        kmax = _sign_constrained_max(M, S, sign)
        kmin = _sign_constrained_max(-M, S, sign)
        if kmax is None or kmin is None:
            curves.append(BoundaryCurve2D(np.array([], dtype=complex), closed=True))
            continue
        k_hi, x_hi, _ = kmax
        k_lo_neg, x_lo, _ = kmin
        k_lo = -k_lo_neg
        if k_hi - k_lo <= 1e-12 * max(1.0, abs(k_hi), abs(k_lo)):
            nu = float(np.real(x_hi.conj() @ Q @ x_hi))
            w = k_hi + flip * 1j * math.sqrt(max(nu - k_hi**2, 0.0))
            curves.append(BoundaryCurve2D(np.array([w]), closed=True))
            continue
        ks = np.linspace(k_lo, k_hi, n)
        hi_vals = np.empty(n)
        lo_vals = np.empty(n)
        degraded = False
        for j, k in enumerate(ks):
            if j == 0 or j == n - 1:
                xr = x_lo if j == 0 else x_hi
                val = float(np.real(xr.conj() @ Q @ xr))
                hi_vals[j] = lo_vals[j] = val
                continue
            try:
                vmax, mu1, y1 = _ssg_slice_value(Q, M, S, sign, float(k))
                vmin, mu2, y2 = _ssg_slice_value(-Q, M, S, sign, float(k))
                hi_vals[j], lo_vals[j] = vmax, -vmin
            except (SolverFailureError, InfeasibleSliceError):
                degraded = True
                hi_vals[j] = lo_vals[j] = np.nan
        ok = ~np.isnan(hi_vals)
        ks, hi_vals, lo_vals = ks[ok], hi_vals[ok], lo_vals[ok]
        root_hi = np.sqrt(np.maximum(hi_vals - ks**2, 0.0))
        root_lo = np.sqrt(np.maximum(lo_vals - ks**2, 0.0))
        w_hi = ks + flip * 1j * root_hi
        w_lo = ks + flip * 1j * root_lo
        curves.append(BoundaryCurve2D(np.concatenate([w_hi, w_lo[::-1]]),
                                      closed=True, degraded=degraded))
    return curves[0], curves[1]
