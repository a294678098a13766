"""2-D matrix representations, their phase measures, and texture checks.

Everything here reduces to the shell machinery: the numerical range is the
vertical projection, rotated SRGs come from slice tomography, and the
normalized numerical range is a sampled visualization set.  Phases are
angular data read off curve vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tomography
from .geometry import (
    BoundaryCurve2D,
    circle_region_components,
    convex_hull_2d,
    line_region_components,
    point_in_polygon,
    polygon_diameter,
)
from .linalg import ANGLE_TOL, as_square_matrix, numerical_range_points, singular_value_extremes
from .shell import NONNORMAL_ZERO, GainInterval, dw_boundary, zero_eigen_normality

SECTORIAL = "sectorial"
SEMISECTORIAL = "semisectorial"
QUASISECTORIAL = "quasisectorial"
UNDEFINED = "undefined"

PHASE_RESOLUTION = 512


class UndefinedPhaseError(ValueError):
    """Raised when a phase measure does not exist (zero matrix etc.)."""


@dataclass(frozen=True)
class PhaseInterval:
    """Angular deviations from a reference axis, both in [0, pi]."""

    axis: float
    lo: float
    hi: float

    def __post_init__(self):
        if not (-1e-12 <= self.lo <= self.hi <= math.pi + 1e-12):
            raise ValueError("phase interval must satisfy 0 <= lo <= hi <= pi")


@dataclass(frozen=True)
class SectorialPhases:
    status: str
    lo: float = math.nan
    hi: float = math.nan

    @property
    def defined(self) -> bool:
        return self.status != UNDEFINED


@dataclass(frozen=True)
class Texture:
    """A parameterized family of probe arcs (radar rays, gratings, ripples)."""

    kind: str  # 'radar' | 'grating' | 'ripple'
    angle: float = 0.0  # grating line direction
    center: complex = 0j  # ripple center
    param_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in ("radar", "grating", "ripple"):
            raise ValueError(f"unknown texture kind {self.kind!r}")
        if self.kind == "grating" and not (0.0 <= self.angle < math.pi + 1e-12):
            object.__setattr__(self, "angle", self.angle % math.pi)


def numerical_range_boundary(a, n: int = 128) -> BoundaryCurve2D:
    """Convex boundary of the numerical range, counterclockwise."""
    if n < 8:
        raise ValueError("resolution must be at least 8")
    pts = numerical_range_points(a, n)
    return BoundaryCurve2D(convex_hull_2d(pts), closed=True)


def gain_interval(a) -> GainInterval:
    smin, smax = singular_value_extremes(a)
    return GainInterval(smin**2, smax**2)


def theta_srg(a, theta: float, n: int = 256, **kwargs) -> BoundaryCurve2D:
    """Rotated SRG half-boundary (mirror implied by the symmetry axis)."""
    return tomography.plot_theta_srg(a, theta, n, **kwargs)


def _phase_interval_from_points(points: np.ndarray, theta: float) -> PhaseInterval:
    scale = float(np.max(np.abs(points), initial=0.0))
    nz = points[np.abs(points) > 1e-9 * max(scale, 1.0)]
    if nz.size == 0:
        raise UndefinedPhaseError("the graph is {0}; phases are undefined")
    dev = np.angle(nz * np.exp(-1j * theta))
    dev = np.where(np.abs(dev) <= ANGLE_TOL, 0.0, dev)
    dev = np.where(np.abs(dev - math.pi) <= ANGLE_TOL, math.pi, dev)
    dev = np.where(np.abs(dev + math.pi) <= ANGLE_TOL, math.pi, dev)
    dev = np.clip(np.abs(dev), 0.0, math.pi)
    return PhaseInterval(axis=theta, lo=float(dev.min()), hi=float(dev.max()))


def theta_srg_phases(a, theta: float, n: int = PHASE_RESOLUTION) -> PhaseInterval:
    """Extreme angular deviations of the half-SRG from its axis.

    A singular matrix whose zero eigenvalue is not normal has the full
    [0, pi] interval for every axis, short-circuited here without plotting.
    """
    m = as_square_matrix(a)
    if not np.any(np.abs(m) > 0):
        raise UndefinedPhaseError("zero matrix has no phase interval")
    if zero_eigen_normality(m) == NONNORMAL_ZERO:
        return PhaseInterval(axis=theta, lo=0.0, hi=math.pi)
    curve = tomography.plot_theta_srg(m, theta, n)
    return _phase_interval_from_points(curve.vertices, theta)


def theta_srg_phase_profile(a, thetas, n_phi: int = 96):
    """Vectorized (lo, hi) phase deviations over a grid of axes.

    Reads the phases off vertical-numerical-range support points: the
    deviation of a point (a, nu) is arccos(a / sqrt(nu)), and extremes over
    the convex side projection match extremes over the half-SRG.  One
    batched eigensolve covers the whole (theta, angle) grid.
    """
    m = as_square_matrix(a)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if not np.any(np.abs(m) > 0):
        raise UndefinedPhaseError("zero matrix has no phase interval")
    if zero_eigen_normality(m) == NONNORMAL_ZERO:
        return np.zeros(thetas.size), np.full(thetas.size, math.pi)
    h0 = (m + m.conj().T) / 2.0
    s0 = (m - m.conj().T) / 2j
    gram = m.conj().T @ m
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    ct, st = np.cos(thetas), np.sin(thetas)
    # H(e^{-i theta} A) = cos(theta) H + sin(theta) S, stacked over thetas
    hmat = ct[:, None, None] * h0 + st[:, None, None] * s0
    cp, sp = np.cos(phis), np.sin(phis)
    stack = (cp[None, :, None, None] * hmat[:, None, :, :]
             + sp[None, :, None, None] * gram[None, None, :, :])
    _, vecs = np.linalg.eigh(stack)
    x = vecs[..., -1]
    av = np.einsum("tki,ij,tkj->tk", x.conj(), h0, x).real
    sv = np.einsum("tki,ij,tkj->tk", x.conj(), s0, x).real
    aa = ct[:, None] * av + st[:, None] * sv
    nu = np.einsum("tki,ij,tkj->tk", x.conj(), gram, x).real
    # nonzero eigenvalues always belong to the graph; add their exact deviations
    eigs = np.linalg.eigvals(m)
    eigs = eigs[np.abs(eigs) > 1e-12 * max(1.0, float(np.max(np.abs(eigs))))]
    if eigs.size == 0:
        eigs = np.array([np.nan + 0j])
    eig_dev = np.abs(np.angle(eigs[None, :] * np.exp(-1j * thetas[:, None])))
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.clip(aa / np.sqrt(np.maximum(nu, 1e-300)), -1.0, 1.0)
        dev = np.arccos(ratio)
    dev = np.where(nu > 1e-18, dev, np.nan)
    dev = np.concatenate([dev, eig_dev], axis=1)
    lo = np.nanmin(dev, axis=1)
    hi = np.nanmax(dev, axis=1)
    lo[np.abs(lo) <= ANGLE_TOL] = 0.0
    hi[np.abs(hi - math.pi) <= ANGLE_TOL] = math.pi
    return lo, hi


def sectorial_phases(a, n: int = 256) -> SectorialPhases:
    """Extreme rays of the conic hull of the numerical range.

    Defined only when the origin is not interior to W(A); the spread never
    exceeds pi in that case.  Classification: sectorial when the origin is
    strictly outside, quasisectorial when it touches the boundary with
    spread < pi, semisectorial otherwise.
    """
    if n < 32:
        raise ValueError("resolution must be at least 32")
    m = as_square_matrix(a)
    pts = numerical_range_points(m, n)
    hull = convex_hull_2d(pts)
    diam = polygon_diameter(hull)
    if diam == 0.0 and abs(hull[0]) <= 1e-12:
        return SectorialPhases(UNDEFINED)
    btol = 1e-7 * (1.0 + diam)
    origin_inside = bool(point_in_polygon(0j, hull)[0]) if hull.size >= 3 else False
    dist0 = float(np.min(np.abs(hull))) if hull.size < 2 else _dist_to_polygon(0j, hull)
    if origin_inside and dist0 > btol:
        return SectorialPhases(UNDEFINED)
    lo, hi = _cone_extreme_angles(pts[np.abs(pts) > 1e-12 * (1.0 + diam)])
    if hi - lo > math.pi + 1e-9:
        return SectorialPhases(UNDEFINED)
    if dist0 > btol and not origin_inside and hi - lo < math.pi:
        return SectorialPhases(SECTORIAL, lo, hi)
    if hi - lo < math.pi - 1e-12:
        return SectorialPhases(QUASISECTORIAL, lo, hi)
    return SectorialPhases(SEMISECTORIAL, lo, min(hi, lo + math.pi))


def _dist_to_polygon(w: complex, poly: np.ndarray) -> float:
    from .geometry import _edges, _point_segment_distance

    if poly.size == 1:
        return float(abs(w - poly[0]))
    a, b = _edges(poly, closed=poly.size > 2)
    return float(np.min(_point_segment_distance(np.array([w]), a, b)))


def _cone_extreme_angles(points: np.ndarray) -> tuple[float, float]:
    """Minimal covering angular interval of a point set (branch-aware)."""
    args = np.sort(np.angle(points))
    if args.size == 1:
        return float(args[0]), float(args[0])
    gaps = np.diff(np.concatenate([args, [args[0] + 2.0 * math.pi]]))
    j = int(np.argmax(gaps))
    lo = float(args[(j + 1) % args.size])
    hi = float(args[j])
    if hi < lo:
        hi += 2.0 * math.pi
    # settle the branch in (-pi, pi] by the interval midpoint
    mid = 0.5 * (lo + hi)
    if mid > math.pi:
        lo, hi = lo - 2.0 * math.pi, hi - 2.0 * math.pi
    return float(lo), float(hi)


def segmental_phases(a, center: float, n: int = PHASE_RESOLUTION) -> tuple[float, float]:
    """Minimal unit-disc segment centered at ``center`` covering the NNR.

    The half-spread equals the upper SRG phase deviation at the same axis,
    so the quantitative route goes through the rotated-SRG phases; the
    axis-opposite phases provide a consistency check.
    """
    ph = theta_srg_phases(a, center, n)
    delta = ph.hi
    ph_op = theta_srg_phases(a, center - math.pi, n)
    alt = math.pi - ph_op.lo
    if abs(alt - delta) > 5e-4:
        raise UndefinedPhaseError(
            f"inconsistent segmental spread: {delta:.6f} vs {alt:.6f}")
    return center - delta, center + delta


def nnr_sample(a, n: int = 2000, seed=0) -> np.ndarray:
    """Point cloud approximating the normalized numerical range.

    Mixes shell-boundary samples (mapped by z / sqrt(nu)) with random
    unit-vector samples; everything lands in the closed unit disc.
    """
    m = as_square_matrix(a)
    if not np.any(np.abs(m) > 0):
        raise UndefinedPhaseError("zero matrix has an empty normalized range")
    bnd = dw_boundary(m, max(64, n // 4))
    keep = bnd.nus > 1e-14
    pts = [bnd.zs[keep] / np.sqrt(bnd.nus[keep])]
    gen = np.random.default_rng(seed)
    x = gen.normal(size=(m.shape[0], n)) + 1j * gen.normal(size=(m.shape[0], n))
    x /= np.linalg.norm(x, axis=0, keepdims=True)
    ax = m @ x
    norms = np.linalg.norm(ax, axis=0)
    ok = norms > 1e-14
    pts.append(np.einsum("ik,ik->k", x[:, ok].conj(), ax[:, ok]) / norms[ok])
    return np.concatenate(pts)


def texture_check(region, texture: Texture, probes: int = 100,
                  gap_tol: float = 1e-7, seed=0) -> tuple[bool, float]:
    """Probe whether every texture arc meets the region in one piece.

    ``region`` is a curve or list of curves (the union of their filled
    polygons).  A curve with a symmetry axis is probed as the stored half
    region (the texture claims concern the halves; the full set doubles
    every transversal).  Returns (ok, worst_gap): the largest separation
    between distinct components found over all probes, 0.0 when every
    nonempty intersection was connected within ``gap_tol``.
    """
    curves = region if isinstance(region, (list, tuple)) else [region]
    polys = [np.asarray(c.vertices, dtype=complex) for c in curves]
    polys = [p for p in polys if p.size >= 3]
    if not polys:
        return True, 0.0
    allpts = np.concatenate(polys)
    lo_re, hi_re = float(allpts.real.min()), float(allpts.real.max())
    lo_im, hi_im = float(allpts.imag.min()), float(allpts.imag.max())
    diam = math.hypot(hi_re - lo_re, hi_im - lo_im)
    scale = max(1.0, float(np.max(np.abs(allpts))))
    len_tol = 1e-9 * scale
    gen = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(probes):
        if texture.kind == "radar":
            xi_lo, xi_hi = texture.param_range or (0.0, math.pi)
            ang = gen.uniform(xi_lo, xi_hi)
            comps = line_region_components(polys, 0j, np.exp(1j * ang), gap_tol, len_tol)
            gaps = [b[0] - a[1] for a, b in zip(comps, comps[1:])]
        elif texture.kind == "grating":
            direction = np.exp(1j * texture.angle)
            offset_dir = 1j * direction
            if texture.param_range is not None:
                xi_lo, xi_hi = texture.param_range
            else:
                proj = (allpts * np.conj(offset_dir)).real
                xi_lo, xi_hi = float(proj.min()), float(proj.max())
            k = gen.uniform(xi_lo, xi_hi)
            comps = line_region_components(polys, k * offset_dir, direction, gap_tol, len_tol)
            gaps = [b[0] - a[1] for a, b in zip(comps, comps[1:])]
        else:  # ripple
            if texture.param_range is not None:
                r_lo, r_hi = texture.param_range
            else:
                dists = np.abs(allpts - texture.center)
                r_lo, r_hi = 0.0, float(dists.max()) * 1.05
            r = gen.uniform(r_lo, r_hi)
            comps = circle_region_components(polys, texture.center, r, gap_tol, len_tol)
            gaps = [r * (b[0] - a[1]) for a, b in zip(comps, comps[1:])]
        if len(comps) > 1:
            worst = max(worst, max(gaps))
    return worst <= gap_tol, worst
