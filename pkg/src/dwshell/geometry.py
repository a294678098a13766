"""Planar curve/polygon machinery and convex-hull membership in 3-D.

Polygons are 1-D complex arrays of vertices, implicitly closed.  Most
routines are vectorized over edges so polygon-pair queries stay cheap in
inner loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .linalg import ANGLE_TOL

DUST = 1e-12  # consecutive vertices closer than this are merged


@dataclass
class BoundaryCurve2D:
    """Ordered polyline in C approximating a 2-D set boundary.

    When ``symmetry_axis`` is set, only the half lying on the
    ``e^{i theta} {Im >= 0}`` side is stored and the mirror is implied.
    """

    vertices: np.ndarray
    closed: bool = True
    symmetry_axis: float | None = None
    degraded: bool = False

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex).ravel()
        v = dedupe_consecutive(v, closed=self.closed)
        if self.symmetry_axis is not None and v.size:
            local = v * np.exp(-1j * self.symmetry_axis)
            if np.min(local.imag) < -ANGLE_TOL * max(1.0, np.max(np.abs(v))):
                raise ValueError("half-curve vertices must lie in the closed upper half-plane")
        self.vertices = v

    def full_polygon(self) -> np.ndarray:
        """Materialize the implied mirror half (no-op without an axis)."""
        if self.symmetry_axis is None or self.vertices.size == 0:
            return self.vertices
        phase = np.exp(1j * self.symmetry_axis)
        mirrored = phase * np.conj(self.vertices * np.conj(phase))
        return dedupe_consecutive(np.concatenate([self.vertices, mirrored[::-1]]), closed=True)


def dedupe_consecutive(vertices: np.ndarray, closed: bool = True) -> np.ndarray:
    v = np.asarray(vertices, dtype=complex).ravel()
    if v.size <= 1:
        return v
    scale = max(1.0, float(np.max(np.abs(v))))
    keep = np.ones(v.size, dtype=bool)
    keep[1:] = np.abs(np.diff(v)) > DUST * scale
    v = v[keep]
    if closed and v.size > 1 and abs(v[-1] - v[0]) <= DUST * scale:
        v = v[:-1]
    return v


def convex_hull_2d(points) -> np.ndarray:
    """Counterclockwise hull vertices; degenerate inputs collapse gracefully."""
    p = np.asarray(points, dtype=complex).ravel()
    p = p[np.isfinite(p)]
    if p.size == 0:
        return p
    if p.size >= 3:
        try:
            hull = ConvexHull(np.column_stack([p.real, p.imag]))
            return p[hull.vertices]
        except QhullError:
            pass
    # collinear or coincident points: return the extreme pair (or point)
    c = p.mean()
    rel = p - c
    spread = float(np.max(np.abs(rel)))
    if spread <= DUST * max(1.0, abs(c)):
        return p[:1].copy()
    d = rel[np.argmax(np.abs(rel))]
    d /= abs(d)
    proj = (rel * np.conj(d)).real
    lo, hi = int(np.argmin(proj)), int(np.argmax(proj))
    return np.array([p[lo], p[hi]])


def point_in_polygon(probes, polygon) -> np.ndarray:
    """Even-odd containment test, vectorized over probes."""
    w = np.atleast_1d(np.asarray(probes, dtype=complex))
    poly = np.asarray(polygon, dtype=complex).ravel()
    if poly.size < 3:
        return np.zeros(w.shape, dtype=bool)
    a = poly
    b = np.roll(poly, -1)
    x, y = w.real[:, None], w.imag[:, None]
    ax, ay = a.real[None, :], a.imag[None, :]
    bx, by = b.real[None, :], b.imag[None, :]
    straddle = (ay > y) != (by > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = ax + (y - ay) * (bx - ax) / np.where(by == ay, np.inf, by - ay)
    crossings = np.sum(straddle & (xs > x), axis=1)
    return (crossings % 2).astype(bool)


def _point_segment_distance(w, a, b) -> np.ndarray:
    """Distances from points w (m,) to segments a->b (n,); returns (m, n)."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))[:, None]
    a = np.atleast_1d(np.asarray(a, dtype=complex))[None, :]
    b = np.atleast_1d(np.asarray(b, dtype=complex))[None, :]
    d = b - a
    denom = np.abs(d) ** 2
    t = np.where(denom > 0, ((w - a) * np.conj(d)).real / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.abs(w - (a + t * d))


def _edges(poly: np.ndarray, closed: bool = True):
    a = poly
    b = np.roll(poly, -1) if closed else poly[1:]
    if not closed:
        a = poly[:-1]
    return a, b


def segments_cross(a1, b1, a2, b2) -> np.ndarray:
    """Proper-or-touching intersection test for all segment pairs (m, n)."""
    a1 = np.atleast_1d(a1)[:, None]
    b1 = np.atleast_1d(b1)[:, None]
    a2 = np.atleast_1d(a2)[None, :]
    b2 = np.atleast_1d(b2)[None, :]

    def orient(p, q, r):
        return ((q - p) * np.conj(r - p)).imag

    d1 = orient(a1, b1, a2)
    d2 = orient(a1, b1, b2)
    d3 = orient(a2, b2, a1)
    d4 = orient(a2, b2, b1)
    proper = ((d1 > 0) != (d2 > 0)) & ((d3 > 0) != (d4 > 0))
    return proper


def polygons_intersect(p, q) -> bool:
    """Region-level intersection of two simple closed polygons."""
    p = np.asarray(p, dtype=complex).ravel()
    q = np.asarray(q, dtype=complex).ravel()
    if p.size == 0 or q.size == 0:
        return False
    if p.size >= 2 and q.size >= 2:
        a1, b1 = _edges(p)
        a2, b2 = _edges(q)
        if np.any(segments_cross(a1, b1, a2, b2)):
            return True
    if q.size >= 3 and bool(np.any(point_in_polygon(p, q))):
        return True
    if p.size >= 3 and bool(np.any(point_in_polygon(q, p))):
        return True
    if p.size < 3 or q.size < 3:
        # degenerate regions (points, segments) meet when they touch
        scale = max(1.0, float(np.max(np.abs(p))), float(np.max(np.abs(q))))
        small, big = (p, q) if p.size <= q.size else (q, p)
        if big.size >= 2:
            a, b = _edges(big, closed=big.size > 2)
            dist = float(np.min(_point_segment_distance(small, a, b)))
        else:
            dist = float(np.min(np.abs(small[:, None] - big[None, :])))
        return dist <= 1e-9 * scale
    return False


def polygon_pair_distance(p, q) -> float:
    """Distance between two polygonal regions; 0 when they intersect."""
    p = np.asarray(p, dtype=complex).ravel()
    q = np.asarray(q, dtype=complex).ravel()
    if p.size == 0 or q.size == 0:
        return math.inf
    if polygons_intersect(p, q):
        return 0.0
    if p.size == 1 and q.size == 1:
        return float(abs(p[0] - q[0]))
    d = math.inf
    if q.size >= 2:
        a, b = _edges(q, closed=q.size > 2)
        d = min(d, float(np.min(_point_segment_distance(p, a, b))))
    if p.size >= 2:
        a, b = _edges(p, closed=p.size > 2)
        d = min(d, float(np.min(_point_segment_distance(q, a, b))))
    if p.size == 1 or q.size == 1:
        d = min(d, float(np.min(np.abs(p[:, None] - q[None, :]))))
    return d


def polyline_hausdorff(p, q, closed: bool = True) -> float:
    """Symmetric Hausdorff distance between two polylines (with edges)."""
    p = np.asarray(p, dtype=complex).ravel()
    q = np.asarray(q, dtype=complex).ravel()
    if p.size == 0 or q.size == 0:
        return math.inf if p.size != q.size else 0.0
    return max(_directed_hausdorff(p, q, closed), _directed_hausdorff(q, p, closed))


def _directed_hausdorff(u: np.ndarray, v: np.ndarray, closed: bool) -> float:
    """max over u of the distance to polyline v (vertices + edges)."""
    if v.size == 1:
        return float(np.max(np.abs(u - v[0])))
    a, b = _edges(v, closed=closed and v.size > 2)
    if u.size * a.size <= 2**21:
        return float(np.max(np.min(_point_segment_distance(u, a, b), axis=1)))
    # large inputs: check the edges in an index window around the nearest
    # vertex, then verify the winners against every edge
    from scipy.spatial import cKDTree

    tree = cKDTree(np.column_stack([v.real, v.imag]))
    dv, iv = tree.query(np.column_stack([u.real, u.imag]))
    window = np.arange(-8, 9)
    idx = (iv[:, None] + window[None, :]) % a.size
    d_win = np.min(np.abs(u[:, None] - _project_to_segments(u, a[idx], b[idx])), axis=1)
    # the window can only overestimate; re-check candidates that could beat
    # the provisional maximum exactly
    worst = 0.0
    for j in np.argsort(-d_win):
        if d_win[j] <= worst:
            break
        d = float(np.min(_point_segment_distance(u[j:j + 1], a, b)))
        worst = max(worst, d)
    return worst


def _project_to_segments(u, a, b):
    """Closest points on segments a->b (broadcast against u[:, None])."""
    d = b - a
    denom = np.abs(d) ** 2
    t = np.where(denom > 0, ((u[:, None] - a) * np.conj(d)).real / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return a + t * d


def hausdorff_points(p, q) -> float:
    """Hausdorff distance between two finite point sets."""
    p = np.asarray(p, dtype=complex).ravel()
    q = np.asarray(q, dtype=complex).ravel()
    d = np.abs(p[:, None] - q[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def resample_closed_polygon(poly, m: int) -> np.ndarray:
    """Respace ~m points along a closed polygon perimeter.

    Every original vertex is kept and long edges are subdivided in
    proportion to their length, so nonlinear pointwise maps of the result
    follow the region boundary instead of cutting corners.
    """
    p = np.asarray(poly, dtype=complex).ravel()
    if p.size <= 1 or m <= p.size:
        return p.copy()
    a, b = _edges(p)
    lengths = np.abs(b - a)
    total = float(lengths.sum())
    if total <= 0:
        return p[:1].copy()
    out = []
    extra = m - p.size
    for start, stop, ell in zip(a, b, lengths):
        k = int(round(extra * ell / total))
        ts = np.linspace(0.0, 1.0, k + 2)[:-1]
        out.append(start + ts * (stop - start))
    return np.concatenate(out)


def polygon_diameter(p) -> float:
    p = np.asarray(p, dtype=complex).ravel()
    if p.size <= 1:
        return 0.0
    return float(np.max(np.abs(p[:, None] - p[None, :])))


# ---------------------------------------------------------------------------
# Convex hull membership in R^3 (and lower-dimensional degenerations)


def hull_margins(points: np.ndarray, probes: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Signed hull-membership margins for each probe.

    Nonpositive margins certify membership in conv(points); positive values
    are the worst halfspace violation, a lower bound on the Euclidean
    distance to the hull.  Degenerate (flat) point sets are reduced along
    their affine span, and off-span distance folds into the margin.
    """
    pts = np.asarray(points, dtype=float)
    prb = np.atleast_2d(np.asarray(probes, dtype=float))
    if pts.ndim == 1:
        pts = pts[:, None]
    if prb.shape[1] != pts.shape[1]:
        raise ValueError("probe/point dimension mismatch")
    center = pts.mean(axis=0)
    rel = pts - center
    scale = max(1.0, float(np.max(np.abs(rel))) if rel.size else 1.0)
    if pts.shape[0] == 1:
        return np.linalg.norm(prb - pts[0], axis=1)
    u, s, vt = np.linalg.svd(rel, full_matrices=False)
    rank = int(np.sum(s > tol * scale * math.sqrt(pts.shape[0])))
    if rank == 0:
        return np.linalg.norm(prb - center, axis=1)
    basis = vt[:rank]
    off = (prb - center) - (prb - center) @ basis.T @ basis
    off_norm = np.linalg.norm(off, axis=1)
    red_pts = rel @ basis.T
    red_prb = (prb - center) @ basis.T
    if rank == 1:
        lo, hi = float(red_pts.min()), float(red_pts.max())
        t = red_prb[:, 0]
        along = np.maximum(lo - t, t - hi)
        margin = np.maximum(along, 0.0)
    else:
        try:
            hull = ConvexHull(red_pts)
            eq = hull.equations  # A x + b <= 0 inside
            margin = np.max(red_prb @ eq[:, :-1].T + eq[:, -1], axis=1)
        except QhullError:
            # flat within the estimated rank; fall back to 1-D span
            d = red_pts[np.argmax(np.linalg.norm(red_pts, axis=1))]
            d = d / np.linalg.norm(d)
            t = red_prb @ d
            tp = red_pts @ d
            margin = np.maximum(np.maximum(tp.min() - t, t - tp.max()), 0.0)
            margin = np.maximum(margin, np.linalg.norm(red_prb - np.outer(t, d), axis=1))
    return np.maximum(margin, off_norm) if rank < pts.shape[1] else margin


def shellpoints_to_xyz(zs, nus) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex).ravel()
    nus = np.asarray(nus, dtype=float).ravel()
    return np.column_stack([zs.real, zs.imag, nus])


# ---------------------------------------------------------------------------
# Texture probing primitives: line and circle cross-sections of a region


def _merge_intervals(intervals, merge_tol, len_tol):
    """Sort, merge near-touching intervals, drop dust; return kept list."""
    if not intervals:
        return []
    ivs = sorted(intervals)
    merged = [list(ivs[0])]
    for lo, hi in ivs[1:]:
        if lo - merged[-1][1] <= merge_tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [iv for iv in merged if iv[1] - iv[0] > len_tol]


def line_region_components(polygons, origin: complex, direction: complex,
                           merge_tol: float, len_tol: float):
    """Connected components of a line's intersection with a polygon union.

    The line is ``origin + t * direction`` with unit ``direction``.  Returns
    a list of (t_lo, t_hi) intervals after merging gaps below ``merge_tol``.
    """
    direction = direction / abs(direction)
    ts = []
    for poly in polygons:
        poly = np.asarray(poly, dtype=complex).ravel()
        if poly.size < 2:
            continue
        a, b = _edges(poly)
        fa = (np.conj(direction) * (a - origin)).imag
        fb = (np.conj(direction) * (b - origin)).imag
        straddle = (fa > 0) != (fb > 0)
        if np.any(straddle):
            s = fa[straddle] / (fa[straddle] - fb[straddle])
            w = a[straddle] + s * (b[straddle] - a[straddle])
            ts.extend(((np.conj(direction) * (w - origin)).real).tolist())
    if not ts:
        return []
    ts = sorted(set(ts))
    cuts = [ts[0] - 1.0] + ts + [ts[-1] + 1.0]
    intervals = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = origin + 0.5 * (lo + hi) * direction
        if any(bool(point_in_polygon(mid, poly)[0]) for poly in polygons if np.asarray(poly).size >= 3):
            intervals.append((lo, hi))
    return _merge_intervals(intervals, merge_tol, len_tol)


def circle_region_components(polygons, center: complex, radius: float,
                             merge_tol: float, len_tol: float):
    """Connected arc components (as angle intervals) of circle vs region.

    Angles live on the circle, so components are merged circularly; the
    tolerances are arc lengths, not raw angles.
    """
    if radius <= 0:
        inside = any(bool(point_in_polygon(center, poly)[0]) for poly in polygons
                     if np.asarray(poly).size >= 3)
        return [(0.0, 0.0)] if inside else []
    angs = []
    for poly in polygons:
        poly = np.asarray(poly, dtype=complex).ravel()
        if poly.size < 2:
            continue
        a, b = _edges(poly)
        d = b - a
        rel = a - center
        qa = np.abs(d) ** 2
        qb = 2.0 * (rel * np.conj(d)).real
        qc = np.abs(rel) ** 2 - radius**2
        disc = qb**2 - 4.0 * qa * qc
        ok = (disc > 0) & (qa > 0)
        if not np.any(ok):
            continue
        sq = np.sqrt(disc[ok])
        for sgn in (-1.0, 1.0):
            s = (-qb[ok] + sgn * sq) / (2.0 * qa[ok])
            hit = (s >= 0.0) & (s <= 1.0)
            pts = a[ok][hit] + s[hit] * d[ok][hit]
            angs.extend(np.angle(pts - center).tolist())
    merge_a = merge_tol / radius
    len_a = len_tol / radius
    if not angs:
        probe = center + radius
        inside = any(bool(point_in_polygon(probe, poly)[0]) for poly in polygons
                     if np.asarray(poly).size >= 3)
        return [(-math.pi, math.pi)] if inside else []
    angs = sorted(set(angs))
    arcs = []
    for lo, hi in zip(angs, angs[1:] + [angs[0] + 2.0 * math.pi]):
        mid = center + radius * np.exp(1j * 0.5 * (lo + hi))
        if any(bool(point_in_polygon(mid, poly)[0]) for poly in polygons if np.asarray(poly).size >= 3):
            arcs.append((lo, hi))
    if not arcs:
        return []
    merged = _merge_intervals(arcs, merge_a, 0.0)
    # circular wrap: last arc may touch the first one 2*pi later
    if len(merged) > 1 and (merged[0][0] + 2.0 * math.pi) - merged[-1][1] <= merge_a:
        merged[0] = [merged[-1][0] - 2.0 * math.pi, merged[0][1]]
        merged.pop()
    return [iv for iv in merged if (iv[1] - iv[0]) > len_a]
