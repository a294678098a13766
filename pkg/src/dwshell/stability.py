"""Frequencywise closed-loop stability certificates for MIMO LTI loops.

Negative feedback of two stable square systems G, H is internally stable
when, at every frequency, the inverse shell of G(iw) avoids the shells of
the contractively scaled -H(iw) family.  Working in the rotated side
projections turns each check into planar separation of convex polygons;
the scaled family only rescales one polygon, so a frequency costs one
support sweep per side plus cheap distance tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import graphs, separation, shell, tomography
from .geometry import polygon_diameter, polygon_pair_distance
from .graphs import UndefinedPhaseError
from .linalg import as_square_matrix, singular_value_extremes

DEFAULT_MU_POINTS = 21
STABILITY_MARGIN_FLOOR = 1e-9

CERTIFIED = "certified"
NOT_CERTIFIED = "not_certified"
COUNTEREXAMPLE = "counterexample"


@dataclass(frozen=True)
class StateSpaceSystem:
    """Real state-space quadruple (A, B, C, D) with square I/O."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    name: str = ""

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_2d(np.asarray(self.B, dtype=float))
        c = np.atleast_2d(np.asarray(self.C, dtype=float))
        d = np.atleast_2d(np.asarray(self.D, dtype=float))
        nx = a.shape[0]
        if a.shape != (nx, nx):
            raise ValueError("state matrix must be square")
        if b.shape[0] != nx and nx > 0:
            raise ValueError("B row count must match the state dimension")
        if nx == 0:
            b = b.reshape(0, d.shape[1])
            c = c.reshape(d.shape[0], 0)
        if c.shape[1] != nx:
            raise ValueError("C column count must match the state dimension")
        if d.shape != (c.shape[0], b.shape[1]):
            raise ValueError("D shape must be (outputs, inputs)")
        if d.shape[0] != d.shape[1]:
            raise ValueError("loop components must be square (inputs = outputs)")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "D", d)

    @property
    def io_dim(self) -> int:
        return self.D.shape[0]

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    def spectral_abscissa(self) -> float:
        if self.state_dim == 0:
            return -math.inf
        return float(np.max(np.linalg.eigvals(self.A).real))

    @property
    def is_stable(self) -> bool:
        return self.spectral_abscissa() < -1e-9


@dataclass(frozen=True)
class FrequencyGrid:
    omegas: np.ndarray
    include_infinity: bool = True

    def __post_init__(self):
        w = np.asarray(self.omegas, dtype=float).ravel()
        if w.size and (np.any(~np.isfinite(w)) or np.any(w < 0)):
            raise ValueError("frequencies must be finite and nonnegative")
        if np.any(np.diff(w) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        object.__setattr__(self, "omegas", w)

    def points(self):
        """Frequencies as floats, with math.inf appended when requested."""
        pts = [float(w) for w in self.omegas]
        if self.include_infinity:
            pts.append(math.inf)
        return pts


def default_frequency_grid() -> FrequencyGrid:
    """40 log-spaced points on [1e-3, 1e4] plus DC, with infinity."""
    omegas = np.concatenate([[0.0], np.logspace(-3.0, 4.0, 40)])
    return FrequencyGrid(omegas=omegas, include_infinity=True)


@dataclass
class FrequencyRecord:
    omega: float
    verdict: str
    margin: float
    witness_theta: float | None = None
    condition: str = ""
    detail: str = ""


@dataclass
class StabilityReport:
    overall: str
    per_frequency: list[FrequencyRecord]
    mu_grid_size: int
    notes: str = ""

    @property
    def certified(self) -> bool:
        return self.overall == CERTIFIED

    def worst(self) -> FrequencyRecord | None:
        recs = [r for r in self.per_frequency if math.isfinite(r.margin)]
        return min(recs, key=lambda r: r.margin) if recs else None


def freq_response(sys: StateSpaceSystem, omega) -> np.ndarray:
    """Exact evaluation ``C (iw I - A)^{-1} B + D``; infinity maps to D."""
    if omega == math.inf:
        return sys.D.astype(complex)
    if sys.state_dim == 0:
        return sys.D.astype(complex)
    m = 1j * float(omega) * np.eye(sys.state_dim) - sys.A
    try:
        x = np.linalg.solve(m, sys.B)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"evaluation hits a pole at omega={omega}") from exc
    return sys.C @ x + sys.D


def _require_stable(*systems: StateSpaceSystem):
    for s in systems:
        if not s.is_stable:
            raise ValueError(
                f"component {s.name or '?'} is not stable "
                f"(spectral abscissa {s.spectral_abscissa():.3e})")


def well_posed(g: StateSpaceSystem, h: StateSpaceSystem) -> bool:
    loop = np.eye(g.io_dim) + g.D @ h.D
    return abs(np.linalg.det(loop)) > 1e-12


def closed_loop_state_matrix(g: StateSpaceSystem, h: StateSpaceSystem) -> np.ndarray:
    """State matrix of the negative feedback loop (algebraic loop solved)."""
    if not well_posed(g, h):
        raise ValueError("loop is not well posed: I + D_G D_H is singular")
    ng, nh = g.state_dim, h.state_dim
    ident = np.eye(g.io_dim)
    # e1 = -y_H, e2 = +y_G with zero external inputs
    s = np.linalg.solve(ident + h.D @ g.D, np.hstack([-h.D @ g.C, -h.C]))
    e1 = s  # maps [x_g, x_h] -> e1
    e2 = np.hstack([g.C, np.zeros((g.io_dim, nh))]) + g.D @ e1
    top = np.hstack([g.A, np.zeros((ng, nh))]) + g.B @ e1
    bot = np.hstack([np.zeros((nh, ng)), h.A]) + h.B @ e2
    return np.vstack([top, bot])


# ---------------------------------------------------------------------------
# per-frequency separation kernel


def _ill_posed_report(mu_points: int) -> StabilityReport:
    """A singular I + D_G D_H is an eigenlocus at -1 at infinite frequency."""
    rec = FrequencyRecord(math.inf, separation.INTERSECTING, -math.inf,
                          condition="well_posedness",
                          detail="I + D_G D_H singular: eigenlocus hits -1 at omega=inf")
    return StabilityReport(COUNTEREXAMPLE, [rec], mu_points,
                           notes="loop not well posed")


def _mu_margins(ginv_poly, h_poly, mus, singular_g: bool, cap_ok: bool):
    """Separation margins of the inverse-G polygon against scaled -H copies.

    The side projection of the shell of ``-mu H`` is the pointwise scaling
    (a, nu) -> (mu a, mu^2 nu) of the unscaled polygon, so the family costs
    one support sweep.
    """
    margins = np.empty(len(mus))
    for j, mu in enumerate(mus):
        if mu == 0.0 or h_poly.size == 0:
            # the shell of the zero matrix is the origin; the inverse shell
            # never reaches nu = 0
            if ginv_poly.size:
                margins[j] = max(float(np.min(ginv_poly.imag)), STABILITY_MARGIN_FLOOR)
            else:
                margins[j] = math.inf
            continue
        scaled = mu * h_poly.real + 1j * (mu * mu * h_poly.imag)
        if ginv_poly.size == 0:
            margins[j] = math.inf
            continue
        margins[j] = polygon_pair_distance(ginv_poly, scaled)
    if singular_g and not cap_ok:
        margins = np.minimum(margins, 0.0)  # force undecided downstream
    return margins


def _freq_theta_mu_margins(gw, hw, thetas, n_phi: int = 48):
    """margins[theta_i, mu_j-free]: per theta, the inverse-G and -H polygons."""
    ginv_polys = []
    h_polys = []
    singular = shell.zero_eigen_normality(gw) != shell.NONSINGULAR
    for th in thetas:
        pa, _, _ = separation._inverse_side_polygon(gw, th, n_phi)
        pb = separation._side_polygon(-hw, th, n_phi)
        ginv_polys.append(pa)
        h_polys.append(pb)
    return ginv_polys, h_polys, singular


def stability_dw(g: StateSpaceSystem, h: StateSpaceSystem,
                 grid: FrequencyGrid | None = None,
                 mu_points: int = DEFAULT_MU_POINTS,
                 theta_grid_size: int = 61, n_phi: int = 48) -> StabilityReport:
    """Shell-separation certificate, frequencywise and per scale sample.

    Each (frequency, scale) pair gets its own best rotation angle; the
    certificate holds at the sampled scales and frequencies only, which
    the report notes spell out.
    """
    _require_stable(g, h)
    if mu_points < 2:
        raise ValueError("need at least the endpoints of the scale interval")
    if not well_posed(g, h):
        return _ill_posed_report(mu_points)
    grid = grid or default_frequency_grid()
    mus = np.linspace(0.0, 1.0, mu_points)
    thetas = np.linspace(-math.pi / 2, math.pi / 2, theta_grid_size, endpoint=False)
    records = []
    all_ok = True
    counterexample = False
    for omega in grid.points():
        gw = freq_response(g, omega)
        hw = freq_response(h, omega)
        ginv_polys, h_polys, singular_g = _freq_theta_mu_margins(gw, hw, thetas, n_phi)
        cap_ok = True
        if singular_g:
            top = max((float(np.max(p.imag)) for p in h_polys if p.size), default=0.0)
            cap_ok = shell.DEFAULT_NU_CAP >= 4.0 * (top + 1.0)
        margin_mat = np.empty((len(thetas), len(mus)))
        for i in range(len(thetas)):
            margin_mat[i] = _mu_margins(ginv_polys[i], h_polys[i], mus, singular_g, cap_ok)
        per_mu = margin_mat.max(axis=0)  # each scale picks its own angle
        worst_mu = int(np.argmin(per_mu))
        margin = float(per_mu[worst_mu])
        theta_star = float(thetas[int(np.argmax(margin_mat[:, worst_mu]))])
        scale = max(polygon_diameter(h_polys[0]) if h_polys[0].size else 1.0, 1.0)
        if margin > STABILITY_MARGIN_FLOOR * scale:
            records.append(FrequencyRecord(omega, separation.SEPARATED, margin,
                                           theta_star, condition="dw_separation",
                                           detail=f"worst mu={mus[worst_mu]:.3f}"))
            continue
        all_ok = False
        v = separation.dw_separation(gw, float(mus[worst_mu]) * hw, n=96)
        records.append(FrequencyRecord(omega, v.status, v.margin, v.witness_theta,
                                       condition="dw_separation",
                                       detail=f"mu={mus[worst_mu]:.3f}: {v.reason}"))
        if v.status == separation.INTERSECTING:
            counterexample = True
    overall = CERTIFIED if all_ok else (COUNTEREXAMPLE if counterexample else NOT_CERTIFIED)
    notes = (f"sampled certificate: {len(grid.points())} frequencies, "
             f"{mu_points} scale points, {theta_grid_size} rotation angles; "
             "the continuum claim is checked at sample resolution only")
    return StabilityReport(overall, records, mu_points, notes=notes)


def stability_theta_srg(g: StateSpaceSystem, h: StateSpaceSystem,
                        grid: FrequencyGrid | None = None,
                        mu_points: int = DEFAULT_MU_POINTS,
                        theta_grid_size: int = 61, n_phi: int = 48) -> StabilityReport:
    """Uniform-angle variant: one rotation angle must work for every scale.

    Stronger requirement than the per-scale test (the scaled family is the
    tip of the cone over the graph), hence possibly more conservative.
    """
    _require_stable(g, h)
    if not well_posed(g, h):
        return _ill_posed_report(mu_points)
    grid = grid or default_frequency_grid()
    mus = np.linspace(0.0, 1.0, mu_points)
    thetas = np.linspace(-math.pi / 2, math.pi / 2, theta_grid_size, endpoint=False)
    records = []
    all_ok = True
    counterexample = False
    for omega in grid.points():
        gw = freq_response(g, omega)
        hw = freq_response(h, omega)
        ginv_polys, h_polys, singular_g = _freq_theta_mu_margins(gw, hw, thetas, n_phi)
        cap_ok = True
        if singular_g:
            top = max((float(np.max(p.imag)) for p in h_polys if p.size), default=0.0)
            cap_ok = shell.DEFAULT_NU_CAP >= 4.0 * (top + 1.0)
        margin_mat = np.empty((len(thetas), len(mus)))
        for i in range(len(thetas)):
            margin_mat[i] = _mu_margins(ginv_polys[i], h_polys[i], mus, singular_g, cap_ok)
        per_theta = margin_mat.min(axis=1)  # the angle must survive all scales
        best = int(np.argmax(per_theta))
        margin = float(per_theta[best])
        theta_star = float(thetas[best])
        scale = max(polygon_diameter(h_polys[0]) if h_polys[0].size else 1.0, 1.0)
        ok = margin > STABILITY_MARGIN_FLOOR * scale
        status = separation.SEPARATED if ok else separation.UNDECIDED
        if not ok:
            all_ok = False
            v = separation.dw_separation(gw, hw, n=96)
            if v.status == separation.INTERSECTING:
                status = separation.INTERSECTING
                counterexample = True
        records.append(FrequencyRecord(omega, status, margin, theta_star,
                                       condition="theta_srg"))
    overall = CERTIFIED if all_ok else (COUNTEREXAMPLE if counterexample else NOT_CERTIFIED)
    notes = (f"uniform-angle certificate with {mu_points} scale points; "
             "a per-scale angle can certify loops this test cannot")
    return StabilityReport(overall, records, mu_points, notes=notes)


def stability_gain_phase(g: StateSpaceSystem, h: StateSpaceSystem,
                         grid: FrequencyGrid | None = None,
                         step_deg: float = 1.0) -> StabilityReport:
    """Explicit mixed gain/phase certificate, frequencywise.

    Passes a frequency on the small-gain product or, failing that, on the
    opposite-centric rotated-SRG phase condition at some angle.
    """
    _require_stable(g, h)
    if not well_posed(g, h):
        rep = _ill_posed_report(0)
        return StabilityReport(NOT_CERTIFIED, rep.per_frequency, 0, notes=rep.notes)
    grid = grid or default_frequency_grid()
    records = []
    all_ok = True
    for omega in grid.points():
        gw = freq_response(g, omega)
        hw = freq_response(h, omega)
        gain = singular_value_extremes(gw)[1] * singular_value_extremes(hw)[1]
        if gain < 1.0:
            records.append(FrequencyRecord(omega, separation.SEPARATED, 1.0 - gain,
                                           condition="small_gain"))
            continue
        scan = separation._phase_condition_scan(gw, hw, step_deg)
        if scan is not None and scan[1] > 0:
            theta, margin, branch = scan
            records.append(FrequencyRecord(omega, separation.SEPARATED, margin,
                                           theta, condition="theta_srg_phase",
                                           detail=branch))
            continue
        all_ok = False
        detail = (f"gain product {gain:.6f} >= 1; "
                  f"phase margin {scan[1]:.3e} at best angle" if scan is not None
                  else f"gain product {gain:.6f} >= 1; phases undefined")
        records.append(FrequencyRecord(omega, separation.INTERSECTING,
                                       scan[1] if scan else -math.inf,
                                       scan[0] if scan else None,
                                       condition="gain_phase", detail=detail))
    overall = CERTIFIED if all_ok else NOT_CERTIFIED
    return StabilityReport(overall, records, 0,
                           notes="explicit gain/phase certificate (scale-free)")


def nyquist_eigenloci(g: StateSpaceSystem, h: StateSpaceSystem,
                      grid: FrequencyGrid | None = None):
    """Eigenvalue trajectories of the return ratio and their winding data.

    Serves as a necessary-condition reference: a certified loop must keep
    the loci away from the ray (-inf, -1] and wind zero times around -1.
    Returns (loci per frequency, min distance to the ray, winding number).
    """
    _require_stable(g, h)
    grid = grid or default_frequency_grid()
    pts = grid.points()
    loci = []
    dets = []
    min_dist = math.inf
    for omega in pts:
        lw = freq_response(g, omega) @ freq_response(h, omega)
        eigs = np.linalg.eigvals(lw)
        loci.append(eigs)
        dets.append(complex(np.linalg.det(np.eye(lw.shape[0]) + lw)))
        for lam in eigs:
            if lam.real >= -1.0:
                d = abs(lam + 1.0)
            else:
                d = abs(lam.imag)
            min_dist = min(min_dist, float(d))
    # close the contour through the conjugate branch; both ends are real
    seq = np.array([np.conj(z) for z in dets[::-1]] + list(dets))
    args = np.angle(seq)
    inc = np.diff(args)
    inc = (inc + math.pi) % (2.0 * math.pi) - math.pi
    if np.any(np.abs(inc) > math.pi / 2):
        raise ValueError("frequency grid too coarse for winding computation; refine it")
    winding = int(round(float(np.sum(inc)) / (2.0 * math.pi)))
    return loci, min_dist, winding
