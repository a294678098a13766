"""Command-line interface: shell / srg / separate / stability subcommands.

Inputs and results are JSON documents with a ``"schema": "dwshell/1"``
field; complex numbers are always [re, im] pairs.  Exit codes: 0 the
requested check certifies (or data was produced), 1 the condition fails,
2 malformed input, 3 numeric failure, 4 undecided.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import graphs, separation, shell, stability, tomography

SCHEMA = "dwshell/1"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_UNDECIDED = 4


class InputError(ValueError):
    pass


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON document {path!r}: {exc}") from exc


def parse_matrix_document(doc: dict) -> np.ndarray:
    if not isinstance(doc, dict) or "entries" not in doc or "dim" not in doc:
        raise InputError("matrix document needs 'dim' and 'entries'")
    n = int(doc["dim"])
    entries = doc["entries"]
    if n < 1 or len(entries) != n * n:
        raise InputError(f"expected {n * n} entries for dim {n}, got {len(entries)}")
    try:
        flat = [complex(float(re), float(im)) for re, im in entries]
    except (TypeError, ValueError) as exc:
        raise InputError("entries must be [re, im] pairs") from exc
    m = np.array(flat, dtype=complex).reshape(n, n)
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise InputError("matrix entries must be finite")
    return m


def parse_system_document(doc: dict) -> stability.StateSpaceSystem:
    if not isinstance(doc, dict) or "state_space" not in doc:
        raise InputError("system document needs a 'state_space' object")
    ss = doc["state_space"]
    mats = {}
    for key in ("A", "B", "C", "D"):
        if key not in ss or "shape" not in ss[key] or "data" not in ss[key]:
            raise InputError(f"state_space.{key} needs 'shape' and 'data'")
        rows, cols = (int(v) for v in ss[key]["shape"])
        data = [float(v) for v in ss[key]["data"]]
        if len(data) != rows * cols:
            raise InputError(f"state_space.{key}: {rows}x{cols} needs {rows * cols} values")
        mats[key] = np.array(data).reshape(rows, cols)
    try:
        return stability.StateSpaceSystem(mats["A"], mats["B"], mats["C"], mats["D"],
                                          name=str(doc.get("name", "")))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _pair(z: complex):
    return [float(np.real(z)), float(np.imag(z))]


def _curve_payload(curve) -> dict:
    return {
        "vertices": [_pair(v) for v in curve.vertices],
        "closed": bool(curve.closed),
        "symmetry_axis": curve.symmetry_axis,
        "degraded": bool(curve.degraded),
        "full_polygon": [_pair(v) for v in curve.full_polygon()],
    }


def _result_skeleton(command: str, inputs: dict, params: dict) -> dict:
    return {"schema": SCHEMA, "command": command, "inputs": inputs,
            "parameters": params, "diagnostics": {}}


def _emit(doc: dict, path: str | None):
    text = json.dumps(doc, indent=2, allow_nan=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_csv(path: str, header: str, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _write_svg(path: str, polylines):
    pts = np.concatenate([np.asarray(p) for p in polylines if len(p)])
    lo_x, hi_x = float(pts.real.min()), float(pts.real.max())
    lo_y, hi_y = float(pts.imag.min()), float(pts.imag.max())
    pad = 0.05 * max(hi_x - lo_x, hi_y - lo_y, 1e-6)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox='
             f'"{lo_x - pad} {-(hi_y + pad)} {hi_x - lo_x + 2 * pad} {hi_y - lo_y + 2 * pad}">']
    for poly in polylines:
        if not len(poly):
            continue
        coords = " ".join(f"{v.real},{-v.imag}" for v in poly)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="black" '
                     f'stroke-width="{pad / 20}"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def cmd_shell(args) -> int:
    m = parse_matrix_document(_load_json(args.matrix))
    result = _result_skeleton("shell", {"matrix": args.matrix},
                              {"points": args.points, "inverse": args.inverse,
                               "nu_cap": args.nu_cap, "seed": args.seed})
    if args.inverse:
        bnd = shell.inverse_dw_boundary(m, n=args.points, nu_cap=args.nu_cap)
        result["truncated"] = bool(bnd.truncated)
        zs, nus = bnd.zs, bnd.nus
    else:
        bnd = shell.dw_boundary(m, n=args.points)
        zs, nus = bnd.zs, bnd.nus
    result["points"] = [[float(z.real), float(z.imag), float(nu)] for z, nu in zip(zs, nus)]
    result["gain_interval"] = {
        "squared": [graphs.gain_interval(m).lo, graphs.gain_interval(m).hi]}
    _emit(result, args.output)
    if args.csv:
        _write_csv(args.csv, "z_re,z_im,nu", [[z.real, z.imag, nu] for z, nu in zip(zs, nus)])
    if args.svg:
        top = zs
        side = zs.real + 1j * nus
        _write_svg(args.svg, [top, side])
    return EXIT_OK


def cmd_srg(args) -> int:
    m = parse_matrix_document(_load_json(args.matrix))
    result = _result_skeleton("srg", {"matrix": args.matrix},
                              {"theta": args.theta, "points": args.points,
                               "ssg": args.ssg, "seed": args.seed})
    if args.ssg:
        upper, lower = tomography.plot_ssg(m, n=args.points)
        result["upper"] = _curve_payload(upper)
        result["lower"] = _curve_payload(lower)
        polys = [upper.full_polygon(), lower.full_polygon()]
    else:
        curve = graphs.theta_srg(m, args.theta, n=args.points)
        result["curve"] = _curve_payload(curve)
        try:
            ph = graphs.theta_srg_phases(m, args.theta)
            result["phase_interval"] = {"axis": ph.axis, "lo": ph.lo, "hi": ph.hi}
        except graphs.UndefinedPhaseError as exc:
            result["phase_interval"] = None
            result["diagnostics"]["phase"] = str(exc)
        polys = [curve.full_polygon()]
    _emit(result, args.output)
    if args.svg:
        _write_svg(args.svg, polys)
    return EXIT_OK


def cmd_separate(args) -> int:
    a = parse_matrix_document(_load_json(args.matrix_a))
    b = parse_matrix_document(_load_json(args.matrix_b))
    if a.shape != b.shape:
        raise InputError("the two matrices must have equal dimensions")
    result = _result_skeleton("separate", {"a": args.matrix_a, "b": args.matrix_b},
                              {"condition": args.condition, "points": args.points,
                               "seed": args.seed})
    if args.condition == "all":
        table, violations = separation.implication_audit(a, b, n=args.points, strict=False)
        result["verdicts"] = {
            cond: {"status": v.status, "margin": v.margin,
                   "witness_theta": v.witness_theta, "reason": v.reason}
            for cond, v in table.items()}
        result["implication_violations"] = violations
        any_sep = any(v.separated for v in table.values())
        _emit(result, args.output)
        if violations:
            return EXIT_NUMERIC
        return EXIT_OK if any_sep else EXIT_FAIL
    verdict = separation.check_condition(a, b, args.condition, n=args.points)
    result["verdict"] = {"status": verdict.status, "margin": verdict.margin,
                         "witness_theta": verdict.witness_theta,
                         "reason": verdict.reason}
    if verdict.witness_point is not None:
        result["verdict"]["witness_point"] = {
            "z": _pair(verdict.witness_point.z), "nu": verdict.witness_point.nu}
    if (args.condition == separation.DW_SEPARATION
            and verdict.status == separation.INTERSECTING
            and verdict.witness_point is not None):
        result["diagnostics"]["note"] = (
            "a singularizing unitary exists; recover certificate vectors from "
            "the shell samples and call construct_singularizing_unitary")
    _emit(result, args.output)
    if verdict.status == separation.SEPARATED:
        return EXIT_OK
    if verdict.status == separation.UNDECIDED:
        return EXIT_UNDECIDED
    return EXIT_FAIL


def cmd_stability(args) -> int:
    g = parse_system_document(_load_json(args.system_g))
    h = parse_system_document(_load_json(args.system_h))
    for s, path in ((g, args.system_g), (h, args.system_h)):
        if not s.is_stable:
            raise InputError(
                f"system {path!r} is unstable (spectral abscissa "
                f"{s.spectral_abscissa():.6e})")
    if args.grid:
        omegas = sorted(set(float(w) for w in args.grid))
        grid = stability.FrequencyGrid(np.array(omegas), include_infinity=not args.no_infinity)
    else:
        grid = stability.default_frequency_grid()
    result = _result_skeleton("stability", {"g": args.system_g, "h": args.system_h},
                              {"method": args.method, "mu_points": args.mu,
                               "points": args.points, "seed": args.seed,
                               "omegas": grid.points()})
    if args.method == "nyquist":
        loci, min_dist, winding = stability.nyquist_eigenloci(g, h, grid)
        result["min_distance_to_critical_ray"] = min_dist
        result["winding"] = winding
        result["loci"] = [[_pair(z) for z in row] for row in loci]
        _emit(result, args.output)
        if args.csv:
            rows = []
            for omega, row in zip(grid.points(), loci):
                for z in row:
                    rows.append([omega if math.isfinite(omega) else -1.0, z.real, z.imag])
            _write_csv(args.csv, "omega,lambda_re,lambda_im", rows)
        return EXIT_OK if (min_dist > 0 and winding == 0) else EXIT_FAIL
    if args.method == "dw":
        report = stability.stability_dw(g, h, grid, mu_points=args.mu)
    elif args.method == "theta_srg":
        report = stability.stability_theta_srg(g, h, grid, mu_points=args.mu)
    elif args.method == "gain_phase":
        report = stability.stability_gain_phase(g, h, grid)
    else:
        raise InputError(f"unknown method {args.method!r}")
    result["overall"] = report.overall
    result["notes"] = report.notes
    result["per_frequency"] = [
        {"omega": r.omega if math.isfinite(r.omega) else "inf",
         "verdict": r.verdict, "margin": r.margin,
         "witness_theta": r.witness_theta, "condition": r.condition,
         "detail": r.detail}
        for r in report.per_frequency]
    _emit(result, args.output)
    if report.certified:
        return EXIT_OK
    undecided = any(r.verdict == separation.UNDECIDED for r in report.per_frequency)
    intersecting = any(r.verdict == separation.INTERSECTING for r in report.per_frequency)
    if undecided and not intersecting and report.overall != stability.NOT_CERTIFIED:
        return EXIT_UNDECIDED
    return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dwshell",
        description="Shell-based graphical separation and MIMO stability checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shell", help="shell or inverse-shell boundary point cloud")
    p.add_argument("matrix", help="matrix JSON document")
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--nu-cap", dest="nu_cap", type=float, default=shell.DEFAULT_NU_CAP)
    p.add_argument("--output", default=None, help="result JSON path (default stdout)")
    p.add_argument("--csv", default=None, help="CSV path (columns z_re,z_im,nu)")
    p.add_argument("--svg", default=None, help="SVG path (top and side projections)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_shell)

    p = sub.add_parser("srg", help="rotated SRG (or signed variant) polygon and phases")
    p.add_argument("matrix")
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--points", type=int, default=256)
    p.add_argument("--ssg", action="store_true")
    p.add_argument("--output", default=None)
    p.add_argument("--svg", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_srg)

    p = sub.add_parser("separate", help="nonsingularity conditions for I + A U* B U")
    p.add_argument("matrix_a")
    p.add_argument("matrix_b")
    p.add_argument("--condition", default=separation.DW_SEPARATION,
                   choices=list(separation.ALL_CONDITIONS) + ["all"])
    p.add_argument("--points", type=int, default=96)
    p.add_argument("--output", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("stability", help="closed-loop stability certificates")
    p.add_argument("system_g")
    p.add_argument("system_h")
    p.add_argument("--method", default="dw",
                   choices=["dw", "theta_srg", "gain_phase", "nyquist"])
    p.add_argument("--grid", type=float, nargs="*", default=None,
                   help="explicit frequency list (default: 40 log-spaced + DC)")
    p.add_argument("--no-infinity", action="store_true")
    p.add_argument("--mu", type=int, default=stability.DEFAULT_MU_POINTS)
    p.add_argument("--points", type=int, default=96)
    p.add_argument("--output", default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_stability)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (tomography.SolverFailureError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
