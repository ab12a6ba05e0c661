"""Command-line front end: spectra, sweeps, exterior/annulus modes and checks."""

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, specfun
from .exterior import NoNegativeMode, annulus_mode, exterior_mode, exterior_spectrum, negative_index
from .functionals import SCALINGS, sweep
from .radial import (
    BoundaryCondition,
    ConvergenceError,
    Discretization,
    EuclideanBall,
    HyperbolicBall,
    SphericalCap,
)
from .spectrum import full_spectrum
from .verify import CHECKS, CheckSpec, run_check

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3

SWEEP_COLUMNS = ["theta", "k", "raw_eigenvalue", "scale", "scaled", "alpha_normalized"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.12g}") if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


def render(columns, rows, fmt_name, meta):
    if fmt_name == "json":
        data = [{c: _json_value(r.get(c)) for c in columns} for r in rows]
        return json.dumps({"meta": meta, "data": data}, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _default_jobs():
    raw = os.environ.get("CAPSPEC_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _bc(args):
    if args.bc == "robin":
        if args.alpha is None:
            raise UsageError("--bc robin needs --alpha")
        return BoundaryCondition.robin(args.alpha)
    if args.alpha is not None:
        raise UsageError(f"--alpha only applies to --bc robin, not {args.bc}")
    return BoundaryCondition(args.bc)


def _disc(args):
    return Discretization(grid=args.grid) if args.grid else Discretization()


def _meta(args, **extra):
    meta = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format", "func", "jobs")}
    meta.update(extra)
    meta["version"] = __version__
    return {k: _json_value(v) for k, v in meta.items()}


# ---------------------------------------------------------------------------
# Subcommands


def cmd_spectrum(args):
    bc = _bc(args)
    if args.space == "sph":
        geom = SphericalCap(args.theta)
        perimeter = math.sin(args.theta)
    elif args.space == "hyp":
        if args.theta == 0:
            raise UsageError("hyperbolic ball needs theta != 0")
        geom = HyperbolicBall(-abs(args.theta))
        perimeter = math.sinh(abs(args.theta))
    else:
        geom = EuclideanBall(args.theta)
        perimeter = args.theta
    if args.normalize_perimeter and bc.kind == "robin":
        bc = bc.with_alpha(bc.alpha / perimeter)
    spec = full_spectrum(geom, args.dim, bc, args.k, _disc(args))
    rows = [
        {"k": i + 1, "eigenvalue": e.value, "ell": e.ell, "radial_index": e.radial_index, "multiplicity": e.multiplicity}
        for i, e in enumerate(spec.entries)
    ]
    columns = ["k", "eigenvalue", "ell", "radial_index", "multiplicity"]
    meta = _meta(args, alpha_used=bc.alpha if bc.kind == "robin" else None)
    emit(render(columns, rows, args.format, meta), args.out)
    return EXIT_OK


def _theta_grid(args):
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if args.theta_min > args.theta_max:
        raise UsageError("--theta-min must not exceed --theta-max")
    grid = np.linspace(args.theta_min, args.theta_max, args.steps) if args.steps > 1 else np.array([args.theta_min])
    # linspace can land a hair away from 0; snap it to the exact Euclidean point
    span = max(abs(args.theta_min), abs(args.theta_max), 1.0)
    grid = sorted({0.0 if abs(t) < 1e-12 * span else float(t) for t in grid})
    if args.include_zero and 0.0 not in grid:
        grid = sorted(grid + [0.0])
    if args.space == "sph" and min(grid) <= 0:
        raise UsageError("--space sph needs a positive theta range")
    if args.space == "hyp" and max(grid) >= 0:
        raise UsageError("--space hyp needs a negative theta range")
    if max(grid) >= math.pi:
        raise UsageError("theta must stay below pi")
    return grid


def _point_rows(points, extra=None):
    rows = []
    for p in points:
        row = {
            "theta": p.theta,
            "k": p.k,
            "raw_eigenvalue": p.raw,
            "scale": p.scale,
            "scaled": p.scaled,
            "alpha_normalized": p.alpha_normalized,
        }
        row.update(extra or {})
        rows.append(row)
    return rows


def _report_failures(points):
    bad = [p for p in points if not p.ok]
    for p in bad:
        _stderr_json({"warning": "solve_failed", "theta": p.theta, "k": p.k, "message": p.error})
    return EXIT_SOLVER if bad else EXIT_OK


def cmd_sweep(args):
    bc = _bc(args)
    grid = _theta_grid(args)
    points = sweep(grid, args.dim, args.k_list, bc, args.functional, _disc(args), jobs=args.jobs)
    meta = _meta(args, bc_description=bc.describe())
    emit(render(SWEEP_COLUMNS, _point_rows(points), args.format, meta), args.out)
    return _report_failures(points)


def cmd_alpha_sweep(args):
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    alphas = [float(a) for a in np.linspace(args.alpha_min, args.alpha_max, args.steps)]
    rows, status = [], EXIT_OK
    for theta in sorted(args.theta_list):
        if theta >= math.pi:
            raise UsageError("theta must stay below pi")
        for alpha in alphas:
            points = sweep([theta], args.dim, args.k_list, BoundaryCondition.robin(alpha), args.functional,
                           _disc(args))
            status = max(status, _report_failures(points))
            rows.extend(_point_rows(points, {"alpha": alpha}))
    columns = ["alpha"] + SWEEP_COLUMNS
    emit(render(columns, rows, args.format, _meta(args)), args.out)
    return status


def cmd_exterior(args):
    if args.j is not None:
        mode = exterior_mode(args.j, args.alpha)
        rows = [{"index": None, "j": mode.j, "mu": mode.mu, "sigma": mode.sigma,
                 "multiplicity": 1 if mode.j == 0 else 2}]
    else:
        spec = exterior_spectrum(args.alpha)
        by_j = {m.j: m for m in spec.modes}
        rows = [
            {"index": i + 1, "j": j, "mu": by_j[j].mu, "sigma": v, "multiplicity": 1 if j == 0 else 2}
            for i, (j, v) in enumerate(zip(spec.provenance, spec.values))
        ]
    columns = ["index", "j", "mu", "sigma", "multiplicity"]
    emit(render(columns, rows, args.format, _meta(args)), args.out)
    return EXIT_OK


def cmd_annulus(args):
    radii = args.ladder if args.ladder else [args.outer]
    if radii is None or any(r is None for r in radii):
        raise UsageError("annulus needs --outer or --ladder")
    js = [args.j] if args.j is not None else list(range(negative_index(args.alpha) + 1))
    rows = []
    for j in js:
        sigma = exterior_mode(j, args.alpha).sigma
        for M in radii:
            mode = annulus_mode(j, args.alpha, M)
            rows.append({"j": j, "M": M, "omega": mode.omega, "rho": mode.rho, "sigma": sigma, "gap": mode.gap})
    columns = ["j", "M", "omega", "rho", "sigma", "gap"]
    emit(render(columns, rows, args.format, _meta(args)), args.out)
    return EXIT_OK


def cmd_verify(args):
    names = []
    for name in args.suite.split(","):
        name = name.strip()
        if name == "all":
            names.extend(CHECKS)
        elif name:
            if name not in CHECKS:
                raise UsageError(f"unknown check {name!r}; known: {', '.join(sorted(CHECKS))}, all")
            names.append(name)
    names = sorted(set(names))
    disc = _disc(args)
    reports = []
    for name in names:
        report = run_check(CheckSpec(name, tol=args.tol, disc=disc, jobs=args.jobs))
        _stderr(f"{name}: {report.status} ({report.wall_time:.2f} s)")
        reports.append(report)
    rows = [
        {
            "check": r.name,
            "status": r.status,
            "label": r.label,
            "worst_violation": r.worst_violation,
            "min_gap": r.min_gap,
            "violations": len(r.violations),
        }
        for r in reports
    ]
    columns = ["check", "status", "label", "worst_violation", "min_gap", "violations"]
    emit(render(columns, rows, args.format, _meta(args)), args.out)
    if args.json:
        payload = {"meta": _meta(args), "reports": [r.as_dict() for r in reports]}
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    if any(r.status == "fail" for r in reports):
        return EXIT_VERIFY
    if any(r.status == "inconclusive" for r in reports):
        return EXIT_SOLVER
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _common_output(p):
    p.add_argument("--out", help="write the table here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _bc_args(p, required=True):
    p.add_argument("--bc", choices=("dirichlet", "neumann", "robin"), required=required)
    p.add_argument("--alpha", type=float, help="Robin parameter")


def build_parser():
    parser = _Parser(prog="capspec", description="Laplace eigenvalues of caps, hyperbolic balls and disks.")
    parser.add_argument("--version", action="version", version=f"capspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", help="lowest eigenvalues of one domain")
    p.add_argument("--space", choices=("sph", "hyp", "euc"), required=True)
    p.add_argument("--theta", type=float, required=True, help="aperture, hyperbolic radius, or Euclidean radius")
    p.add_argument("--dim", type=int, default=2)
    _bc_args(p)
    p.add_argument("--normalize-perimeter", action="store_true", help="divide alpha by the boundary radius factor")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--grid", type=int)
    _common_output(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="scaled eigenvalues over a range of apertures")
    p.add_argument("--functional", choices=SCALINGS, required=True)
    p.add_argument("--space", choices=("auto", "sph", "hyp"), default="auto")
    p.add_argument("--dim", type=int, default=2)
    _bc_args(p)
    p.add_argument("--k-list", type=_int_list, default=[1])
    p.add_argument("--theta-min", type=float, required=True)
    p.add_argument("--theta-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--include-zero", action="store_true", help="add the Euclidean point theta = 0")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--grid", type=int)
    _common_output(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("alpha-sweep", help="scaled Robin eigenvalues over a range of alpha at fixed apertures")
    p.add_argument("--functional", choices=("ta2", "si2"), required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--theta-list", type=_float_list, required=True)
    p.add_argument("--alpha-min", type=float, required=True)
    p.add_argument("--alpha-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--k-list", type=_int_list, default=[1])
    p.add_argument("--grid", type=int)
    _common_output(p)
    p.set_defaults(func=cmd_alpha_sweep)

    p = sub.add_parser("exterior", help="negative Robin eigenvalues outside the unit disk")
    p.add_argument("--alpha", type=float, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--j", type=int)
    group.add_argument("--list", action="store_true")
    _common_output(p)
    p.set_defaults(func=cmd_exterior)

    p = sub.add_parser("annulus", help="negative Robin-Neumann modes of the annulus 1 < r < M")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--outer", type=float)
    p.add_argument("--j", type=int)
    p.add_argument("--ladder", type=_float_list)
    _common_output(p)
    p.set_defaults(func=cmd_annulus)

    p = sub.add_parser("verify", help="run named checks")
    p.add_argument("--suite", required=True, help="comma-separated check names, or 'all'")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--json", help="write full reports to this path")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--grid", type=int)
    _common_output(p)
    p.set_defaults(func=cmd_verify)
    return parser


def _stderr(text):
    sys.stderr.write(text + "\n")


def _stderr_json(obj):
    sys.stderr.write(json.dumps(obj, sort_keys=True) + "\n")


def main(argv=None):
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        code = args.func(args)
    except UsageError as exc:
        _stderr_json({"error": "validation", "message": str(exc), "exit_code": EXIT_VALIDATION})
        return EXIT_VALIDATION
    except (NoNegativeMode, specfun.DomainError, ValueError) as exc:
        _stderr_json({"error": "validation", "message": str(exc), "exit_code": EXIT_VALIDATION})
        return EXIT_VALIDATION
    except (ConvergenceError, RuntimeError, ArithmeticError) as exc:
        _stderr_json({"error": "solver", "message": f"{type(exc).__name__}: {exc}", "exit_code": EXIT_SOLVER})
        return EXIT_SOLVER
    _stderr(f"wall time {time.perf_counter() - start:.3f} s")
    return code


if __name__ == "__main__":
    sys.exit(main())
