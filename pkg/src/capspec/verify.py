"""Named numerical checks of monotonicity, counting, limit and bound statements.

Each check runs on a configurable grid and returns a CheckReport with the
per-point data, the worst violation and the smallest monotone gap. Solver
failures make a check inconclusive, never passing.
"""

import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import specfun
from .exterior import annulus_mode, annulus_spectrum_numeric, exterior_mode, exterior_spectrum, negative_index
from .functionals import scaled_eigenvalue, sweep
from .radial import (
    DEFAULT_DISCRETIZATION,
    BoundaryCondition,
    ConvergenceError,
    Discretization,
    RadialProblem,
    geometry_for_theta,
    radial_eigenvalues,
)
from .spectrum import count_negative, full_spectrum

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
MIN_MONOTONE_POINTS = 10


def open_grid(lo, hi, count, include_zero=False):
    """``count`` equispaced interior points of (lo, hi), optionally with 0 added."""
    pts = list(np.linspace(lo, hi, count + 2)[1:-1])
    if include_zero and 0.0 not in pts:
        pts.append(0.0)
    return sorted(float(p) for p in pts)


# ---------------------------------------------------------------------------
# Specs and reports


@dataclass(frozen=True)
class CheckSpec:
    """Parameters of one named check; ``None`` fields take the check's defaults."""

    name: str
    thetas: tuple = None
    dims: tuple = None
    ks: tuple = None
    alphas: tuple = None
    radii: tuple = None
    tol: float = 1e-6
    slack: float = 0.0
    disc: Discretization = None
    jobs: int = 1

    def __post_init__(self):
        if self.name not in CHECKS:
            raise ValueError(f"unknown check {self.name!r}; known: {', '.join(sorted(CHECKS))}")
        if self.thetas is not None and any(t >= math.pi for t in self.thetas):
            raise ValueError("check grids must stay below pi")
        if self.radii is not None and any(r <= 1 for r in self.radii):
            raise ValueError("annulus outer radii must exceed 1")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")

    def get(self, key, default):
        value = getattr(self, key)
        return default if value is None else value


@dataclass
class CheckReport:
    name: str
    status: str
    label: str
    message: str = ""
    rows: list = field(default_factory=list)
    worst_violation: float = 0.0
    min_gap: float = None
    violations: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self):
        return self.status == PASS

    def as_dict(self, with_time=False):
        d = asdict(self)
        if not with_time:
            d.pop("wall_time")
        return _round(d)


def _round(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.generic):
        return _round(obj.item())
    return obj


class _Outcome:
    """Accumulates rows and violations while a check runs."""

    def __init__(self):
        self.rows = []
        self.violations = []
        self.worst = 0.0
        self.min_gap = None
        self.notes = []
        self.inconclusive = False

    def violate(self, amount, where):
        self.violations.append(where)
        self.worst = max(self.worst, float(amount))

    def gap(self, value):
        value = float(value)
        self.min_gap = value if self.min_gap is None else min(self.min_gap, value)


# ---------------------------------------------------------------------------
# Shared helpers


def _margin(spec, a, b):
    return max(2.0 * spec.tol * max(abs(a), abs(b)), spec.slack, 1e-12)


def _monotone(spec, out, label, thetas, values, direction):
    """Record strict monotonicity of ``values`` (direction +1 increasing, -1 decreasing)."""
    if len(values) < MIN_MONOTONE_POINTS:
        out.inconclusive = True
        out.notes.append(f"{label}: only {len(values)} points, need {MIN_MONOTONE_POINTS}")
        return
    for i in range(len(values) - 1):
        step = direction * (values[i + 1] - values[i])
        margin = _margin(spec, values[i], values[i + 1])
        out.gap(step)
        if step <= margin:
            out.violate(margin - step, f"{label} between theta={thetas[i]:.6g} and {thetas[i + 1]:.6g}")


def _sweep_rows(spec, out, points, extra):
    for p in points:
        row = {"theta": p.theta, "k": p.k, "raw": p.raw, "scale": p.scale, "scaled": p.scaled}
        row.update(extra)
        if p.alpha_normalized is not None:
            row["alpha_normalized"] = p.alpha_normalized
        if not p.ok:
            row["error"] = p.error
            out.inconclusive = True
            out.notes.append(f"solve failed at theta={p.theta:.6g}, k={p.k}")
        out.rows.append(row)


def _series(points, k):
    sel = [p for p in points if p.k == k and p.ok]
    return [p.theta for p in sel], [p.scaled for p in sel]


def _check_spacing(spec, thetas):
    if len(thetas) > 1 and min(np.diff(thetas)) <= 10 * spec.tol:
        raise ValueError("grid spacing must exceed ten times the solver tolerance")


def _monotone_sweep(spec, out, n, ks, bc, factor, thetas, direction, extra=None):
    _check_spacing(spec, thetas)
    pts = sweep(thetas, n, ks, bc, factor, spec.disc, jobs=spec.jobs)
    _sweep_rows(spec, out, pts, {"n": n, **(extra or {})})
    for k in ks:
        th, vals = _series(pts, k)
        _monotone(spec, out, f"n={n} k={k}{_extra_label(extra)}", th, vals, direction)
    return pts


def _extra_label(extra):
    if not extra:
        return ""
    return "".join(f" {k}={v:.6g}" if isinstance(v, float) else f" {k}={v}" for k, v in extra.items())


# ---------------------------------------------------------------------------
# Theorem checks


def _thm11(spec, out, factor, direction):
    thetas = spec.get("thetas", open_grid(-3, 3, 40))
    for alpha in spec.get("alphas", (1.0,)):
        if not alpha > 0:
            raise ValueError("positive-parameter checks need alpha > 0")
        bc = BoundaryCondition.robin(alpha)
        for n in spec.get("dims", (2,)):
            _monotone_sweep(spec, out, n, spec.get("ks", (1, 2, 3)), bc, factor, thetas, direction, {"alpha": alpha})


def check_thm11_ta2(spec, out):
    _thm11(spec, out, "ta2", +1)


def check_thm11_si2(spec, out):
    _thm11(spec, out, "si2", -1)


def _thm12(spec, out, factor, neg_direction):
    thetas = spec.get("thetas", open_grid(-3, 3, 40, include_zero=True))
    ks = spec.get("ks", (1, 2, 3))
    for alpha in spec.get("alphas", (-0.5, -1.0, -1.5)):
        m = negative_index(alpha)
        bc = BoundaryCondition.robin(alpha)
        _check_spacing(spec, thetas)
        pts = sweep(thetas, 2, ks, bc, factor, spec.disc, jobs=spec.jobs)
        _sweep_rows(spec, out, pts, {"n": 2, "alpha": alpha})
        for k in ks:
            th, vals = _series(pts, k)
            label = f"alpha={alpha:.6g} k={k}"
            if k <= 2 * m + 1:
                _monotone(spec, out, label + " (negative branch)", th, vals, neg_direction)
                for t, v in zip(th, vals):
                    if not v < 0:
                        out.violate(abs(v), f"{label} nonnegative at theta={t:.6g}")
            elif alpha == -m - 1 and k in (2 * m + 2, 2 * m + 3):
                for t, v in zip(th, vals):
                    raw = next(p.raw for p in pts if p.k == k and p.theta == t)
                    zero_tol = max(1e-5, spec.tol)
                    if abs(raw) > zero_tol:
                        out.violate(abs(raw), f"{label} not zero at theta={t:.6g}")
            else:
                _monotone(spec, out, label + " (positive branch)", th, vals, -neg_direction)


def check_thm12_ta2(spec, out):
    _thm12(spec, out, "ta2", -1)


def check_thm12_si2(spec, out):
    _thm12(spec, out, "si2", +1)


def check_thm13(spec, out):
    thetas = spec.get("thetas", open_grid(-3, 3, 50, include_zero=True))
    for n in spec.get("dims", (3, 4)):
        if n < 3:
            raise ValueError("this statement concerns n >= 3")
        _monotone_sweep(spec, out, n, spec.get("ks", (1, 2, 3, 4, 5)), BoundaryCondition.dirichlet(), "si2", thetas, -1)


def exact_n3_value(theta):
    """First Dirichlet eigenvalue of the 3-dimensional cap or hyperbolic ball."""
    return math.pi**2 / theta**2 + (1.0 if theta < 0 else -1.0)


def check_exact_n3(spec, out):
    thetas = spec.get("thetas", (0.5, 1.0, math.pi / 2, 2.0, -0.5, -1.0, -2.0))
    limit = max(spec.tol, 1e-12)
    for theta in thetas:
        problem = RadialProblem(geometry_for_theta(theta), 3, 0, BoundaryCondition.dirichlet())
        value = float(radial_eigenvalues(problem, spec.disc, 1)[0])
        exact = exact_n3_value(theta)
        err = abs(value - exact) / abs(exact)
        out.rows.append({"theta": theta, "value": value, "exact": exact, "rel_error": err})
        if err > limit:
            out.violate(err - limit, f"theta={theta:.6g}")


def check_negative_count(spec, out):
    thetas = spec.get("thetas", (-2.0, -1.0, 1.0, 2.0, 2.8))
    for alpha in spec.get("alphas", (-0.5, -1.0, -1.5, -2.5)):
        m = negative_index(alpha)
        expected = 2 * m + 1
        counts = []
        for theta in thetas:
            c = count_negative(geometry_for_theta(theta), 2, alpha / specfun.si(theta), spec.disc)
            counts.append(c)
            out.rows.append({"alpha": alpha, "theta": theta, "count": c, "expected": expected})
            if c != expected:
                out.violate(abs(c - expected), f"alpha={alpha:.6g} theta={theta:.6g}")
        if len(set(counts)) > 1:
            out.notes.append(f"count varies with theta at alpha={alpha:.6g}")


def check_steklov_zeros(spec, out):
    for theta in spec.get("thetas", (-1.0, 1.0, 2.0)):
        bc = BoundaryCondition.robin(-1.0 / specfun.si(theta))
        vals = full_spectrum(geometry_for_theta(theta), 2, bc, 4, spec.disc).values
        bound = 1e-5 * (1.0 + abs(vals[3]))
        out.rows.append({"theta": theta, "l1": vals[0], "l2": vals[1], "l3": vals[2], "l4": vals[3], "bound": bound})
        for k in (1, 2):
            if abs(vals[k]) > bound:
                out.violate(abs(vals[k]) - bound, f"theta={theta:.6g} k={k + 1}")


def check_exterior_limit(spec, out):
    alpha = spec.get("alphas", (-0.5,))[0]
    thetas = spec.get("thetas", (2.6, 2.8, 3.0, 3.1))
    ks = spec.get("ks", (1,))
    ext = exterior_spectrum(alpha)
    for k in ks:
        if k > len(ext):
            raise ValueError(f"k={k} exceeds the {len(ext)} negative exterior eigenvalues")
        target = ext.values[k - 1]
        vals = [scaled_eigenvalue(t, 2, k, BoundaryCondition.robin(alpha), "si2", spec.disc).scaled for t in thetas]
        for t, v in zip(thetas, vals):
            out.rows.append({"theta": t, "k": k, "scaled": v, "exterior": target, "rel_gap": abs(v - target) / abs(target)})
        for i in range(len(vals) - 1):
            step = vals[i + 1] - vals[i]
            margin = _margin(spec, vals[i], vals[i + 1])
            out.gap(step)
            if step <= margin:
                out.violate(margin - step, f"k={k} not increasing between theta={thetas[i]:.6g} and {thetas[i + 1]:.6g}")
        for t, v in zip(thetas, vals):
            if v > target:
                out.violate(v - target, f"k={k} above the exterior value at theta={t:.6g}")
        proximity = abs(vals[-1] - target) / abs(target)
        if proximity > 0.02:
            out.violate(proximity - 0.02, f"k={k} at theta={thetas[-1]:.6g}: {100 * proximity:.2f}% from the exterior value")


def check_annulus_convergence(spec, out):
    alpha = spec.get("alphas", (-2.5,))[0]
    ladder = spec.get("radii", (5.0, 10.0, 20.0, 40.0))
    js = spec.get("ks", tuple(range(negative_index(alpha) + 1)))
    for j in js:
        sigma = exterior_mode(j, alpha).sigma
        gaps = []
        for M in ladder:
            mode = annulus_mode(j, alpha, M)
            gaps.append(mode.gap)
            out.rows.append({"j": j, "M": M, "rho": mode.rho, "sigma": sigma, "gap": mode.gap, "residual": mode.residual})
            if not (mode.rho <= sigma < 0):
                out.violate(mode.rho - sigma, f"j={j} M={M:.6g}: rho <= sigma < 0 fails")
            if abs(mode.residual) > 1e-10:
                out.violate(abs(mode.residual), f"j={j} M={M:.6g}: root residual")
        for i in range(len(gaps) - 1):
            if not gaps[i + 1] < gaps[i]:
                out.violate(gaps[i + 1] - gaps[i], f"j={j}: gap not decreasing from M={ladder[i]:.6g} to {ladder[i + 1]:.6g}")
        out.gap(min(gaps[i] - gaps[i + 1] for i in range(len(gaps) - 1)) if len(gaps) > 1 else 0.0)
        if gaps[-1] > 1e-4 * abs(sigma):
            out.violate(gaps[-1] / abs(sigma) - 1e-4, f"j={j}: gap at M={ladder[-1]:.6g} above 1e-4 relative")
    # two independent methods on the smallest annulus
    M = ladder[0]
    ext = exterior_spectrum(alpha)
    numeric = annulus_spectrum_numeric(alpha, M, len(ext), spec.disc)
    roots = sorted(v for j in range(ext.m + 1) for v in [annulus_mode(j, alpha, M).rho] * (1 if j == 0 else 2))
    for i, (a, b) in enumerate(zip(numeric, roots)):
        rel = abs(a - b) / abs(b)
        out.rows.append({"M": M, "index": i + 1, "discretized": float(a), "implicit_root": b, "rel_diff": rel})
        if rel > 1e-5:
            out.violate(rel, f"M={M:.6g} eigenvalue {i + 1}: methods differ")


def bf_bounds(theta, n=4, disc=None, tol=1e-6):
    """Two-sided bounds on the first Dirichlet eigenvalue in dimension four.

    Returns (lower, upper, value, holds), with lambda_1(B^4) = j_{1,1}^2
    taken from the Bessel zero.
    """
    if n != 4:
        raise ValueError("bounds implemented for n = 4 only")
    if theta == 0:
        raise ValueError("bounds need theta != 0")
    lam_ball = specfun.bessel_j_zero(1, 1) ** 2
    base = lam_ball / theta**2
    if theta > 0:
        lower = base - 2.0
        upper = base - 0.75 * (1.0 / math.sin(theta) ** 2 - 1.0 / theta**2)
    else:
        lower = base + 2.0
        upper = base + 0.75 * (1.0 / math.sinh(theta) ** 2 - 1.0 / theta**2)
    problem = RadialProblem(geometry_for_theta(theta), 4, 0, BoundaryCondition.dirichlet())
    value = float(radial_eigenvalues(problem, disc, 1)[0])
    slop = tol * abs(value)
    holds = lower - slop <= value <= upper + slop
    return lower, upper, value, holds


def check_bf_bounds_n4(spec, out):
    for theta in spec.get("thetas", (-1.5, -1.0, -0.5, 0.5, 1.0, 1.5)):
        lower, upper, value, holds = bf_bounds(theta, 4, spec.disc, spec.tol)
        out.rows.append({"theta": theta, "lower": lower, "value": value, "upper": upper, "holds": holds})
        if not holds:
            excess = max(lower - value, value - upper)
            side = "lower" if value < lower else "upper"
            out.violate(excess, f"theta={theta:.6g}: {side} bound")


# ---------------------------------------------------------------------------
# Limit trends


TABLE_EXPECTED = {
    ("ta2", +1, "-inf"): "0",
    ("ta2", +1, "pi"): "+inf",
    ("ta2", -1, "-inf"): "0",
    ("ta2", -1, "pi"): "-inf",
    ("si2", +1, "-inf"): "+inf",
    ("si2", +1, "pi"): "0",
    ("si2", -1, "-inf"): "-inf",
    ("si2", -1, "pi"): "finite",
}


def classify_trend(values, target=None, tol=1e-6):
    """Classify three values ordered toward a limit as '0', '+inf', '-inf', 'finite' or 'inconclusive'.

    Divergence and decay need strictly monotone magnitudes whose end-to-end
    ratio is at least 2; 'finite' applies the same test to the distance from
    ``target``.
    """
    v = np.asarray(values, dtype=float)

    def shrinking(a):
        steps = a[:-1] - a[1:]
        noise = 2 * tol * np.maximum(np.abs(v[:-1]), np.abs(v[1:]))
        return bool(np.all(steps > noise)) and a[0] >= 2 * a[-1]

    if target is not None and shrinking(np.abs(v - target)):
        return "finite"
    mags = np.abs(v)
    if shrinking(mags[::-1]) and len(set(np.sign(v))) == 1:
        return "+inf" if v[-1] > 0 else "-inf"
    if shrinking(mags):
        return "0"
    return "inconclusive"


def limits_snapshot(factor, alpha, k=1, left=(-10.0, -8.0, -6.0), right=(2.9, 3.0, 3.1), disc=None, tol=1e-6):
    """Trend of the scaled k-th Robin eigenvalue (n = 2) at both ends of the aperture range.

    Returns one dict per edge with the values ordered toward the limit, the
    classification, and the expected limit for the sign of the eigenvalue.
    """
    bc = BoundaryCondition.robin(alpha)
    cells = []
    for edge, thetas in (("-inf", sorted(left, reverse=True)), ("pi", sorted(right))):
        vals = [scaled_eigenvalue(t, 2, k, bc, factor, disc).scaled for t in thetas]
        sign = 1 if vals[-1] > 0 else -1
        target = None
        if factor == "si2" and edge == "pi" and alpha < 0 and k <= 2 * negative_index(alpha) + 1:
            target = exterior_spectrum(alpha).values[k - 1]
        found = classify_trend(vals, target, tol)
        cell = {
            "factor": factor,
            "alpha": alpha,
            "k": k,
            "edge": edge,
            "thetas": list(thetas),
            "values": vals,
            "expected": TABLE_EXPECTED[(factor, sign, edge)],
            "found": found,
        }
        if target is not None:
            cell["target"] = target
            cell["proximity"] = abs(vals[-1] - target) / abs(target)
        cells.append(cell)
    return cells


def check_limits_table(spec, out):
    for factor in ("ta2", "si2"):
        for alpha in spec.get("alphas", (1.0, -0.5)):
            for k in spec.get("ks", (1,)):
                for cell in limits_snapshot(factor, alpha, k, disc=spec.disc, tol=spec.tol):
                    out.rows.append(cell)
                    if cell["found"] == "inconclusive":
                        out.notes.append(f"{factor} alpha={alpha:.6g} edge {cell['edge']}: trend inconclusive")
                        out.inconclusive = True
                    elif cell["found"] != cell["expected"]:
                        out.violate(1.0, f"{factor} alpha={alpha:.6g} k={k} edge {cell['edge']}: "
                                    f"found {cell['found']}, expected {cell['expected']}")


# ---------------------------------------------------------------------------
# Conjectures and non-monotonicity


def check_conj_neumann_si2(spec, out):
    thetas = spec.get("thetas", open_grid(-3, math.pi / 2, 40, include_zero=True))
    for n in spec.get("dims", (3,)):
        _monotone_sweep(spec, out, n, spec.get("ks", (2,)), BoundaryCondition.neumann(), "si2", thetas, -1)


def check_conj_volume_dirichlet(spec, out):
    thetas = spec.get("thetas", open_grid(-3, 3, 40, include_zero=True))
    for n in spec.get("dims", (2, 3)):
        _monotone_sweep(spec, out, n, spec.get("ks", (2,)), BoundaryCondition.dirichlet(), "volume", thetas, -1)


def check_conj_volume_neumann(spec, out):
    thetas = spec.get("thetas", open_grid(-3, 3, 40, include_zero=True))
    for n in spec.get("dims", (2, 3)):
        _monotone_sweep(spec, out, n, spec.get("ks", (2,)), BoundaryCondition.neumann(), "volume", thetas, +1)


def _nonmono(spec, out, n_default, k_default, factor):
    thetas = spec.get("thetas", open_grid(-3, 3, 40, include_zero=True))
    _check_spacing(spec, thetas)
    for n in spec.get("dims", (n_default,)):
        pts = sweep(thetas, n, spec.get("ks", (k_default,)), BoundaryCondition.dirichlet(), factor, spec.disc, jobs=spec.jobs)
        _sweep_rows(spec, out, pts, {"n": n})
        for k in spec.get("ks", (k_default,)):
            th, vals = _series(pts, k)
            steps = np.diff(vals)
            margins = np.array([_margin(spec, a, b) for a, b in zip(vals[:-1], vals[1:])])
            signs = np.where(steps > margins, 1, np.where(steps < -margins, -1, 0))
            signs = signs[signs != 0]
            changes = int(np.sum(signs[1:] != signs[:-1]))
            out.gap(float(np.min(np.abs(steps))) if len(steps) else 0.0)
            out.notes.append(f"n={n} k={k}: {changes} sign change(s) of the discrete difference")
            if changes == 0:
                out.violate(1.0, f"n={n} k={k}: no non-monotonicity detected")


def check_nonmono_geodesic(spec, out):
    _nonmono(spec, out, 3, 2, "theta2")


def check_nonmono_stereo(spec, out):
    _nonmono(spec, out, 5, 1, "ta2")


# ---------------------------------------------------------------------------
# Registry and driver


CHECKS = {
    "thm11_ta2": (check_thm11_ta2, "theorem"),
    "thm11_si2": (check_thm11_si2, "theorem"),
    "thm12_ta2": (check_thm12_ta2, "theorem"),
    "thm12_si2": (check_thm12_si2, "theorem"),
    "thm13": (check_thm13, "theorem"),
    "limits_table": (check_limits_table, "limit trends"),
    "steklov_zeros": (check_steklov_zeros, "lemma"),
    "negative_count": (check_negative_count, "lemma"),
    "exterior_limit": (check_exterior_limit, "limit"),
    "annulus_convergence": (check_annulus_convergence, "convergence"),
    "bf_bounds_n4": (check_bf_bounds_n4, "bounds"),
    "exact_n3": (check_exact_n3, "exact formula"),
    "conj_neumann_si2": (check_conj_neumann_si2, "conjecture"),
    "conj_volume_dirichlet": (check_conj_volume_dirichlet, "conjecture"),
    "conj_volume_neumann": (check_conj_volume_neumann, "conjecture"),
    "nonmono_geodesic": (check_nonmono_geodesic, "non-monotonicity"),
    "nonmono_stereo": (check_nonmono_stereo, "non-monotonicity"),
}


def _label(kind, status):
    if kind == "conjecture":
        return "numerical support" if status == PASS else "no numerical support"
    if kind == "non-monotonicity":
        return "non-monotonicity detected" if status == PASS else "non-monotonicity not detected"
    return {PASS: "consistent", FAIL: "violated", INCONCLUSIVE: "inconclusive"}[status]


def run_check(spec):
    """Run one check and return its report."""
    if isinstance(spec, str):
        spec = CheckSpec(spec)
    if spec.disc is None:
        spec = replace(spec, disc=DEFAULT_DISCRETIZATION)
    fn, kind = CHECKS[spec.name]
    out = _Outcome()
    start = time.perf_counter()
    error = None
    try:
        fn(spec, out)
    except (ConvergenceError, RuntimeError, ArithmeticError) as exc:
        error = f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if error is not None:
        status = INCONCLUSIVE
        out.notes.append(error)
    elif out.violations:
        status = FAIL
    elif out.inconclusive:
        status = INCONCLUSIVE
    else:
        status = PASS
    return CheckReport(
        name=spec.name,
        status=status,
        label=_label(kind, status),
        message="; ".join(out.notes),
        rows=out.rows,
        worst_violation=out.worst,
        min_gap=out.min_gap,
        violations=out.violations,
        wall_time=elapsed,
    )


def run_suite(names, **overrides):
    """Run several checks; reports come back ordered by name."""
    return [run_check(CheckSpec(name, **overrides)) for name in sorted(set(names))]
