"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import math
import time

import numpy as np

from capspec import specfun
from capspec.exterior import exterior_spectrum
from capspec.radial import BoundaryCondition, EuclideanBall, RadialProblem, euclidean_disk_oracle, geometry_for_theta
from capspec.radial import radial_eigenvalues
from capspec.verify import CheckSpec, run_check

DIRICHLET = BoundaryCondition.dirichlet()


def _first_dirichlet(theta, n=3):
    start = time.perf_counter()
    value = float(radial_eigenvalues(RadialProblem(geometry_for_theta(theta), n, 0, DIRICHLET), count=1)[0])
    return value, time.perf_counter() - start


def _exact_rows(thetas, exact):
    worst_err, worst_time = 0.0, 0.0
    for theta in thetas:
        value, elapsed = _first_dirichlet(theta)
        worst_err = max(worst_err, abs(value - exact(theta)) / abs(exact(theta)))
        worst_time = max(worst_time, elapsed)
    return worst_err, worst_time


def _describe(report):
    text = f"{report.name}: {report.status} ({report.label}), worst violation {report.worst_violation:.3g}"
    if report.violations:
        text += f"; first: {report.violations[0]}"
    return text


def test_criterion_01_exact_spherical_n3(verdict):
    err, slowest = _exact_rows([0.5, 1.0, math.pi / 2, 2.0], lambda t: math.pi**2 / t**2 - 1)
    ok = err <= 1e-6 and slowest < 1.0
    verdict(1, ok, f"max rel error {err:.2e}, slowest solve {slowest:.2f} s")
    assert ok


def test_criterion_02_exact_hyperbolic_n3(verdict):
    err, slowest = _exact_rows([-0.5, -1.0, -2.0], lambda t: math.pi**2 / t**2 + 1)
    ok = err <= 1e-6 and slowest < 1.0
    verdict(2, ok, f"max rel error {err:.2e}, slowest solve {slowest:.2f} s")
    assert ok


def test_criterion_03_euclidean_oracle(verdict):
    worst = 0.0
    bcs = [DIRICHLET, BoundaryCondition.neumann(), BoundaryCondition.robin(-1.0), BoundaryCondition.robin(1.0)]
    for bc in bcs:
        for ell in range(4):
            num = radial_eigenvalues(RadialProblem(EuclideanBall(), 2, ell, bc), count=5)
            ref = np.array(euclidean_disk_oracle(ell, bc, 5))
            # exact zeros (Neumann ell = 0, Robin -1 at ell = 1) are compared on an absolute scale
            worst = max(worst, float(np.max(np.abs(num - ref) / np.maximum(np.abs(ref), 1.0))))
    ok = worst <= 1e-6
    verdict(3, ok, f"max rel deviation {worst:.2e} over 4 conditions x ell 0..3 x 5 modes")
    assert ok


def test_criterion_04_dirichlet_si2_decreasing(verdict):
    start = time.perf_counter()
    report = run_check(CheckSpec("thm13", dims=(3, 4), ks=(1, 2, 3, 4, 5), jobs=4))
    elapsed = time.perf_counter() - start
    points = sum(1 for r in report.rows if r["n"] == 3 and r["k"] == 1)
    ok = report.passed and points == 51 and report.min_gap > 2 * 1e-6 and elapsed < 120
    verdict(4, ok, f"{_describe(report)}, {points} points, min decrement {report.min_gap:.3g}, {elapsed:.1f} s")
    assert ok


def test_criterion_05_positive_robin_monotone(verdict):
    reports = [run_check(CheckSpec(name, alphas=(1.0,), dims=(2,), ks=(1, 2, 3), jobs=4))
               for name in ("thm11_ta2", "thm11_si2")]
    ok = all(r.passed for r in reports)
    verdict(5, ok, "; ".join(_describe(r) for r in reports))
    assert ok


def test_criterion_06_negative_count(verdict):
    report = run_check(CheckSpec("negative_count", alphas=(-0.5, -1.0, -1.5, -2.5), thetas=(-2.0, -1.0, 1.0, 2.0, 2.8)))
    per_alpha = {}
    for row in report.rows:
        per_alpha.setdefault(row["alpha"], set()).add(row["count"])
    uniform = all(len(v) == 1 for v in per_alpha.values())
    ok = report.passed and uniform
    counts = ", ".join(f"{a:g}->{sorted(v)}" for a, v in sorted(per_alpha.items()))
    verdict(6, ok, f"counts {counts}")
    assert ok


def test_criterion_07_steklov_zeros(verdict):
    report = run_check(CheckSpec("steklov_zeros", thetas=(-1.0, 1.0, 2.0)))
    worst = max(max(abs(r["l2"]), abs(r["l3"])) / (1 + abs(r["l4"])) for r in report.rows)
    ok = report.passed and worst <= 1e-5
    verdict(7, ok, f"max |l2|,|l3| / (1+|l4|) = {worst:.2e}")
    assert ok


def test_criterion_08_exterior_limit(verdict):
    report = run_check(CheckSpec("exterior_limit", alphas=(-0.5,), thetas=(2.6, 2.8, 3.0, 3.1), ks=(1,)))
    target = exterior_spectrum(-0.5).values[0]
    last = report.rows[-1]
    values = ", ".join(f"{r['scaled']:.6g}" for r in report.rows)
    ok = report.passed
    verdict(8, ok, f"values {values}; exterior {target:.6g}; gap at 3.1 {100 * last['rel_gap']:.2f}% (limit 2%)")
    assert ok


def test_criterion_09_annulus_to_exterior(verdict):
    report = run_check(CheckSpec("annulus_convergence", alphas=(-2.5,), radii=(5.0, 10.0, 20.0, 40.0), ks=(0, 1, 2)))
    last = [r for r in report.rows if r.get("M") == 40.0 and "gap" in r]
    rel = max(r["gap"] / abs(r["sigma"]) for r in last)
    ok = report.passed
    verdict(9, ok, f"{_describe(report)}; max relative gap at M=40 {rel:.2e}")
    assert ok


def test_criterion_10_two_sided_bounds(verdict):
    report = run_check(CheckSpec("bf_bounds_n4", thetas=(-1.5, -1.0, -0.5, 0.5, 1.0, 1.5)))
    j11 = specfun.bessel_j_zero(1, 1)
    ok = report.passed
    verdict(10, ok, f"{_describe(report)}; j_11^2 = {j11**2:.10g}")
    assert ok


def test_criterion_11_limit_table(verdict):
    report = run_check(CheckSpec("limits_table", alphas=(1.0, -0.5), ks=(1,)))
    cells = [f"{c['factor']} a={c['alpha']:g} {c['edge']}: {c['found']}" for c in report.rows]
    ok = report.passed and len(cells) == 8
    verdict(11, ok, "; ".join(cells))
    assert ok


def test_criterion_12_conjecture_support(verdict):
    specs = [
        CheckSpec("conj_neumann_si2", dims=(3,), ks=(2,), jobs=4),
        CheckSpec("conj_volume_dirichlet", dims=(2, 3), ks=(2,), jobs=4),
        CheckSpec("conj_volume_neumann", dims=(2, 3), ks=(2,), jobs=4),
        CheckSpec("nonmono_geodesic", dims=(3,), ks=(2,), jobs=4),
        CheckSpec("nonmono_stereo", dims=(5,), ks=(1,), jobs=4),
    ]
    reports = [run_check(s) for s in specs]
    expected = {"conj": "numerical support", "nonmono": "non-monotonicity detected"}
    ok = all(r.label == expected[r.name.split("_")[0]] for r in reports)
    verdict(12, ok, "non-blocking; " + "; ".join(f"{r.name}: {r.label}" for r in reports))
    assert ok
