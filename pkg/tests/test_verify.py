import json
import math

import pytest

from capspec import specfun
from capspec.radial import Discretization
from capspec.verify import (
    CHECKS,
    CheckSpec,
    bf_bounds,
    classify_trend,
    exact_n3_value,
    limits_snapshot,
    open_grid,
    run_check,
    run_suite,
)


def test_open_grid():
    g = open_grid(-3, 3, 40)
    assert len(g) == 40 and min(g) > -3 and max(g) < 3
    assert 0.0 not in g
    g0 = open_grid(-3, 3, 40, include_zero=True)
    assert len(g0) == 41 and 0.0 in g0 and g0 == sorted(g0)


def test_registry_names():
    assert set(CHECKS) == {
        "thm11_ta2", "thm11_si2", "thm12_ta2", "thm12_si2", "thm13", "limits_table", "steklov_zeros",
        "negative_count", "exterior_limit", "annulus_convergence", "bf_bounds_n4", "exact_n3",
        "conj_neumann_si2", "conj_volume_dirichlet", "conj_volume_neumann", "nonmono_geodesic", "nonmono_stereo",
    }


def test_spec_validation():
    with pytest.raises(ValueError):
        CheckSpec("no_such_check")
    with pytest.raises(ValueError):
        CheckSpec("thm13", thetas=(1.0, math.pi))
    with pytest.raises(ValueError):
        CheckSpec("thm13", tol=0.0)


@pytest.mark.parametrize(
    "values,target,expected",
    [
        ([1.0, 4.0, 20.0], None, "+inf"),
        ([-1.0, -4.0, -20.0], None, "-inf"),
        ([1.0, 0.3, 0.05], None, "0"),
        ([-1.0, -0.3, -0.05], None, "0"),
        ([-0.2, -0.1, -0.06], -0.05, "finite"),
        ([1.0, 1.1, 1.2], None, "inconclusive"),
        ([1.0, 1.0, 1.0], None, "inconclusive"),
        ([1.0, 5.0, 3.0], None, "inconclusive"),
    ],
)
def test_classify_trend(values, target, expected):
    assert classify_trend(values, target) == expected


def test_classify_trend_noise_margin():
    # steps below the noise margin never count as a trend
    assert classify_trend([1.0, 0.5, 0.25], tol=0.5) == "inconclusive"


def test_exact_n3_value():
    assert exact_n3_value(1.0) == pytest.approx(math.pi**2 - 1)
    assert exact_n3_value(-1.0) == pytest.approx(math.pi**2 + 1)


def test_bf_bounds_positive_theta_holds():
    lower, upper, value, holds = bf_bounds(1.0)
    j11 = specfun.bessel_j_zero(1, 1) ** 2
    assert lower == pytest.approx(j11 - 2)
    assert lower <= value <= upper
    assert holds


def test_bf_bounds_lower_hyperbolic():
    lower, upper, value, holds = bf_bounds(-1.0)
    assert lower == pytest.approx(specfun.bessel_j_zero(1, 1) ** 2 + 2)
    assert value >= lower


def test_bf_bounds_small_theta_ratio():
    lower, upper, _, _ = bf_bounds(0.02, disc=Discretization(256, levels=2, rtol=1e-3))
    assert upper / lower == pytest.approx(1.0, abs=2e-3)


def test_bf_bounds_validation():
    with pytest.raises(ValueError):
        bf_bounds(1.0, n=3)
    with pytest.raises(ValueError):
        bf_bounds(0.0)


def test_exact_n3_check_passes():
    report = run_check("exact_n3")
    assert report.status == "pass" and report.label == "consistent"
    assert max(r["rel_error"] for r in report.rows) <= 1e-6


def test_monotone_check_needs_enough_points():
    report = run_check(CheckSpec("thm13", thetas=(0.5, 1.0, 1.5), dims=(3,), ks=(1,)))
    assert report.status == "inconclusive"
    assert "need 10" in report.message


def test_thm13_small_grid_passes():
    spec = CheckSpec("thm13", thetas=tuple(open_grid(-3, 3, 12, include_zero=True)), dims=(3,), ks=(1,))
    report = run_check(spec)
    assert report.status == "pass"
    assert report.min_gap > 0
    assert len(report.rows) == 13


def test_failing_report_names_the_point():
    # thm13 asserts a decrease; the slack forces every step to count as a violation
    spec = CheckSpec("thm13", thetas=tuple(open_grid(-3, 3, 12)), dims=(3,), ks=(1,), slack=1e6)
    report = run_check(spec)
    assert report.status == "fail" and report.label == "violated"
    assert report.violations and "theta=" in report.violations[0] and "k=1" in report.violations[0]
    assert report.worst_violation > 0


def test_solver_failure_is_inconclusive():
    spec = CheckSpec("exact_n3", thetas=(2.0,), disc=Discretization(64, levels=2, rtol=1e-15))
    report = run_check(spec)
    assert report.status == "inconclusive"
    assert "ConvergenceError" in report.message


def test_grid_spacing_rule():
    with pytest.raises(ValueError):
        run_check(CheckSpec("thm13", thetas=tuple(0.5 + 1e-7 * i for i in range(12)), dims=(3,), ks=(1,)))


def test_conjecture_label():
    spec = CheckSpec("conj_volume_dirichlet", thetas=tuple(open_grid(-2, 2, 10, include_zero=True)), dims=(2,))
    report = run_check(spec)
    assert report.status == "pass"
    assert report.label == "numerical support"
    assert "verified" not in report.label


def test_report_is_deterministic_and_serialisable():
    spec = CheckSpec("steklov_zeros")
    a = run_check(spec).as_dict()
    b = run_check(spec).as_dict()
    assert a == b
    assert "wall_time" not in a
    json.dumps(a)


def test_run_suite_orders_by_name():
    reports = run_suite(["steklov_zeros", "exact_n3"])
    assert [r.name for r in reports] == ["exact_n3", "steklov_zeros"]


def test_limits_snapshot_ta2_positive():
    cells = limits_snapshot("ta2", 1.0)
    by_edge = {c["edge"]: c for c in cells}
    assert by_edge["pi"]["found"] == "+inf"
    assert by_edge["-inf"]["found"] == "0"
