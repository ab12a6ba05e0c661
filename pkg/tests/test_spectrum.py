import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capspec import specfun
from capspec.radial import BoundaryCondition, EuclideanBall, SphericalCap, geometry_for_theta
from capspec.spectrum import count_negative, full_spectrum, harmonic_multiplicity, kth_eigenvalue

D = BoundaryCondition.dirichlet()


def _harmonic_dim_by_counting(n, ell):
    # homogeneous polynomials of degree ell minus those of degree ell - 2
    def homog(d):
        return math.comb(d + n - 1, n - 1) if d >= 0 else 0

    return homog(ell) - homog(ell - 2)


@given(n=st.integers(2, 9), ell=st.integers(0, 12))
def test_multiplicity_matches_polynomial_count(n, ell):
    assert harmonic_multiplicity(n, ell) == _harmonic_dim_by_counting(n, ell)


def test_multiplicity_small_cases():
    assert harmonic_multiplicity(2, 0) == 1
    assert harmonic_multiplicity(2, 5) == 2
    assert harmonic_multiplicity(3, 1) == 3
    assert harmonic_multiplicity(3, 2) == 5
    assert harmonic_multiplicity(4, 1) == 4


def test_disk_dirichlet_first_three():
    vals = full_spectrum(EuclideanBall(), 2, D, 3).values
    j01 = specfun.bessel_j_zero(0, 1) ** 2
    j11 = specfun.bessel_j_zero(1, 1) ** 2
    assert vals == pytest.approx([j01, j11, j11], rel=1e-7)


def test_cap_n3_first_eigenvalue():
    assert kth_eigenvalue(SphericalCap(math.pi / 2), 3, D, 1) == pytest.approx(3.0, rel=1e-7)


@pytest.mark.parametrize("theta", [-1.0, 0.8, 2.5])
def test_neumann_ground_state_zero(theta):
    assert abs(kth_eigenvalue(geometry_for_theta(theta), 2, BoundaryCondition.neumann(), 1)) < 1e-7


def test_disk_robin_minus_one_zeros():
    bc = BoundaryCondition.robin(-1.0)
    assert abs(kth_eigenvalue(EuclideanBall(), 2, bc, 2)) < 1e-6
    assert abs(kth_eigenvalue(EuclideanBall(), 2, bc, 3)) < 1e-6
    assert abs(kth_eigenvalue(EuclideanBall(), 2, BoundaryCondition.robin(0.0), 1)) < 1e-7


def test_spectrum_against_disk_oracle_merge():
    # merge the Bessel oracle by hand and compare the first twelve eigenvalues
    from capspec.radial import euclidean_disk_oracle

    bc = BoundaryCondition.robin(0.5)
    ref = []
    for ell in range(8):
        for v in euclidean_disk_oracle(ell, bc, 6):
            ref.extend([v] * (1 if ell == 0 else 2))
    ref = sorted(ref)[:12]
    vals = full_spectrum(EuclideanBall(), 2, bc, 12).values
    assert np.allclose(vals, ref, rtol=1e-6)


def test_spectrum_sorted_and_tagged():
    spec = full_spectrum(SphericalCap(2.0), 3, D, 10)
    vals = spec.values
    assert len(vals) == 10
    assert np.all(np.diff(vals) >= 0)
    keys = [(e.value, e.ell, e.radial_index) for e in spec.entries]
    assert keys == sorted(keys)
    # ell = 1 in n = 3 comes in triples
    ones = [e for e in spec.entries if e.ell == 1 and e.radial_index == 1]
    assert len(ones) == 3
    # every discarded angular index starts above entry k
    assert spec.ell_max >= max(e.ell for e in spec.entries)


def test_spectrum_deterministic():
    a = full_spectrum(SphericalCap(1.1), 2, BoundaryCondition.robin(-1.0), 7)
    b = full_spectrum(SphericalCap(1.1), 2, BoundaryCondition.robin(-1.0), 7)
    assert [(e.value, e.ell, e.radial_index) for e in a.entries] == [(e.value, e.ell, e.radial_index) for e in b.entries]


def test_index_out_of_range():
    spec = full_spectrum(EuclideanBall(), 2, D, 2)
    with pytest.raises(IndexError):
        spec[3]
    with pytest.raises(ValueError):
        full_spectrum(EuclideanBall(), 2, D, 0)


@pytest.mark.parametrize("theta", [-2.0, 1.0, 2.5])
def test_count_negative_examples(theta):
    si = specfun.si(theta)
    geom = geometry_for_theta(theta)
    assert count_negative(geom, 2, -1.5 / si) == 3
    assert count_negative(geom, 2, 0.5 / si) == 0
    assert count_negative(geom, 2, -1.0 / si) == 1


@pytest.mark.parametrize("alpha", [-0.3, -1.0, -1.7, -2.0, -3.2])
def test_count_negative_independent_of_theta(alpha):
    counts = {count_negative(geometry_for_theta(t), 2, alpha / specfun.si(t)) for t in (-2.7, -0.4, 0.6, 1.8, 2.9)}
    m = math.ceil(-alpha) - 1
    assert counts == {2 * m + 1}


@pytest.mark.parametrize("sigma", [1, 2, 3])
def test_steklov_zero_multiplicity(sigma):
    # at alpha = -sigma the zero eigenspace has the multiplicity of sigma in {0, 1, 1, 2, 2, ...}
    theta = 1.3
    bc = BoundaryCondition.robin(-sigma / math.sin(theta))
    vals = full_spectrum(SphericalCap(theta), 2, bc, 2 * sigma + 4).values
    zeros = int(np.sum(np.abs(vals) <= 1e-6))
    assert zeros == 2
    assert int(np.sum(vals < -1e-6)) == 2 * sigma - 1


def test_unconverged_index_only_used_as_stopping_bound():
    # near theta = pi the ell = 1 mode sits at an exact zero that the default
    # tolerance cannot resolve; it is far above the ground state, so k = 1 closes
    from capspec.radial import ConvergenceError

    bc = BoundaryCondition.robin(-1.0 / math.sin(3.1))
    spec = full_spectrum(SphericalCap(3.1), 2, bc, 1)
    assert spec[1].ell == 0 and spec[1].value < -100
    with pytest.raises(ConvergenceError) as info:
        full_spectrum(SphericalCap(3.1), 2, bc, 2)
    assert info.value.best is not None and info.value.previous is not None
