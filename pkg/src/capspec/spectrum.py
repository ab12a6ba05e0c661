"""Full eigenvalue sequences assembled from radial spectra over angular indices."""

import math
from dataclasses import dataclass, field

import numpy as np

from .radial import (
    DEFAULT_DISCRETIZATION,
    BoundaryCondition,
    ConvergenceError,
    RadialProblem,
    solve_radial,
)

ELL_MARGIN = 0.05
MAX_ELL = 400


@dataclass(frozen=True)
class ModeEigenvalue:
    value: float
    ell: int
    radial_index: int
    multiplicity: int

    def sort_key(self):
        return (self.value, self.ell, self.radial_index)


@dataclass
class Spectrum:
    """Ascending eigenvalues repeated by multiplicity, each tagged with its mode."""

    entries: list
    ell_max: int
    k_max: int
    modes: list = field(default_factory=list)

    @property
    def values(self):
        return np.array([e.value for e in self.entries])

    def __getitem__(self, k):
        """Entry ``k`` counted from 1."""
        if not 1 <= k <= len(self.entries):
            raise IndexError(f"eigenvalue index {k} outside 1..{len(self.entries)}")
        return self.entries[k - 1]


def harmonic_multiplicity(n, ell):
    """Dimension of the degree-``ell`` spherical harmonics on S^{n-1}."""
    if ell == 0:
        return 1
    if n == 2:
        return 2
    return (2 * ell + n - 2) * math.factorial(ell + n - 3) // (math.factorial(ell) * math.factorial(n - 2))


def _zero_tol(value):
    return 1e-6 * max(1.0, abs(value))


def _radial(geometry, n, ell, bc, count, disc):
    problem = RadialProblem(geometry, n, ell, bc)
    return solve_radial(problem, count, disc).values


def full_spectrum(geometry, n, bc, k, disc=None):
    """The first ``k`` eigenvalues of the Laplacian on ``geometry``.

    Angular indices are added until the radial ground state at the next index
    lies beyond the current k-th candidate by a safety margin; the radial
    ground state increases with the index, so nothing below is missed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    disc = disc or DEFAULT_DISCRETIZATION
    modes = []
    ell = 0
    while True:
        mult = harmonic_multiplicity(n, ell)
        count = max(1, math.ceil(k / mult))
        expanded = _expand(modes)
        threshold = None
        if len(expanded) >= k:
            kth = expanded[k - 1].value
            threshold = kth + ELL_MARGIN * abs(kth) + _zero_tol(kth)
        try:
            vals = _radial(geometry, n, ell, bc, count, disc)
        except ConvergenceError as exc:
            # the stopping test only needs a lower bound on the ground state
            if threshold is not None and min(exc.best[0], exc.previous[0]) > threshold:
                break
            raise
        if threshold is not None and vals[0] > threshold:
            break
        modes.extend(ModeEigenvalue(float(v), ell, i + 1, mult) for i, v in enumerate(vals))
        ell += 1
        if ell > MAX_ELL:
            raise RuntimeError("angular index limit reached before the spectrum closed")
    return Spectrum(_expand(modes)[:k], ell_max=ell - 1, k_max=k, modes=sorted(modes, key=ModeEigenvalue.sort_key))


def _expand(modes):
    out = []
    for m in sorted(modes, key=ModeEigenvalue.sort_key):
        out.extend([m] * m.multiplicity)
    return out


def kth_eigenvalue(geometry, n, bc, k, disc=None):
    return full_spectrum(geometry, n, bc, k, disc)[k].value


def count_negative(geometry, n, alpha, disc=None):
    """Number of negative Robin eigenvalues counted with multiplicity.

    ``alpha`` is applied to the boundary as given. Values within 1e-6 of zero
    are classified as zero, not negative.
    """
    disc = disc or DEFAULT_DISCRETIZATION
    bc = BoundaryCondition.robin(alpha)
    total = 0
    for ell in range(MAX_ELL + 1):
        count = 2
        while True:
            vals = _radial(geometry, n, ell, bc, count, disc)
            if vals[-1] >= -_zero_tol(vals[-1]):
                break
            count *= 2
        neg = int(np.sum(vals < -np.array([_zero_tol(v) for v in vals])))
        if neg == 0:
            return total
        total += neg * harmonic_multiplicity(n, ell)
    raise RuntimeError("angular index limit reached while counting negative eigenvalues")
