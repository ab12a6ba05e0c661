"""Radial Sturm-Liouville eigenproblems after separation of variables.

Every geometry reduces, for angular index ``ell``, to

    -(p f')' + ell (ell + n - 2) v f = lam m f

on an interval, with a Robin/Neumann/Dirichlet condition at one end and either
a pole (regular singular point at r = 0) or a Neumann end at the other. The
problem is discretised with a vertex-centred finite-volume scheme (linear
elements with lumped mass), which gives a symmetric tridiagonal stiffness
matrix and a positive diagonal mass matrix. Eigenvalues come from Sturm-sequence
bisection on the symmetrised pencil, followed by Richardson extrapolation over
successively halved meshes.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import specfun

CAP_THETA_MAX = math.pi - 1e-3

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(4)
_STEBZ_ABSTOL = 2 * np.finfo(float).tiny


class ConvergenceError(RuntimeError):
    """Richardson extrapolation did not settle to the requested tolerance.

    ``best`` and ``previous`` hold the two finest extrapolants of every
    requested eigenvalue, so callers that only need a bound can still use them.
    """

    def __init__(self, message, best=None, previous=None):
        super().__init__(message)
        self.best = best
        self.previous = previous


# ---------------------------------------------------------------------------
# Geometries


@dataclass(frozen=True)
class SphericalCap:
    """Geodesic ball of radius ``theta`` about the north pole of the unit sphere."""

    theta: float
    pole = True

    def __post_init__(self):
        if not 0 < self.theta <= CAP_THETA_MAX:
            raise ValueError(f"cap aperture must lie in (0, {CAP_THETA_MAX:.6f}], got {self.theta}")

    def interval(self):
        return 0.0, self.theta

    def p(self, x, n):
        return np.sin(x) ** (n - 1)

    def mass(self, x, n):
        return np.sin(x) ** (n - 1)

    def potential(self, x, n):
        return np.sin(x) ** (n - 3)


@dataclass(frozen=True)
class HyperbolicBall:
    """Geodesic ball of radius ``|theta|`` in hyperbolic space (``theta < 0``)."""

    theta: float
    pole = True

    def __post_init__(self):
        if not self.theta < 0:
            raise ValueError(f"hyperbolic ball needs theta < 0, got {self.theta}")

    def interval(self):
        return 0.0, -self.theta

    def p(self, x, n):
        return np.sinh(x) ** (n - 1)

    def mass(self, x, n):
        return np.sinh(x) ** (n - 1)

    def potential(self, x, n):
        return np.sinh(x) ** (n - 3)


@dataclass(frozen=True)
class EuclideanBall:
    radius: float = 1.0
    pole = True

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def interval(self):
        return 0.0, self.radius

    def p(self, x, n):
        return x ** (n - 1)

    def mass(self, x, n):
        return x ** (n - 1)

    def potential(self, x, n):
        return x ** (n - 3)


@dataclass(frozen=True)
class WeightedDisk:
    """Unit disk carrying the stereographic weight of a cap or hyperbolic ball.

    ``R`` is the stereographic radius (``ta(theta/2)``), ``curvature`` is +1 for
    caps and -1 for hyperbolic balls, and ``scaling`` selects which scaled
    eigenvalue the problem returns: ``"ta2"`` (times 4 ta^2(theta/2)),
    ``"si2"`` (times si^2(theta)) or ``"none"`` (the plain eigenvalue).
    The Robin parameter is the perimeter-normalised one, so it enters unchanged.
    """

    R: float
    curvature: int = 1
    scaling: str = "si2"
    pole = True

    def __post_init__(self):
        if self.curvature not in (1, -1):
            raise ValueError("curvature must be +1 or -1")
        if self.scaling not in ("ta2", "si2", "none"):
            raise ValueError(f"unknown scaling tag {self.scaling!r}")
        if self.R < 0 or (self.curvature < 0 and self.R >= 1):
            raise ValueError(f"invalid stereographic radius {self.R}")
        if self.scaling == "none" and self.R == 0:
            raise ValueError("R = 0 needs a scaling tag")

    def interval(self):
        return 0.0, 1.0

    def p(self, x, n):
        return x

    def mass(self, x, n):
        s = 1.0 + self.curvature * (self.R * x) ** 2
        w = 4.0 / s**2
        if self.scaling == "ta2":
            return x * w / 4.0
        if self.scaling == "si2":
            return x * w * (1.0 + self.curvature * self.R**2) ** 2 / 4.0
        return x * w * self.R**2

    def potential(self, x, n):
        return 1.0 / x


@dataclass(frozen=True)
class Annulus:
    """Annulus 1 < r < ``outer``; the boundary condition sits on the inner circle,
    the outer circle is always Neumann."""

    outer: float
    inner: float = 1.0
    pole = False

    def __post_init__(self):
        if not self.outer > self.inner:
            raise ValueError("outer radius must exceed the inner radius")

    def interval(self):
        return self.inner, self.outer

    def p(self, x, n):
        return x

    def mass(self, x, n):
        return x

    def potential(self, x, n):
        return 1.0 / x


def geometry_for_theta(theta):
    """Cap, hyperbolic ball, or Euclidean unit ball according to the sign of theta."""
    if theta < 0:
        return HyperbolicBall(theta)
    if theta == 0:
        return EuclideanBall(1.0)
    return SphericalCap(theta)


# ---------------------------------------------------------------------------
# Problem description


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("dirichlet", "neumann", "robin"):
            raise ValueError(f"unknown boundary condition {self.kind!r}")
        if not math.isfinite(self.alpha):
            raise ValueError("Robin parameter must be finite")

    @classmethod
    def dirichlet(cls):
        return cls("dirichlet")

    @classmethod
    def neumann(cls):
        return cls("neumann")

    @classmethod
    def robin(cls, alpha):
        return cls("robin", float(alpha))

    def with_alpha(self, alpha):
        return BoundaryCondition(self.kind, float(alpha)) if self.kind == "robin" else self

    def describe(self):
        if self.kind == "robin":
            return f"robin(alpha={self.alpha:.12g})"
        return self.kind


@dataclass(frozen=True)
class RadialProblem:
    geometry: object
    n: int
    ell: int
    bc: BoundaryCondition
    inner: str = "auto"  # condition at a pole: "auto", "natural" or "zero"

    def __post_init__(self):
        if self.n < 2 or int(self.n) != self.n:
            raise ValueError("dimension must be an integer >= 2")
        if self.ell < 0 or int(self.ell) != self.ell:
            raise ValueError("angular index must be a non-negative integer")
        if isinstance(self.geometry, (WeightedDisk, Annulus)) and self.n != 2:
            raise ValueError(f"{type(self.geometry).__name__} is two-dimensional only")
        if self.inner not in ("auto", "natural", "zero"):
            raise ValueError(f"unknown inner condition {self.inner!r}")
        if self.geometry.pole and self.ell >= 1 and self.inner == "natural":
            raise ValueError("ell >= 1 needs f = 0 at the pole")

    @property
    def coupling(self):
        return self.ell * (self.ell + self.n - 2)


@dataclass(frozen=True)
class Discretization:
    grid: int = 2048
    levels: int = 3
    rtol: float = 1e-6

    def __post_init__(self):
        if self.grid < 64:
            raise ValueError("grid must have at least 64 intervals")
        if self.levels not in (1, 2, 3):
            raise ValueError("levels must be 1, 2 or 3")

    def grids(self):
        return [self.grid * 2**i for i in range(self.levels)]


DEFAULT_DISCRETIZATION = Discretization()


# ---------------------------------------------------------------------------
# Assembly


@dataclass
class TridiagonalPencil:
    """K f = lam M f with K symmetric tridiagonal and M diagonal positive."""

    nodes: np.ndarray
    diag: np.ndarray
    offdiag: np.ndarray
    mass: np.ndarray

    def symmetric(self):
        """Diagonal and off-diagonal of M^{-1/2} K M^{-1/2}."""
        s = 1.0 / np.sqrt(self.mass)
        return self.diag * s * s, self.offdiag * s[:-1] * s[1:]


def _integrate(fn, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    total = np.zeros_like(mid)
    for gx, gw in zip(_GAUSS_X, _GAUSS_W):
        total += gw * fn(mid + half * gx)
    return total * half


def assemble(problem, grid):
    """Assemble the discrete pencil on ``grid`` uniform intervals."""
    geom = problem.geometry
    n = problem.n
    a, b = geom.interval()
    h = (b - a) / grid
    x = a + h * np.arange(grid + 1)
    x[-1] = b

    stiff = _integrate(lambda t: geom.p(t, n), x[:-1], x[1:]) / h**2
    lo = np.maximum(x - 0.5 * h, a)
    hi = np.minimum(x + 0.5 * h, b)
    mass = _integrate(lambda t: geom.mass(t, n), lo, hi)

    diag = np.zeros(grid + 1)
    diag[:-1] += stiff
    diag[1:] += stiff
    if problem.coupling:
        # the cell at a pole is dropped below, so the singular potential is never sampled at 0
        lo_q = lo.copy()
        if geom.pole:
            lo_q[0] = hi[0]
        diag += problem.coupling * _integrate(lambda t: geom.potential(t, n), lo_q, hi)
    off = -stiff

    keep = np.ones(grid + 1, dtype=bool)
    bc_index = 0 if isinstance(geom, Annulus) else grid
    bc = problem.bc
    if bc.kind == "dirichlet":
        keep[bc_index] = False
    elif bc.kind == "robin":
        diag[bc_index] += bc.alpha * float(geom.p(np.array([x[bc_index]]), n)[0])
    if geom.pole:
        zero = problem.inner == "zero" or (problem.inner == "auto" and problem.ell >= 1)
        if zero:
            keep[0] = False

    idx = np.flatnonzero(keep)
    if not np.all(np.diff(idx) == 1):
        raise AssertionError("kept nodes must be contiguous")
    return TridiagonalPencil(x[idx], diag[idx], off[idx[:-1]], mass[idx])


# ---------------------------------------------------------------------------
# Sturm sequences


def sturm_count(d, e, shift):
    """Number of eigenvalues of the symmetric tridiagonal (d, e) below ``shift``.

    ``shift`` may be an array; the count is returned elementwise.
    """
    shift = np.asarray(shift, dtype=float)
    tiny = np.finfo(float).tiny
    e2 = np.asarray(e, dtype=float) ** 2
    q = d[0] - shift
    count = (q < 0).astype(int)
    # a pivot of +-inf after division by a tiny pivot still has the right sign
    with np.errstate(over="ignore", divide="ignore"):
        for i in range(1, len(d)):
            q = np.where(q == 0, tiny, q)
            q = d[i] - shift - e2[i - 1] / q
            count += q < 0
    return count


def sturm_bisect(d, e, count, tol=1e-12):
    """Lowest ``count`` eigenvalues of (d, e) by vectorised Sturm bisection."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    radius = np.abs(np.concatenate(([0.0], e))) + np.abs(np.concatenate((e, [0.0])))
    lo = np.full(count, np.min(d - radius))
    hi = np.full(count, np.max(d + radius))
    target = np.arange(1, count + 1)
    scale = max(np.max(np.abs(lo)), np.max(np.abs(hi)), 1.0)
    while np.max(hi - lo) > tol * scale:
        mid = 0.5 * (lo + hi)
        below = sturm_count(d, e, mid) >= target
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return 0.5 * (lo + hi)


def pencil_eigenvalues(pencil, count):
    d, e = pencil.symmetric()
    if count > len(d):
        raise ValueError("more eigenvalues requested than unknowns")
    # abstol at the underflow threshold: small eigenvalues of strongly graded
    # pencils (large hyperbolic balls) then keep their relative accuracy
    vals = eigh_tridiagonal(
        d, e, eigvals_only=True, select="i", select_range=(0, count - 1), lapack_driver="stebz",
        tol=_STEBZ_ABSTOL,
    )
    noise = 32 * np.finfo(float).eps * float(np.max(np.abs(d)) + 2 * np.max(np.abs(e), initial=0.0))
    return np.asarray(vals), noise


# ---------------------------------------------------------------------------
# Eigenvalues


@dataclass
class RadialSolution:
    values: np.ndarray
    error: np.ndarray
    raw: list = field(default_factory=list)
    grids: list = field(default_factory=list)


def richardson(levels):
    """Extrapolate second-order values on halved meshes; returns (best, previous)."""
    table = [np.asarray(v, dtype=float) for v in levels]
    if len(table) == 1:
        return table[0], table[0]
    prev = table[-1]
    m = 0
    while len(table) > 1:
        m += 1
        factor = 4.0**m
        table = [(factor * table[i + 1] - table[i]) / (factor - 1.0) for i in range(len(table) - 1)]
        if len(table) > 1:
            prev = table[-1]
    return table[0], prev


def solve_radial(problem, count, disc=None):
    disc = disc or DEFAULT_DISCRETIZATION
    if count < 1:
        raise ValueError("count must be >= 1")
    raw = []
    noise = 0.0
    for grid in disc.grids():
        vals, nz = pencil_eigenvalues(assemble(problem, grid), count)
        raw.append(vals)
        noise = max(noise, nz)
    best, prev = richardson(raw)
    err = np.abs(best - prev)
    if disc.levels > 1:
        allowed = disc.rtol * np.abs(best) + noise
        bad = np.flatnonzero(err > allowed)
        if bad.size:
            i = bad[0]
            raise ConvergenceError(
                f"eigenvalue {i + 1} of {problem}: extrapolants {best[i]:.12g} and "
                f"{prev[i]:.12g} differ by {err[i]:.3g} > {allowed[i]:.3g}",
                best,
                prev,
            )
    return RadialSolution(best, err, raw, disc.grids())


def radial_eigenvalues(problem, disc=None, count=1):
    """The ``count`` lowest eigenvalues of ``problem``, ascending."""
    return solve_radial(problem, count, disc).values


# ---------------------------------------------------------------------------
# Independent oracle for the Euclidean unit disk


def euclidean_disk_oracle(ell, bc, count):
    """Eigenvalues of the unit disk (n = 2) at angular index ``ell`` from Bessel roots.

    Dirichlet: j_{ell,s}^2. Robin/Neumann: negative eigenvalue -x^2 from
    x I_ell'(x) + alpha I_ell(x) = 0, a zero eigenvalue when alpha = -ell, and
    positive eigenvalues x^2 from x J_ell'(x) + alpha J_ell(x) = 0.
    """
    if bc.kind == "dirichlet":
        return [specfun.bessel_j_zero(ell, s) ** 2 for s in range(1, count + 1)]
    alpha = bc.alpha if bc.kind == "robin" else 0.0
    out = []
    if -alpha > ell:
        # x I_ell'/I_ell increases from ell at 0 to infinity
        def ratio(x):
            return x * specfun.bessel_i_prime_scaled(ell, x) / specfun.bessel_i_scaled(ell, x)

        x = specfun.solve_increasing(ratio, -alpha, lo=1e-8, hi=max(4.0, 4.0 * abs(alpha)))
        out.append(-x * x)
    elif alpha == -ell:
        out.append(0.0)
    if len(out) < count:
        roots = specfun.sign_change_roots(
            lambda x: x * specfun.bessel_j_prime(ell, x) + alpha * specfun.bessel_j(ell, x),
            count - len(out),
            start=1e-3,
            step=0.05,
        )
        out.extend(r * r for r in roots)
    return out[:count]
