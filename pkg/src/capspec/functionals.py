"""Scaled eigenvalue functionals of caps and hyperbolic balls as functions of the aperture."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma

from .radial import EuclideanBall, geometry_for_theta
from .spectrum import full_spectrum
from .specfun import si, ta

SCALINGS = ("ta2", "si2", "theta2", "volume")


def sphere_area(n):
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2) / gamma(n / 2)


def volume(theta, n):
    """n-dimensional volume of the cap (theta > 0) or hyperbolic ball (theta < 0)."""
    if theta == 0:
        return 0.0
    fn = math.sin if theta > 0 else math.sinh
    integral, _ = quad(lambda t: fn(t) ** (n - 1), 0.0, abs(theta), epsabs=0.0, epsrel=1e-13, limit=200)
    return sphere_area(n) * integral


def unit_ball_volume(n):
    return sphere_area(n) / n


@dataclass(frozen=True)
class ScalingFactor:
    """Multiplier applied to the eigenvalue: 4 ta^2(theta/2), si^2, theta^2 or V^{2/n}."""

    tag: str

    def __post_init__(self):
        if self.tag not in SCALINGS:
            raise ValueError(f"unknown scaling {self.tag!r}; expected one of {', '.join(SCALINGS)}")

    def __call__(self, theta, n):
        if theta == 0:
            # value carried by the Euclidean unit ball convention
            return unit_ball_volume(n) ** (2.0 / n) if self.tag == "volume" else 1.0
        if self.tag == "ta2":
            return 4.0 * ta(theta / 2) ** 2
        if self.tag == "si2":
            return si(theta) ** 2
        if self.tag == "theta2":
            return float(theta) ** 2
        return volume(theta, n) ** (2.0 / n)


@dataclass(frozen=True)
class FunctionalPoint:
    theta: float
    k: int
    n: int
    bc: str
    raw: float
    scale: float
    scaled: float
    alpha_normalized: float = None
    error: str = None

    @property
    def ok(self):
        return self.error is None

    def as_dict(self):
        return asdict(self)


def normalized_alpha(bc, theta):
    """Perimeter-normalised Robin parameter alpha/si(theta); alpha itself at theta = 0."""
    if bc.kind != "robin":
        return None
    return bc.alpha if theta == 0 else bc.alpha / si(theta)


def _geometry(theta):
    return EuclideanBall(1.0) if theta == 0 else geometry_for_theta(theta)


def _check_theta(theta):
    if not math.isfinite(theta) or theta >= math.pi:
        raise ValueError(f"aperture must be finite and below pi, got {theta}")


def _points_at(theta, n, ks, bc, factor, disc):
    alpha_n = normalized_alpha(bc, theta)
    solve_bc = bc.with_alpha(alpha_n) if alpha_n is not None else bc
    spec = full_spectrum(_geometry(theta), n, solve_bc, max(ks), disc)
    scale = float(factor(theta, n))
    out = []
    for k in ks:
        raw = float(spec[k].value)
        out.append(FunctionalPoint(float(theta), k, n, bc.describe(), raw, scale, raw * scale, alpha_n))
    return out


def scaled_eigenvalue(theta, n, k, bc, factor, disc=None):
    """The k-th eigenvalue at aperture ``theta`` times the chosen scaling.

    A Robin ``bc`` carries the unnormalised parameter; it is divided by
    si(theta) before solving. At theta = 0 the Euclidean unit ball is used.
    """
    _check_theta(theta)
    if isinstance(factor, str):
        factor = ScalingFactor(factor)
    return _points_at(theta, n, [k], bc, factor, disc)[0]


def sweep(theta_grid, n, k_list, bc, factor, disc=None, jobs=1):
    """Scaled eigenvalues on a grid of apertures, ordered by (theta, k).

    A failed solve produces points with NaN values and the error message
    rather than aborting the sweep.
    """
    thetas = [float(t) for t in theta_grid]
    for t in thetas:
        _check_theta(t)
    if any(b < a for a, b in zip(thetas, thetas[1:])):
        raise ValueError("theta grid must be sorted ascending")
    ks = sorted(set(int(k) for k in k_list))
    if not ks or ks[0] < 1:
        raise ValueError("k values must be >= 1")
    if isinstance(factor, str):
        factor = ScalingFactor(factor)

    def one(theta):
        try:
            return _points_at(theta, n, ks, bc, factor, disc)
        except (RuntimeError, ValueError, ArithmeticError) as exc:
            nan = float("nan")
            alpha_n = normalized_alpha(bc, theta)
            return [
                FunctionalPoint(theta, k, n, bc.describe(), nan, nan, nan, alpha_n, f"{type(exc).__name__}: {exc}")
                for k in ks
            ]

    if jobs > 1 and len(thetas) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(one, thetas))
    else:
        chunks = [one(t) for t in thetas]
    return [p for chunk in chunks for p in chunk]


def series(points, k):
    """(theta, scaled) arrays for index ``k`` from a sweep, failures dropped."""
    sel = [p for p in points if p.k == k and p.ok]
    return np.array([p.theta for p in sel]), np.array([p.scaled for p in sel])

