"""Negative Robin eigenvalues outside the unit disk and on large annuli.

Outside the disk the radial mode at angular index j is K_j(mu r), and the
Robin condition on the unit circle (normal pointing into the disk) reads
mu K_j'(mu) = alpha K_j(mu). On the annulus 1 < r < M with a Neumann outer
circle the mode is a combination of K_j and I_j, and its root approaches the
exterior one as M grows.
"""

import math
from dataclasses import dataclass, field

from . import specfun
from .radial import Annulus, BoundaryCondition
from .spectrum import full_spectrum

LOG_UNDERFLOW = -700.0
# below this relative size the annulus correction is evaluated by expansion
_DIRECT_GAP_MIN = 1e-8


class NoNegativeMode(ValueError):
    """The fiber at this angular index has no negative eigenvalue (alpha + j >= 0)."""


@dataclass(frozen=True)
class ExteriorMode:
    j: int
    alpha: float
    mu: float
    sigma: float
    residual: float


@dataclass(frozen=True)
class AnnulusMode:
    j: int
    alpha: float
    M: float
    omega: float
    rho: float
    gap: float  # sigma_j - rho_j >= 0
    residual: float


@dataclass
class NegativeSpectrum:
    alpha: float
    m: int
    modes: list
    values: list = field(default_factory=list)
    provenance: list = field(default_factory=list)

    def __len__(self):
        return len(self.values)


def negative_index(alpha):
    """The integer m >= 0 with alpha in [-m-1, -m)."""
    if not alpha < 0:
        raise NoNegativeMode(f"alpha = {alpha} has no negative exterior eigenvalues")
    return math.ceil(-alpha) - 1


def _u(j, x):
    """u(x) = x K_j'(x) / K_j(x), decreasing; equals alpha at the exterior root."""
    return x * specfun.bessel_k_prime_scaled(j, x) / specfun.bessel_k_scaled(j, x)


def _check(j, alpha):
    if int(j) != j or j < 0:
        raise ValueError("angular index must be a non-negative integer")
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    if not alpha + j < 0:
        raise NoNegativeMode(f"no negative mode at j = {j} for alpha = {alpha} (needs alpha + j < 0)")


def _bracket(alpha, j):
    return 1e-8, max(4.0, 4.0 * (abs(alpha) + j))


def exterior_mode(j, alpha):
    """Root mu of x K_{j-1}(x)/K_j(x) = -(alpha + j) (x K_1/K_0 = -alpha for j = 0)."""
    _check(j, alpha)
    lo, hi = _bracket(alpha, j)
    if j == 0:
        def g(x):
            return x * specfun.bessel_k_scaled(1, x) / specfun.bessel_k_scaled(0, x)
        level = -alpha
    else:
        def g(x):
            return x * specfun.bessel_k_scaled(j - 1, x) / specfun.bessel_k_scaled(j, x)
        level = -(alpha + j)
    mu = specfun.solve_increasing(g, level, lo=lo, hi=hi)
    residual = _u(j, mu) - alpha
    return ExteriorMode(j, alpha, mu, -mu * mu, residual)


def exterior_spectrum(alpha):
    """Negative exterior eigenvalues: sigma_0 once, sigma_1..sigma_m twice each."""
    m = negative_index(alpha)
    modes = [exterior_mode(j, alpha) for j in range(m + 1)]
    values, prov = [], []
    for mode in modes:
        for _ in range(1 if mode.j == 0 else 2):
            values.append(mode.sigma)
            prov.append(mode.j)
    return NegativeSpectrum(alpha, m, modes, values, prov)


def _log_coupling(j, alpha, x, M):
    """log of T(x) = -B(x) K_j'(Mx) / (K_j(x) I_j'(Mx)) with B = x I_j' - alpha I_j.

    T is positive; the exponentials e^{-2(M-1)x} are kept in log form.
    """
    b = x * specfun.bessel_i_prime_scaled(j, x) - alpha * specfun.bessel_i_scaled(j, x)
    c = -specfun.bessel_k_prime_scaled(j, M * x) / specfun.bessel_i_prime_scaled(j, M * x)
    return -2.0 * (M - 1.0) * x + math.log(b) - math.log(specfun.bessel_k_scaled(j, x)) + math.log(c)


def _annulus_function(j, alpha, M, x):
    """G_M(x)/K_j(x) = u(x) - alpha + T(x), decreasing through its unique root."""
    lt = _log_coupling(j, alpha, x, M)
    t = 0.0 if lt < LOG_UNDERFLOW else math.exp(lt)
    return _u(j, x) - alpha + t


def annulus_mode(j, alpha, M):
    """Negative mode of the annulus 1 < r < M, Robin inside and Neumann outside."""
    _check(j, alpha)
    if not M > 1:
        raise ValueError("outer radius must exceed 1")
    ext = exterior_mode(j, alpha)
    lo, hi = _bracket(alpha, j)
    omega = specfun.solve_increasing(lambda x: -_annulus_function(j, alpha, M, x), 0.0, lo=lo, hi=hi)
    residual = _annulus_function(j, alpha, M, omega)
    rho = -omega * omega
    gap = ext.sigma - rho
    if gap <= _DIRECT_GAP_MIN * abs(ext.sigma):
        # first-order shift of the exterior root, using u' = (x^2 + j^2 - u^2)/x at u = alpha
        mu = ext.mu
        slope = (alpha * alpha - mu * mu - j * j) / mu
        lt = _log_coupling(j, alpha, mu, M)
        shift = math.exp(lt) / slope
        gap = shift * (2.0 * mu + shift)
        rho = ext.sigma - gap
    return AnnulusMode(j, alpha, M, omega, rho, gap, residual)


def annulus_spectrum_numeric(alpha, M, k, disc=None):
    """Lowest ``k`` annulus eigenvalues from the radial discretisation."""
    return full_spectrum(Annulus(M), 2, BoundaryCondition.robin(alpha), k, disc).values
