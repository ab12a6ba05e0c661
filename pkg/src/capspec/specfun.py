"""Special functions used throughout the package.

Unified curvature helpers ``si``/``ta``, modified Bessel functions I_j and K_j
of integer order (plain and exponentially scaled), their derivatives via the
standard recurrences, Bessel functions of the first kind for integer and
half-integer order, and a small bracketed bisection toolkit.

All routines are scalar and pure.
"""

import math

EULER_GAMMA = 0.57721566490153286061

# Switch point between ascending series and asymptotic expansion for I_0, I_1.
_I_SERIES_MAX = 25.0
# Switch point between ascending series and Steed's continued fraction for K.
_K_SERIES_MAX = 2.0
_RESCALE = 1e200


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def si(theta):
    """sinh|theta| for theta < 0, sin(theta) otherwise."""
    if theta < 0:
        return math.sinh(-theta)
    return math.sin(theta)


def ta(theta):
    """tanh|theta| for theta < 0, tan(theta) otherwise."""
    if theta < 0:
        return math.tanh(-theta)
    return math.tan(theta)


# ---------------------------------------------------------------------------
# Root finding


def bisect(f, lo, hi, xtol=1e-13, rtol=4e-16, maxiter=200):
    """Bisection on a bracket ``[lo, hi]`` where ``f`` changes sign.

    Uses the geometric midpoint while the bracket spans more than a factor of
    four on the positive axis, so roots near zero are resolved in relative
    terms as well.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(maxiter):
        if lo > 0 and hi > 4 * lo:
            mid = math.sqrt(lo * hi)
        else:
            mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
        if hi - lo <= max(xtol if lo > 4 * xtol else 0.0, rtol * abs(hi)):
            break
    return 0.5 * (lo + hi)


def bracket_increasing(g, level, x0=1.0, lo=None, hi=None, factor=2.0, maxsteps=2000):
    """Bracket the solution of ``g(x) = level`` for an increasing ``g`` on (0, inf).

    The bracket starts at ``[lo, hi]`` (both default to ``x0``) and grows
    geometrically outward until ``g(lo) < level <= g(hi)``.
    """
    lo = x0 if lo is None else lo
    hi = x0 if hi is None else hi
    steps = 0
    while g(hi) < level:
        hi *= factor
        steps += 1
        if steps > maxsteps or not math.isfinite(hi):
            raise ValueError("upper bracket not found")
    steps = 0
    while g(lo) >= level:
        lo /= factor
        steps += 1
        if steps > maxsteps or lo == 0.0:
            raise ValueError("lower bracket not found")
    return lo, hi


def solve_increasing(g, level, x0=1.0, lo=None, hi=None):
    """Unique root of ``g(x) = level`` for strictly increasing ``g``."""
    a, b = bracket_increasing(g, level, x0=x0, lo=lo, hi=hi)
    return bisect(lambda x: g(x) - level, a, b)


# ---------------------------------------------------------------------------
# Modified Bessel functions


def _check_order(j):
    if int(j) != j or j < 0:
        raise DomainError(f"order must be a non-negative integer, got {j}")
    return int(j)


def _i_series(nu, x):
    # sum (x/2)^(2k+nu) / (k! (k+nu)!)
    half = 0.5 * x
    term = half**nu / math.factorial(nu)
    total = term
    q = half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        if term < 1e-17 * total:
            return total


def _i_asymptotic_scaled(nu, x):
    # e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum (-1)^k a_k(nu) / x^k
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        nxt = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(nxt) >= abs(term) or abs(nxt) < 1e-17 * abs(total):
            if abs(nxt) < abs(term):
                total += nxt
            break
        term = nxt
        total += term
    return total / math.sqrt(2.0 * math.pi * x)


def _i01_scaled(nu, x):
    if x <= _I_SERIES_MAX:
        return _i_series(nu, x) * math.exp(-x)
    return _i_asymptotic_scaled(nu, x)


def bessel_i_scaled(j, x):
    """exp(-x) * I_j(x) for integer j >= 0 and x >= 0."""
    j = _check_order(j)
    if x < 0:
        raise DomainError("bessel_i requires x >= 0")
    if x == 0.0:
        return 1.0 if j == 0 else 0.0
    if j <= 1:
        return _i01_scaled(j, x)
    # Miller's downward recurrence, normalised by I_0.
    start = j + int(x) + 40 + int(6.0 * math.sqrt(j + x))
    upper, cur = 0.0, 1.0
    result = 0.0
    for k in range(start, 0, -1):
        upper, cur = cur, upper + (2.0 * k / x) * cur
        if k - 1 == j:
            result = cur
        if abs(cur) > _RESCALE:
            cur /= _RESCALE
            upper /= _RESCALE
            result /= _RESCALE
    return result / cur * _i01_scaled(0, x)


def bessel_i(j, x):
    """Modified Bessel function of the first kind I_j(x)."""
    scaled = bessel_i_scaled(j, x)
    if scaled == 0.0:
        return 0.0
    return scaled * math.exp(x)


def _k01_series(x):
    # Returns (K_0(x), K_1(x)) from the ascending series, 0 < x <= 2.
    half = 0.5 * x
    q = half * half
    log_half = math.log(half)
    i0 = _i_series(0, x)
    i1 = _i_series(1, x)
    # K_0 = -(ln(x/2) + gamma) I_0 + sum_{k>=1} q^k/(k!)^2 H_k
    s0 = 0.0
    term = 1.0
    harmonic = 0.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        harmonic += 1.0 / k
        s0 += term * harmonic
        if term * harmonic < 1e-17 * abs(s0):
            break
    k0 = -(log_half + EULER_GAMMA) * i0 + s0
    # K_1 = 1/x + ln(x/2) I_1 - (x/4) sum (psi(k+1) + psi(k+2)) q^k / (k!(k+1)!)
    s1 = 0.0
    term = 1.0
    psi_a = -EULER_GAMMA
    psi_b = 1.0 - EULER_GAMMA
    k = 0
    while True:
        contrib = term * (psi_a + psi_b)
        s1 += contrib
        k += 1
        term *= q / (k * (k + 1))
        psi_a += 1.0 / k
        psi_b += 1.0 / (k + 1)
        if abs(contrib) < 1e-17 * abs(s1) and k > 2:
            break
    k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1
    return k0, k1


def _k01_steed_scaled(x):
    # Steed's continued fraction CF2 (Temme / Thompson-Barnett), order 0.
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 100000):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < 1e-17:
            break
    h = a1 * h
    k0 = math.sqrt(math.pi / (2.0 * x)) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def _k01_scaled(x):
    if x <= _K_SERIES_MAX:
        k0, k1 = _k01_series(x)
        e = math.exp(x)
        return k0 * e, k1 * e
    return _k01_steed_scaled(x)


def bessel_k_scaled(j, x):
    """exp(x) * K_j(x) for integer j >= 0 and x > 0."""
    j = _check_order(j)
    if not x > 0:
        raise DomainError("bessel_k requires x > 0")
    k0, k1 = _k01_scaled(x)
    if j == 0:
        return k0
    # forward recurrence is stable for K
    prev, cur = k0, k1
    for k in range(1, j):
        prev, cur = cur, prev + (2.0 * k / x) * cur
    return cur


def bessel_k(j, x):
    """Modified Bessel function of the second kind K_j(x)."""
    scaled = bessel_k_scaled(j, x)
    if math.isinf(scaled):
        return scaled
    return scaled * math.exp(-x)


def bessel_i_prime_scaled(j, x):
    """exp(-x) * I_j'(x) via I_0' = I_1, I_j' = (I_{j-1} + I_{j+1}) / 2."""
    j = _check_order(j)
    if j == 0:
        return bessel_i_scaled(1, x)
    return 0.5 * (bessel_i_scaled(j - 1, x) + bessel_i_scaled(j + 1, x))


def bessel_k_prime_scaled(j, x):
    """exp(x) * K_j'(x) via K_0' = -K_1, K_j' = -(K_{j-1} + K_{j+1}) / 2."""
    j = _check_order(j)
    if j == 0:
        return -bessel_k_scaled(1, x)
    return -0.5 * (bessel_k_scaled(j - 1, x) + bessel_k_scaled(j + 1, x))


def bessel_i_prime(j, x):
    j = _check_order(j)
    if j == 0:
        return bessel_i(1, x)
    return 0.5 * (bessel_i(j - 1, x) + bessel_i(j + 1, x))


def bessel_k_prime(j, x):
    j = _check_order(j)
    if j == 0:
        return -bessel_k(1, x)
    return -0.5 * (bessel_k(j - 1, x) + bessel_k(j + 1, x))


# ---------------------------------------------------------------------------
# Bessel functions of the first kind


def _order_kind(order):
    twice = 2.0 * order
    if twice != int(twice) or order < -0.5:
        raise DomainError(f"unsupported order {order}")
    return int(twice) % 2 == 1  # True for half-integer


def _j_series(order, x):
    half = 0.5 * x
    term = half**order / math.gamma(order + 1.0)
    total = term
    q = half * half
    k = 0
    while True:
        k += 1
        term *= -q / (k * (k + order))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300) and k > 2:
            return total


def _j_integer_trapezoid(n, x):
    # J_n(x) = (1/2pi) int_0^{2pi} cos(n t - x sin t) dt, trapezoid rule on a
    # periodic analytic integrand.
    m = int(x + n) + 48
    total = 0.0
    for i in range(m):
        t = 2.0 * math.pi * i / m
        total += math.cos(n * t - x * math.sin(t))
    return total / m


def _j_half_integer(order, x):
    # upward recurrence from the closed forms of J_{-1/2} and J_{1/2}
    c = math.sqrt(2.0 / (math.pi * x))
    prev = c * math.cos(x)
    cur = c * math.sin(x)
    nu = 0.5
    if order == -0.5:
        return prev
    while nu < order:
        prev, cur = cur, (2.0 * nu / x) * cur - prev
        nu += 1.0
    return cur


def bessel_j(order, x):
    """J_order(x) for integer or half-integer order >= -1/2 and x >= 0."""
    half_integer = _order_kind(order)
    if x < 0:
        raise DomainError("bessel_j requires x >= 0")
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    if half_integer:
        if order > 0 and x <= max(2.0, order):
            return _j_series(order, x)
        return _j_half_integer(order, x)
    if x <= 2.0:
        return _j_series(order, x)
    return _j_integer_trapezoid(int(order), x)


def bessel_j_prime(order, x):
    """J_order'(x) = (J_{order-1} - J_{order+1}) / 2, with J_0' = -J_1."""
    if order == 0:
        return -bessel_j(1, x)
    return 0.5 * (bessel_j(order - 1, x) - bessel_j(order + 1, x))


def sign_change_roots(f, count, start=1e-3, step=0.1, xmax=1e4):
    """First ``count`` sign changes of ``f`` on ``(start, inf)``, each bisected."""
    roots = []
    a = start
    fa = f(a)
    while len(roots) < count:
        b = a + step
        if b > xmax:
            raise ValueError("root scan exceeded search range")
        fb = f(b)
        if fa == 0.0:
            roots.append(a)
        elif (fa > 0) != (fb > 0) and fb != 0.0:
            roots.append(bisect(f, a, b))
        a, fa = b, fb
    return roots


def bessel_j_zero(order, index):
    """The ``index``-th positive zero of J_order (index >= 1)."""
    if index < 1:
        raise DomainError("zero index starts at 1")
    _order_kind(order)
    # zeros of J_nu lie beyond nu and are spaced by more than 2.4
    start = max(1e-3, 0.5 * order)
    return sign_change_roots(lambda x: bessel_j(order, x), index, start=start, step=0.25)[-1]
