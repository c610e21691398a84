r"""Complex special functions used throughout the package.

Everything here works in IEEE double precision and uses the principal branch
``z**a = exp(a*(log|z| + i*arg z))`` with ``arg z`` in ``(-pi, pi]``.

The functions accept Python scalars; :func:`hurwitz_zeta` additionally
broadcasts over numpy arrays because the transfer-matrix and Eisenstein code
call it in bulk.
"""

import cmath
import math
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli

from .errors import DomainError, PoleError, UnderflowToZero

__all__ = [
    "complex_gamma",
    "rgamma",
    "riemann_zeta",
    "hurwitz_zeta",
    "completed_zeta",
    "bessel_k",
    "whittaker_w0",
    "divisor_sum",
    "complex_pow",
    "binomial_complex",
    "EM_CUTOFF",
    "EM_ORDER",
    "KBESSEL_CROSSOVER",
]

#: Default Euler-Maclaurin direct-sum cutoff for zeta and Hurwitz zeta.
EM_CUTOFF = 40
#: Default number of Bernoulli correction terms.
EM_ORDER = 20

#: Series (through I_{+-mu}) is used when |Im mu| >= 1 and
#: x <= KBESSEL_CROSSOVER * |Im mu|; the shifted-contour integral otherwise.
KBESSEL_CROSSOVER = 0.8

_POLE_TOL = 1e-14

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _nonpositive_integer(z):
    return abs(z.imag) < _POLE_TOL and z.real < 0.5 and abs(z.real - round(z.real)) < _POLE_TOL


def _lanczos_log_gamma(z):
    # valid for Re z >= 1/2
    z = z - 1.0
    acc = _LANCZOS_P[0]
    for i in range(1, len(_LANCZOS_P)):
        acc += _LANCZOS_P[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def complex_gamma(z):
    """Gamma function of a complex argument.

    Lanczos approximation for ``Re z >= 1/2`` and the reflection formula
    ``Gamma(z) Gamma(1-z) = pi / sin(pi z)`` below that.

    Raises
    ------
    PoleError
        If `z` is a nonpositive integer.
    """
    z = complex(z)
    if _nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at z = {z}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * complex_gamma(1.0 - z))
    return cmath.exp(_lanczos_log_gamma(z))


def rgamma(z):
    """Reciprocal Gamma function; entire, zero at the nonpositive integers."""
    z = complex(z)
    if _nonpositive_integer(z):
        return 0j
    if z.real < 0.5:
        return cmath.sin(math.pi * z) * complex_gamma(1.0 - z) / math.pi
    return cmath.exp(-_lanczos_log_gamma(z))


@lru_cache(maxsize=None)
def _bernoulli_factors(order):
    # B_{2j} / (2j)! for j = 1..order
    b = bernoulli(2 * order)
    return np.array([b[2 * j] / math.factorial(2 * j) for j in range(1, order + 1)])


def hurwitz_zeta(a, x, *, cutoff=EM_CUTOFF, order=EM_ORDER):
    r"""Hurwitz zeta ``sum_{k>=0} (x+k)**(-a)``, continued in `a`.

    Euler-Maclaurin summation: `cutoff` terms are summed directly and the
    remainder is closed with the integral, the midpoint term and `order`
    Bernoulli corrections. `a` and `x` broadcast as numpy arrays.

    Raises
    ------
    PoleError
        At ``a == 1``.
    DomainError
        If `x` lies on the cut ``(-inf, 0]``. Other ``x`` with ``Re x <= 0``
        are accepted; every ``(x+k)**(-a)`` then uses the principal branch.

    Notes
    -----
    For ``Re a < 0`` the terms grow and the sum cancels, so the cutoff is
    lowered to about ``5 + |a|/(2 pi)``. The relative error is then roughly
    ``1e-16 * cutoff**(-Re a)``: near ``1e-12`` for ``Re a >= -3`` and
    useless for strongly negative ``Re a``, where :func:`riemann_zeta`
    switches to the functional equation instead.
    """
    scalar = np.isscalar(a) and np.isscalar(x)
    a = np.asarray(a, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if np.any(np.abs(a - 1.0) < _POLE_TOL):
        raise PoleError("Hurwitz zeta has a pole at a = 1")
    if np.any((x.real <= 0) & (np.abs(x.imag) < 1e-300)):
        raise DomainError("Hurwitz zeta requires x off the cut (-inf, 0]")
    if a.size and np.min(a.real) < 0:
        cutoff = min(cutoff, 5 + int(math.ceil(np.max(np.abs(a)) / (2 * math.pi))))
    if x.size and np.min(x.real) < 0:
        cutoff = cutoff + int(math.ceil(-np.min(x.real)))
    a, x = np.broadcast_arrays(a, x)
    k = np.arange(cutoff).reshape((cutoff,) + (1,) * a.ndim)
    head = np.sum((x + k) ** (-a), axis=0)
    big = x + cutoff
    tail = big ** (1.0 - a) / (a - 1.0) + 0.5 * big ** (-a)
    # term_j = B_2j/(2j)! * (a)_{2j-1} * big**(-a-2j+1)
    poch = a.copy()
    power = big ** (-a - 1.0)
    inv_big2 = big ** -2
    for j, bf in enumerate(_bernoulli_factors(order), start=1):
        tail = tail + bf * poch * power
        poch = poch * (a + 2 * j - 1) * (a + 2 * j)
        power = power * inv_big2
    out = head + tail
    return complex(out) if scalar else out


def riemann_zeta(u, *, cutoff=EM_CUTOFF, order=EM_ORDER):
    """Riemann zeta function of a complex argument (``u != 1``)."""
    u = complex(u)
    if abs(u - 1.0) < _POLE_TOL:
        raise PoleError("zeta has a pole at u = 1")
    if u.real < 0.0:
        # direct Euler-Maclaurin sums grow like N**(1-Re u); reflect instead
        if _nonpositive_integer(u / 2):
            return 0j
        w = 1.0 - u
        return (
            2.0**u * math.pi ** (u - 1.0) * cmath.sin(math.pi * u / 2)
            * complex_gamma(w) * hurwitz_zeta(w, 1.0, cutoff=cutoff, order=order)
        )
    return hurwitz_zeta(u, 1.0, cutoff=cutoff, order=order)


def completed_zeta(u):
    r"""Completed zeta ``pi**(-u/2) * Gamma(u/2) * zeta(u)``.

    Nonpositive even integers are refused rather than regularized.
    """
    u = complex(u)
    if abs(u) < _POLE_TOL or abs(u - 1.0) < _POLE_TOL:
        raise PoleError(f"completed zeta has a pole at u = {u}")
    if _nonpositive_integer(u / 2):
        raise PoleError(f"completed zeta is not evaluated at nonpositive even u = {u}")
    return math.pi ** (-u / 2) * complex_gamma(u / 2) * riemann_zeta(u)


def _bessel_k_series(mu, x):
    # K_mu = pi / (2 sin(pi mu)) * (I_{-mu} - I_mu); needs mu away from integers
    q = 0.25 * x * x
    half = 0.5 * x

    def bessel_i(m):
        term = rgamma(m + 1.0) * cmath.exp(m * math.log(half))
        total = term
        for k in range(1, 500):
            term = term * q / (k * (k + m))
            total += term
            if abs(term) <= 1e-17 * abs(total):
                break
        return total

    return math.pi / (2.0 * cmath.sin(math.pi * mu)) * (bessel_i(-mu) - bessel_i(mu))


def _bessel_k_integral(mu, x, step=0.05):
    # K_mu(x) = 1/2 int_R exp(-x cosh w + mu w) dw on the line w = u + i*beta,
    # with beta chosen so the phase is stationary at u = 0
    ratio = max(-0.93, min(0.93, mu.imag / x))
    beta = math.asin(ratio)
    cb = math.cos(beta)
    umax = math.acosh(max(1.0, (745.0 + 2.0 * abs(mu.real) * 40) / (x * cb))) + 2.0
    n = int(umax / step) + 1
    u = np.arange(-n, n + 1) * step
    w = u + 1j * beta
    vals = np.exp(-x * np.cosh(w) + mu * w)
    return complex(0.5 * step * vals.sum())


def bessel_k(mu, x):
    r"""Modified Bessel function :math:`K_\mu(x)` for complex order, real ``x > 0``.

    Two regimes. For ``|Im mu| >= 1`` and ``x <= KBESSEL_CROSSOVER*|Im mu|``
    (below the turning point) the series through :math:`I_{\pm\mu}` is free of
    cancellation. Everywhere else a trapezoid rule on the integral
    :math:`\tfrac12\int_{\mathbb R} e^{-x\cosh w + \mu w}\,dw` is used, with
    the contour shifted off the real axis so the integrand does not oscillate
    near its peak; the integrand decays double exponentially, so the plain
    trapezoid rule converges geometrically.

    Raises
    ------
    DomainError
        For ``x <= 0``.
    """
    mu = complex(mu)
    x = float(x)
    if not x > 0:
        raise DomainError(f"bessel_k requires x > 0, got {x}")
    if x > 700.0:
        # e^{-x} underflows
        import warnings

        warnings.warn(f"K_mu({x}) underflows to zero", UnderflowToZero, stacklevel=2)
        return 0j
    # K is even in mu
    if mu.real < 0 or (mu.real == 0 and mu.imag < 0):
        mu = -mu
    if abs(mu.imag) >= 1.0 and x <= KBESSEL_CROSSOVER * abs(mu.imag):
        return _bessel_k_series(mu, x)
    return _bessel_k_integral(mu, x)


def whittaker_w0(mu, y):
    r"""Whittaker function :math:`W_{0,\mu}(y) = \sqrt{y/\pi}\,K_\mu(y/2)`."""
    y = float(y)
    if not y > 0:
        raise DomainError(f"whittaker_w0 requires y > 0, got {y}")
    return math.sqrt(y / math.pi) * bessel_k(mu, y / 2.0)


def divisor_sum(w, m):
    """``sigma_w(m) = sum_{d | m} d**w`` by divisor enumeration."""
    m = int(m)
    if m < 1:
        raise DomainError(f"divisor_sum needs m >= 1, got {m}")
    w = complex(w)
    total = 0j
    d = 1
    while d * d <= m:
        if m % d == 0:
            total += cmath.exp(w * math.log(d))
            e = m // d
            if e != d:
                total += cmath.exp(w * math.log(e))
        d += 1
    return total


def complex_pow(z, a):
    """Principal-branch power ``z**a`` with ``arg z`` in ``(-pi, pi]``."""
    z = complex(z.real, z.imag + 0.0)  # arg(-x - 0i) = pi
    a = complex(a)
    if z == 0:
        if a.real > 0:
            return 0j
        raise DomainError("0**a is undefined for Re a <= 0")
    return cmath.exp(a * cmath.log(z))


def binomial_complex(a, k):
    """Generalized binomial coefficient ``prod_{j<k}(a-j) / k!``."""
    k = int(k)
    if k < 0:
        raise DomainError("binomial_complex needs k >= 0")
    a = complex(a)
    out = 1 + 0j
    for j in range(k):
        out *= (a - j) / (j + 1)
    return out
