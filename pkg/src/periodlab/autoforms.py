r"""Fourier data of automorphic forms and their evaluators.

An automorphic hyperfunction at parameter ``nu`` is represented here only by
its Fourier data: the coefficients ``A_n`` (``n != 0``) and the constants
``A_0``, ``B_0``, ``C_0``. Maass cusp forms, holomorphic cusp forms and the
Eisenstein family are converted into this common format, and the
intertwining map ``iota(nu)`` acts on it coefficientwise.

Parameter bookkeeping: a Maass form with eigenvalue ``s(1-s)`` sits at
``nu = 2s - 1``. The Eisenstein hyperfunction ``eps_s`` sits at
``nu = 1 - 2s``, so its coefficient set carries ``SpectralParam(1 - s)``.
"""

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import (
    CoefficientError,
    DomainError,
    PoleError,
    TruncationError,
    TruncationWarning,
)
from .specfun import (
    bessel_k,
    complex_gamma,
    completed_zeta,
    divisor_sum,
    hurwitz_zeta,
    rgamma,
    riemann_zeta,
    binomial_complex,
)

__all__ = [
    "SpectralParam",
    "CoefficientSet",
    "EvalPoint",
    "eisenstein_coefficients",
    "maass_coefficients",
    "holomorphic_coefficients",
    "eval_maass",
    "eval_eisenstein_fourier",
    "eval_eisenstein_lattice",
    "iota_map",
    "modular_invariance_residual",
    "eisenstein_family_fe_residual",
    "Y_FLOOR",
]

#: Fourier evaluation below this height is refused.
Y_FLOOR = 0.1

_INT_TOL = 1e-12
_PARITY_TOL = 1e-12


def _near_int(v, tol=_INT_TOL):
    v = complex(v)
    return abs(v.imag) < tol and abs(v.real - round(v.real)) < tol


def _is_odd_int(v):
    return _near_int(v) and round(complex(v).real) % 2 == 1


def _is_positive_int(v):
    return _near_int(v) and round(complex(v).real) >= 1


@dataclass(frozen=True)
class SpectralParam:
    """The pair ``(s, nu)`` with ``nu = 2 s - 1``.

    Give exactly one of `s` or `nu`; the other is derived.
    """

    s: Optional[complex] = None
    nu: Optional[complex] = None

    def __post_init__(self):
        if self.s is None and self.nu is None:
            raise TypeError("SpectralParam needs s or nu")
        if self.s is None:
            nu = complex(self.nu)
            object.__setattr__(self, "nu", nu)
            object.__setattr__(self, "s", (nu + 1) / 2)
        elif self.nu is None:
            s = complex(self.s)
            object.__setattr__(self, "s", s)
            object.__setattr__(self, "nu", 2 * s - 1)
        else:
            s, nu = complex(self.s), complex(self.nu)
            if abs(nu - (2 * s - 1)) > 1e-14 * max(1.0, abs(nu)):
                raise ValueError(f"inconsistent spectral parameter s={s}, nu={nu}")
            object.__setattr__(self, "s", s)
            object.__setattr__(self, "nu", nu)

    @classmethod
    def from_nu(cls, nu):
        return cls(nu=nu)

    def __repr__(self):
        return f"SpectralParam(s={self.s!r}, nu={self.nu!r})"


@dataclass(frozen=True)
class EvalPoint:
    """A point of the upper half plane."""

    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not z.imag > 0:
            raise DomainError(f"evaluation point must lie in the upper half plane, got {z}")
        object.__setattr__(self, "z", z)

    @property
    def x(self):
        return self.z.real

    @property
    def y(self):
        return self.z.imag


def _as_point(z):
    return z if isinstance(z, EvalPoint) else EvalPoint(z)


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Fourier data ``{A_n, A_0, B_0, C_0}`` at one spectral parameter.

    ``plus[n-1] = A_n`` and ``minus[n-1] = A_{-n}`` for ``1 <= n <= n_max``;
    the window is always symmetric and gap free. Arrays are made read-only.
    """

    param: SpectralParam
    plus: np.ndarray
    minus: np.ndarray
    A0: complex = 0j
    B0: complex = 0j
    C0: complex = 0j
    parity: str = "none"
    kind: str = "generic"

    def __post_init__(self):
        plus = np.array(self.plus, dtype=complex).ravel()
        minus = np.array(self.minus, dtype=complex).ravel()
        if plus.shape != minus.shape:
            raise CoefficientError("plus and minus coefficient windows differ in length")
        plus.setflags(write=False)
        minus.setflags(write=False)
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)
        for name in ("A0", "B0", "C0"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.parity not in ("even", "odd", "none"):
            raise CoefficientError(f"unknown parity {self.parity!r}")
        if self.parity != "none":
            sign = 1 if self.parity == "even" else -1
            scale = max(1.0, float(np.max(np.abs(plus), initial=0.0)))
            bad = np.abs(minus - sign * plus) > _PARITY_TOL * scale
            if np.any(bad):
                n = int(np.argmax(bad)) + 1
                raise CoefficientError(
                    f"parity {self.parity} violated at n={n}: "
                    f"A_{n}={plus[n - 1]}, A_-{n}={minus[n - 1]}"
                )
        if self.C0 != 0 and not _is_positive_int(self.param.nu):
            raise CoefficientError("C_0 must vanish unless nu is a positive integer")

    @property
    def n_max(self):
        return len(self.plus)

    def A(self, n):
        """Coefficient ``A_n`` (zero outside the stored window)."""
        n = int(n)
        if n == 0:
            raise IndexError("A_0 is stored separately; use .A0")
        arr = self.plus if n > 0 else self.minus
        return complex(arr[abs(n) - 1]) if abs(n) <= len(arr) else 0j

    def as_dict(self):
        out = {n: complex(v) for n, v in enumerate(self.plus, start=1)}
        out.update({-n: complex(v) for n, v in enumerate(self.minus, start=1)})
        return out

    def is_zero(self):
        return (
            not np.any(self.plus) and not np.any(self.minus)
            and self.A0 == 0 and self.B0 == 0 and self.C0 == 0
        )


# ---------------------------------------------------------------------------
# constructors


def _window_from_mapping(a, parity):
    a = {int(n): complex(v) for n, v in a.items() if int(n) != 0}
    n_max = max((abs(n) for n in a), default=0)
    plus = np.zeros(n_max, dtype=complex)
    minus = np.zeros(n_max, dtype=complex)
    sign = {"even": 1, "odd": -1}.get(parity)
    for n in range(1, n_max + 1):
        has_p, has_m = n in a, -n in a
        if sign is not None and has_p != has_m:
            # fill the missing side from the declared parity
            if has_p:
                a[-n] = sign * a[n]
            else:
                a[n] = sign * a[-n]
        plus[n - 1] = a.get(n, 0j)
        minus[n - 1] = a.get(-n, 0j)
    return plus, minus


def eisenstein_coefficients(s, n_max=30, normalization="star"):
    r"""Fourier data of the Eisenstein hyperfunction at ``nu = 1 - 2s``.

    ``star``: ``A_n = 2 pi^(1-s) Gamma(s) sigma_{1-2s}(|n|)``,
    ``A_0 = 2 sqrt(pi) Gamma(s) / Gamma(s - 1/2) Lambda(2s - 1)``,
    ``B_0 = 2 Lambda(2s)``. ``family`` multiplies everything by
    ``1 / (2 Gamma(s - 1))``.
    """
    s = s.s if isinstance(s, SpectralParam) else complex(s)
    if normalization not in ("star", "family"):
        raise ValueError(f"unknown normalization {normalization!r}")
    # star: s in 1 + Z_{<=0}/2 excluded; family: s in {0, 1/2, 1} too
    if _near_int(2 * s) and (2 * s).real <= 2.5:
        raise PoleError(f"Eisenstein coefficients are not available at s = {s}")
    g = complex_gamma(s)
    an = np.array(
        [2 * math.pi ** (1 - s) * g * divisor_sum(1 - 2 * s, n) for n in range(1, n_max + 1)],
        dtype=complex,
    )
    A0 = 2 * math.sqrt(math.pi) * g * rgamma(s - 0.5) * completed_zeta(2 * s - 1)
    B0 = 2 * completed_zeta(2 * s)
    factor = 1.0
    if normalization == "family":
        factor = 0.5 * rgamma(s - 1)
    return CoefficientSet(
        param=SpectralParam(1 - s),
        plus=factor * an,
        minus=factor * an,
        A0=factor * A0,
        B0=factor * B0,
        parity="even",
        kind=f"eisenstein-{normalization}",
    )


def maass_coefficients(a: Mapping[int, complex], s, parity="none"):
    r"""Convert classical Maass coefficients ``a_n`` to ``A_n = (pi|n|)^s Gamma(1-s) a_n``.

    Missing indices inside the window are zero. With a declared parity a
    missing ``a_{-n}`` is filled in, while inconsistent pairs raise
    :class:`CoefficientError`.
    """
    param = s if isinstance(s, SpectralParam) else SpectralParam(s)
    s = param.s
    if _near_int(s) and s.real >= 1:
        raise PoleError(f"Gamma(1 - s) has a pole at s = {s}")
    plus, minus = _window_from_mapping(a, parity)
    g = complex_gamma(1 - s)
    n = np.arange(1, len(plus) + 1)
    scale = np.exp(s * np.log(math.pi * n)) * g
    return CoefficientSet(
        param=param, plus=scale * plus, minus=scale * minus, parity=parity, kind="maass"
    )


def holomorphic_coefficients(c: Mapping[int, complex], k):
    """Fourier data of a holomorphic cusp form of weight ``2k`` (``nu = 2k - 1``)."""
    k = int(k)
    if k < 1:
        raise DomainError("weight parameter k must be >= 1")
    if any(int(n) < 1 and v != 0 for n, v in c.items()):
        raise CoefficientError("holomorphic cusp forms have coefficients c_n for n >= 1 only")
    n_max = max((int(n) for n in c), default=0)
    plus = np.zeros(n_max, dtype=complex)
    for n, v in c.items():
        if int(n) >= 1:
            plus[int(n) - 1] = v
    factor = (-1) ** k * 4.0 ** (-k)
    return CoefficientSet(
        param=SpectralParam(nu=2 * k - 1),
        plus=factor * plus,
        minus=np.zeros(n_max, dtype=complex),
        kind="holomorphic",
    )


# ---------------------------------------------------------------------------
# evaluators


def _k_envelope(mu_re, x):
    # |K_mu(x)| <= K_{Re mu}(x) <= sqrt(pi/(2x)) e^{-x} (1 + (4 Re mu^2 + 1)/(8x)) style bound
    return math.sqrt(math.pi / (2 * x)) * math.exp(-x) * (1 + (4 * mu_re**2 + 1) / (8 * x)) * 1.5


def _whittaker_tail(mu_re, y, n0, amp, growth):
    """Bound ``sum_{n>=n0} amp * n**growth * |W_{0,mu}(4 pi n y)|``."""
    total = 0.0
    n = n0
    while True:
        term = amp * n**growth * math.sqrt(4 * n * y) * _k_envelope(mu_re, 2 * math.pi * n * y)
        total += term
        if term < 1e-30 or term < 1e-6 * total or n > n0 + 10000:
            break
        n += 1
    return total


def _default_nmax(y, tol):
    if y < Y_FLOOR:
        raise TruncationError(f"Fourier evaluation refused for y = {y} < {Y_FLOOR}")
    return max(30, int(math.ceil(math.log(1 / tol) / (2 * math.pi * y))) + 5)


def eval_maass(coeffs, z, a=None, *, tol=1e-10, full_output=True):
    r"""Evaluate ``u(z) = sum_{n != 0} a_n W_{0,s-1/2}(4 pi |n| y) e^{2 pi i n x}``.

    Parameters
    ----------
    coeffs : CoefficientSet
        Maass data; the classical ``a_n`` are recovered from ``A_n`` unless
        given explicitly as `a`.
    z : complex or EvalPoint
    a : mapping, optional
        Classical coefficients ``a_n``.
    tol : float
        A :class:`TruncationWarning` is issued when the tail estimate exceeds it.
    full_output : bool
        Return ``(value, tail_estimate)`` (default) or just the value.
    """
    p = _as_point(z)
    if p.y < Y_FLOOR:
        raise TruncationError(f"Fourier evaluation refused for y = {p.y} < {Y_FLOOR}")
    s = coeffs.param.s
    mu = s - 0.5
    n_max = coeffs.n_max
    if a is None:
        if n_max:
            g = complex_gamma(1 - s)
            n = np.arange(1, n_max + 1)
            scale = np.exp(s * np.log(math.pi * n)) * g
            plus, minus = coeffs.plus / scale, coeffs.minus / scale
        else:
            plus = minus = np.zeros(0, dtype=complex)
    else:
        plus, minus = _window_from_mapping(a, "none")
        n_max = len(plus)
    value = 0j
    for n in range(1, n_max + 1):
        ap, am = plus[n - 1], minus[n - 1]
        if ap == 0 and am == 0:
            continue
        w = math.sqrt(4 * n * p.y) * bessel_k(mu, 2 * math.pi * n * p.y)
        phase = cmath.exp(2j * math.pi * n * p.x)
        value += w * (ap * phase + am / phase)
    amp = max((abs(v) / math.sqrt(i) for i, v in enumerate(np.abs(plus) + np.abs(minus), 1)), default=0.0)
    tail = _whittaker_tail(abs(mu.real), p.y, n_max + 1, amp, 0.5) if amp else 0.0
    if tail > tol:
        warnings.warn(f"Maass tail estimate {tail:.2e} exceeds tol {tol:.2e}", TruncationWarning, stacklevel=2)
    return (value, tail) if full_output else value


def _check_eisenstein_s(s):
    if abs(s) < _INT_TOL or abs(s - 1) < _INT_TOL:
        raise PoleError(f"the Eisenstein series has a pole at s = {s}")


def eval_eisenstein_fourier(s, z, n_max=None, *, tol=1e-13, full_output=False):
    r"""Eisenstein series ``G(s; z)`` from its Fourier expansion.

    ``2 Lambda(2s) y^s + 2 Lambda(2s-1) y^(1-s)`` plus the nonconstant terms
    ``2 sigma_{2s-1}(|n|) |n|^(-s) W_{0,s-1/2}(4 pi |n| y) e^(2 pi i n x)``.
    """
    s = s.s if isinstance(s, SpectralParam) else complex(s)
    _check_eisenstein_s(s)
    p = _as_point(z)
    if n_max is None:
        n_max = _default_nmax(p.y, tol)
    elif p.y < Y_FLOOR:
        raise TruncationError(f"Fourier evaluation refused for y = {p.y} < {Y_FLOOR}")
    y = p.y
    value = 2 * completed_zeta(2 * s) * y**s + 2 * completed_zeta(2 * s - 1) * y ** (1 - s)
    mu = s - 0.5
    for n in range(1, n_max + 1):
        coef = 2 * divisor_sum(2 * s - 1, n) * n ** (-s)
        w = math.sqrt(4 * n * y) * bessel_k(mu, 2 * math.pi * n * y)
        value += coef * w * 2 * math.cos(2 * math.pi * n * p.x)
    growth = max(0.0, (2 * s - 1).real) - s.real + 1e-9
    tail = 2 * _whittaker_tail(abs(mu.real), y, n_max + 1, 2.0 * 4.0, growth + 0.5)
    if tail > tol * max(1.0, abs(value)):
        warnings.warn(f"Eisenstein tail estimate {tail:.2e} exceeds tolerance", TruncationWarning, stacklevel=2)
    return (value, tail) if full_output else value


def _row_sum(s, a, b, tol=1e-18):
    # sum_{p in Z} ((p + a)^2 + b^2)^(-s) for |a| <= 1/2, b > 0
    P = max(10, int(2 * b) + 10)
    p = np.arange(-P, P + 1)
    head = np.sum(((p + a) ** 2 + b * b) ** (-s))
    # binomial expansion of the two tails in powers of b^2/(p +- a)^2
    kmax = 80
    ks = np.arange(kmax)
    binom = np.array([binomial_complex(-s, k) for k in ks])
    weights = binom * (b * b) ** ks
    zh = hurwitz_zeta(2 * s + 2 * ks, P + 1 + a) + hurwitz_zeta(2 * s + 2 * ks, P + 1 - a)
    terms = weights * zh
    return head + np.sum(terms)


def eval_eisenstein_lattice(s, z, q_max=None, *, full_output=False):
    r"""Eisenstein series from the lattice sum ``Gamma(s) pi^(-s) sum' y^s/|qz+p|^(2s)``.

    Rows ``q = 0..q_max`` are summed over all ``p``: the central part directly
    and the two ``p``-tails by a binomial expansion in Hurwitz zeta values.
    Rows beyond `q_max` are replaced by their integral over ``p``, which is
    exact up to ``O(exp(-2 pi q_max y))``; that bound is the reported tail.

    Raises
    ------
    DomainError
        For ``Re s <= 1`` where the lattice sum diverges.
    """
    s = s.s if isinstance(s, SpectralParam) else complex(s)
    if not s.real > 1:
        raise DomainError(f"the lattice sum needs Re s > 1, got s = {s}")
    p = _as_point(z)
    x, y = p.x, p.y
    if q_max is None:
        q_max = int(math.ceil(42.0 / (2 * math.pi * y))) + 1
    total = 2 * riemann_zeta(2 * s)
    for q in range(1, q_max + 1):
        c = q * x
        a = c - round(c)
        total += 2 * _row_sum(s, a, q * y)
    # rows q > q_max: sum_p -> integral over p, error O(e^{-2 pi q y})
    row_integral = math.sqrt(math.pi) * complex_gamma(s - 0.5) / complex_gamma(s)
    total += 2 * row_integral * y ** (1 - 2 * s) * hurwitz_zeta(2 * s - 1, q_max + 1)
    value = complex_gamma(s) * math.pi ** (-s) * y**s * total
    tail = abs(value) * math.exp(-2 * math.pi * (q_max + 1) * y) * 10
    return (value, tail) if full_output else value


# ---------------------------------------------------------------------------
# intertwining map


def iota_map(c):
    r"""Apply ``iota(nu)``, mapping Fourier data at ``nu`` to data at ``-nu``.

    ``A_n -> (pi|n|)^(-nu) Gamma((1+nu)/2) / Gamma((1-nu)/2) A_n`` and the
    constant terms mix as ``B_0 <- A_0`` (or ``C_0`` for ``nu`` in ``2N``),
    ``A_0 <- B_0`` and ``C_0 <- B_0`` (for ``nu`` in ``-2N``). ``iota(0)``
    is the identity.

    Raises
    ------
    PoleError
        For ``nu`` in ``1 + 2Z`` where the map is not an isomorphism.
    """
    nu = c.param.nu
    if _is_odd_int(nu):
        raise PoleError(f"iota(nu) is not defined for odd integer nu = {nu}")
    target = SpectralParam(nu=-nu)
    if abs(nu) < _INT_TOL:
        return CoefficientSet(target, c.plus, c.minus, c.A0, c.B0, c.C0, c.parity, c.kind)
    nu_int = _near_int(nu)
    nu_r = round(nu.real) if nu_int else None
    ratio = complex_gamma((1 + nu) / 2) * rgamma((1 - nu) / 2)
    n = np.arange(1, c.n_max + 1)
    scale = np.exp(-nu * np.log(math.pi * n)) * ratio
    # B_0
    if not (nu_int and nu_r >= 0):
        B0 = complex_gamma(-nu / 2) * rgamma((1 - nu) / 2) / math.sqrt(math.pi) * c.A0
    else:  # nu in 2N
        B0 = rgamma((1 + nu) / 2) * c.C0
    # A_0; rgamma gives 0 for nu in -2N
    A0 = math.sqrt(math.pi) * complex_gamma((1 + nu) / 2) * rgamma(nu / 2) * c.B0
    # C_0
    C0 = complex_gamma((1 + nu) / 2) * c.B0 if (nu_int and nu_r < 0) else 0j
    return CoefficientSet(
        target, scale * c.plus, scale * c.minus, A0, B0, C0, c.parity, f"iota({c.kind})"
    )


# ---------------------------------------------------------------------------
# diagnostics


def modular_invariance_residual(evaluator, z_samples):
    r"""Tabulate ``|u(-1/z) - u(z)|`` over sample points.

    For exact data (Eisenstein series) this is a numerical identity check;
    for ingested Maass coefficients it measures data quality.

    Returns
    -------
    dict
        ``rows`` (one dict per sample, input order) and ``max_abs`` /
        ``max_rel`` over the samples.
    """
    rows = []
    for z in z_samples:
        z = complex(z)
        if not z.imag > 0:
            raise DomainError(f"sample {z} is not in the upper half plane")
        u = complex(evaluator(z))
        v = complex(evaluator(-1 / z))
        diff = abs(v - u)
        scale = max(abs(u), abs(v))
        rows.append({"z": z, "u": u, "u_inv": v, "abs": diff, "rel": diff / scale if scale else 0.0})
    return {
        "rows": rows,
        "max_abs": max((r["abs"] for r in rows), default=0.0),
        "max_rel": max((r["rel"] for r in rows), default=0.0),
    }


def _componentwise_residual(lhs, rhs):
    pairs = [("A0", lhs.A0, rhs.A0), ("B0", lhs.B0, rhs.B0), ("C0", lhs.C0, rhs.C0)]
    pairs += [(f"A{n}", lhs.A(n), rhs.A(n)) for n in range(1, lhs.n_max + 1)]
    pairs += [(f"A{-n}", lhs.A(-n), rhs.A(-n)) for n in range(1, lhs.n_max + 1)]
    out = {}
    for name, u, v in pairs:
        scale = max(abs(u), abs(v))
        out[name] = abs(u - v) / scale if scale else 0.0
    return out


def eisenstein_family_fe_residual(s, n_max=30):
    r"""Check the functional equation of the Eisenstein family coefficientwise.

    Compares ``Gamma(-s) eps_(1-s)`` with ``Gamma(s-1) iota(1-2s) eps_s``;
    ``iota`` acts on ``eps_s`` at its own parameter ``nu = 1 - 2s``.

    Returns
    -------
    dict
        ``components`` (relative residual per coefficient) and ``max``.
    """
    s = s.s if isinstance(s, SpectralParam) else complex(s)
    if _near_int(s):
        raise PoleError(f"the family functional equation needs s not in Z, got {s}")
    lhs_set = eisenstein_coefficients(1 - s, n_max, "family")
    rhs_set = iota_map(eisenstein_coefficients(s, n_max, "family"))
    lhs = _scaled(lhs_set, complex_gamma(-s))
    rhs = _scaled(rhs_set, complex_gamma(s - 1))
    comps = _componentwise_residual(lhs, rhs)
    return {"components": comps, "max": max(comps.values())}


def _scaled(c, factor):
    return CoefficientSet(
        c.param, factor * c.plus, factor * c.minus, factor * c.A0, factor * c.B0,
        factor * c.C0, c.parity, c.kind,
    )
