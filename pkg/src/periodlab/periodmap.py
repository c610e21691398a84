r"""Periodic functions ``f``, period functions ``psi`` and the maps between them.

A period function at parameter ``nu = 2s - 1`` satisfies the three-term
equation ``psi(z) = psi(z+1) + (z+1)^(-2s) psi(z/(z+1))``. Period functions
arise here in three ways:

* from a 1-periodic ``f`` via ``psi(tau) = f(tau) - tau^(-1-nu) f(-1/tau)``,
* in closed form for the Eisenstein series,
* as Taylor polynomials built from transfer-operator eigenvectors.

All of them are wrapped as :class:`PsiEvaluator` objects that check their
domain before evaluating.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .autoforms import CoefficientSet, SpectralParam, _is_odd_int, _near_int, iota_map
from .errors import (
    BranchError,
    ContinuationError,
    DomainError,
    NoConvergence,
    PoleError,
    TruncationWarning,
)
from .specfun import _bernoulli_factors, complex_gamma, hurwitz_zeta, rgamma, riemann_zeta

__all__ = [
    "PeriodicF",
    "PsiEvaluator",
    "F_FLOOR",
    "f_from_coefficients",
    "eval_f",
    "psi_from_f",
    "f_from_psi",
    "psi_evaluator_from_f",
    "eisenstein_psi_direct",
    "eisenstein_psi_continued",
    "eisenstein_psi",
    "taylor_psi",
    "three_term_residual",
    "limit_condition_residual",
    "parity_residual",
    "capF_from_coefficients",
    "psiiotaalpha_identity_residual",
    "EISENSTEIN_PSI_CONSTANT",
]

#: Below this ``|Im tau|`` the exponential series of ``f`` converge slowly.
F_FLOOR = 0.05
#: Points closer than this to an excluded set are rejected.
CUT_TOL = 1e-8


def _cpow(z, a):
    """Principal power for arrays; ``arg z`` in ``(-pi, pi]``."""
    z = np.asarray(z, dtype=complex)
    z = z.real + 1j * (z.imag + 0.0)
    return np.exp(a * np.log(z))


# ---------------------------------------------------------------------------
# periodic functions


@dataclass(frozen=True, eq=False)
class PeriodicF:
    """A 1-periodic function on ``C \\ R`` given by two exponential series.

    ``f = A0/2 + sum A_n e^(2 pi i n tau)`` on the upper half plane and
    ``f = -A0/2 - sum A_(-n) e^(-2 pi i n tau)`` on the lower one, so
    ``f(i oo) + f(-i oo) = 0`` holds by construction.
    """

    param: SpectralParam
    A0: complex
    plus: np.ndarray
    minus: np.ndarray

    def __post_init__(self):
        for name in ("plus", "minus"):
            arr = np.array(getattr(self, name), dtype=complex).ravel()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "A0", complex(self.A0))

    @property
    def n_max(self):
        return max(len(self.plus), len(self.minus))


def f_from_coefficients(c: CoefficientSet):
    """The periodic function of a coefficient set; ``B_0`` and ``C_0`` play no part."""
    return PeriodicF(c.param, c.A0, c.plus, c.minus)


def _series(coeffs, q):
    # sum_{n>=1} coeffs[n-1] q^n for an array q, by Horner
    out = np.zeros_like(q)
    for a in coeffs[::-1]:
        out = (out + a) * q
    return out


def eval_f(f: PeriodicF, tau, floor=F_FLOOR):
    """Evaluate a :class:`PeriodicF` at points off the real axis.

    Accepts a scalar or an array. Points with ``|Im tau| < floor`` are still
    evaluated but trigger a :class:`TruncationWarning`.
    """
    scalar = np.ndim(tau) == 0
    tau = np.asarray(tau, dtype=complex)
    y = tau.imag
    if np.any(np.abs(y) < CUT_TOL):
        raise DomainError("f is not defined on the real axis")
    if np.any(np.abs(y) < floor):
        warnings.warn(
            f"|Im tau| = {np.min(np.abs(y)):.3g} is below the series floor {floor}",
            TruncationWarning, stacklevel=2,
        )
    upper = y > 0
    out = np.empty_like(tau)
    tu = tau[upper]
    out[upper] = 0.5 * f.A0 + _series(f.plus, np.exp(2j * np.pi * tu))
    tl = tau[~upper]
    out[~upper] = -0.5 * f.A0 - _series(f.minus, np.exp(-2j * np.pi * tl))
    return complex(out) if scalar else out


def psi_from_f(f: PeriodicF, tau):
    """``psi(tau) = f(tau) - tau^(-1-nu) f(-1/tau)`` with the principal power."""
    scalar = np.ndim(tau) == 0
    tau = np.asarray(tau, dtype=complex)
    nu = f.param.nu
    val = eval_f(f, tau) - _cpow(tau, -1 - nu) * eval_f(f, -1 / tau)
    return complex(val[()]) if scalar else val


def f_from_psi(psi, tau):
    """Invert :func:`psi_from_f`.

    ``f(tau) = (psi(tau) + tau^(-1-nu) psi(-1/tau)) / (1 + e^(-+ pi i nu))``,
    the upper sign on the upper half plane.

    Raises
    ------
    PoleError
        For ``nu`` in ``1 + 2Z`` where the denominator vanishes.
    """
    nu = psi.param.nu
    if _is_odd_int(nu):
        raise PoleError(f"f_from_psi is undefined for odd integer nu = {nu}")
    scalar = np.ndim(tau) == 0
    tau = np.asarray(tau, dtype=complex)
    sgn = np.where(tau.imag > 0, 1.0, -1.0)
    denom = 1 + np.exp(-sgn * 1j * np.pi * nu)
    val = (psi(tau) + _cpow(tau, -1 - nu) * psi(-1 / tau)) / denom
    return complex(val[()]) if scalar else val


# ---------------------------------------------------------------------------
# period-function evaluators


@dataclass(frozen=True, eq=False)
class PsiEvaluator:
    """A period function bundled with its parameter and domain.

    ``kind`` is one of ``from_f``, ``eisenstein_direct``,
    ``eisenstein_continued``, ``taylor_polynomial`` or ``custom``.
    ``domain`` is ``"off_real"`` (``C \\ R``), ``"cut_plane"``
    (``C \\ (-oo, 0]``) or ``("disk", center, radius)``.
    """

    kind: str
    param: SpectralParam
    func: Callable = field(repr=False)
    domain: object = "cut_plane"
    data: Optional[dict] = field(default=None, repr=False)

    def check(self, z):
        z = np.asarray(z, dtype=complex)
        if self.domain == "off_real":
            if np.any(np.abs(z.imag) < CUT_TOL):
                raise BranchError(f"{self.kind} psi is only defined off the real axis")
        elif self.domain == "cut_plane":
            bad = (np.abs(z.imag) < CUT_TOL) & (z.real < CUT_TOL)
            if np.any(bad):
                raise BranchError(f"{self.kind} psi is not defined on (-oo, 0]")
        elif isinstance(self.domain, tuple) and self.domain[0] == "disk":
            _, center, radius = self.domain
            if np.any(np.abs(z - center) >= radius):
                raise DomainError(f"point outside the disk |z - {center}| < {radius}")

    def __call__(self, z):
        scalar = np.ndim(z) == 0
        self.check(z)
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        val = np.asarray(self.func(z), dtype=complex)
        return complex(val[0]) if scalar else val


def psi_evaluator_from_f(f: PeriodicF):
    """Wrap :func:`psi_from_f` as a :class:`PsiEvaluator` on ``C \\ R``."""
    return PsiEvaluator("from_f", f.param, lambda z: psi_from_f(f, z), "off_real", {"f": f})


def taylor_psi(param, center, coeffs, radius):
    """Polynomial period function ``sum_m coeffs[m] (z - center)^m`` on a disk."""
    c = np.array(coeffs, dtype=complex)
    c.setflags(write=False)
    param = param if isinstance(param, SpectralParam) else SpectralParam(param)

    def func(z):
        return np.polynomial.polynomial.polyval(z - center, c)

    return PsiEvaluator(
        "taylor_polynomial", param, func, ("disk", complex(center), float(radius)),
        {"center": complex(center), "coeffs": c},
    )


def _as_s(s):
    return s.s if isinstance(s, SpectralParam) else complex(s)


def _check_cut(z):
    z = complex(z)
    if abs(z.imag) < CUT_TOL and z.real < CUT_TOL:
        raise BranchError(f"z = {z} lies on (-oo, 0]")
    return z


def _eisenstein_split(z):
    # Q with |Q z| large enough for the asymptotic q-tails
    return max(20, int(math.ceil(24.0 / abs(z))))


def eisenstein_psi_direct(s, z, q_max=None, bernoulli_terms=10):
    r"""Closed-form Eisenstein period function for ``Re s > 1``.

    ``pi^(-s) (s-1) (zeta(2s) (1 + z^(-2s)) / 2 + sum_(q>=1) zeta_H(2s, 1+qz))``.

    The inner ``p``-sums are Hurwitz zeta values. The ``q``-sum runs
    explicitly to ``q_max - 1``; the rest is closed by Euler-Maclaurin in
    ``q``, whose integral and derivative terms are again Hurwitz zeta values.
    """
    s = _as_s(s)
    if not s.real > 1:
        raise DomainError(f"the direct Eisenstein period function needs Re s > 1, got s = {s}")
    z = _check_cut(z)
    Q = q_max or _eisenstein_split(z)
    a = 2 * s
    q = np.arange(1, Q)
    head = np.sum(hurwitz_zeta(a, 1 + q * z)) if Q > 1 else 0j
    x = 1 + Q * z
    # derivatives g^(j)(Q) = (-z)^j (a)_j zeta_H(a + j, x) for odd j
    orders = np.arange(1, 2 * bernoulli_terms, 2)
    zh = hurwitz_zeta(np.concatenate(([a - 1, a], a + orders)), x)
    poch = np.array([complex_gamma(a + j) / complex_gamma(a) for j in orders])
    derivs = (-z) ** orders * poch * zh[2:]
    tail = zh[0] / ((a - 1) * z) + 0.5 * zh[1] - np.sum(_bernoulli_factors(bernoulli_terms) * derivs)
    total = 0.5 * riemann_zeta(a) * (1 + z ** (-a)) + head + tail
    return math.pi ** (-s) * (s - 1) * total


def eisenstein_psi_continued(s, z, K=6, q_max=None, tol=1e-10, full_output=False):
    r"""Eisenstein period function continued to ``s`` not in ``{1, 1/2}``.

    Terms ``q <= q_max`` are summed exactly. For ``q > q_max`` the Hurwitz
    values are replaced by their asymptotic expansion in powers of ``qz``
    (``K`` Bernoulli terms) and each power is summed over ``q`` as a Hurwitz
    zeta value, which supplies the continuation in ``s``.

    Raises
    ------
    PoleError
        At ``s = 1`` or ``s = 1/2``, and at nonpositive integers ``s`` where
        the continuation is only a removable limit.
    ContinuationError
        If the first omitted asymptotic term exceeds `tol` relative to the value.
    """
    s = _as_s(s)
    if abs(s - 1) < 1e-12 or abs(s - 0.5) < 1e-12:
        raise PoleError(f"the Eisenstein period function is not evaluated at s = {s}")
    if _near_int(s) and s.real < 0.5:
        raise PoleError(f"s = {s} is a removable point of the continuation; not evaluated")
    z = _check_cut(z)
    Q = q_max or _eisenstein_split(z) + 2 * K
    a = 2 * s
    q = np.arange(1, Q + 1)
    head = np.sum(hurwitz_zeta(a, 1 + q * z))
    # asymptotic coefficients c_j = B_2j/(2j)! (a)_{2j-1}, j = 1..K+1
    bf = _bernoulli_factors(K + 1)
    poch = np.empty(K + 1, dtype=complex)
    p = a
    for j in range(K + 1):
        poch[j] = p
        p = p * (a + 2 * j + 1) * (a + 2 * j + 2)
    cj = bf * poch
    b = np.concatenate(([a - 1, a], a - 1 + 2 * np.arange(1, K + 2)))
    zh = hurwitz_zeta(b, Q + 1)
    # sum_{q>Q} (qz)^(-b) = z^(-b) zeta_H(b, Q+1)
    zpow = _cpow(z, -b)
    tail = zpow[0] * zh[0] / (a - 1) - 0.5 * zpow[1] * zh[1]
    terms = cj * zpow[2:] * zh[2:]
    tail += np.sum(terms[:K])
    total = 0.5 * riemann_zeta(a) * (1 + complex(_cpow(z, -a)[()])) + head + tail
    value = math.pi ** (-s) * (s - 1) * total
    err = abs(math.pi ** (-s) * (s - 1) * terms[K])
    if err > tol * max(1.0, abs(value)):
        raise ContinuationError(f"continuation tail estimate {err:.2e} exceeds tol {tol:.2e}")
    return (value, err) if full_output else value


def eisenstein_psi(s, continued=None, **kw):
    """Eisenstein period function as a :class:`PsiEvaluator`.

    By default the direct evaluator is used when ``Re s > 1`` and the
    continued one otherwise.
    """
    s = _as_s(s)
    if continued is None:
        continued = not s.real > 1
    if continued:
        fn, kind = eisenstein_psi_continued, "eisenstein_continued"
    else:
        fn, kind = eisenstein_psi_direct, "eisenstein_direct"
        if not s.real > 1:
            raise DomainError(f"the direct Eisenstein period function needs Re s > 1, got s = {s}")

    def func(z):
        return np.array([fn(s, zz, **kw) for zz in z])

    return PsiEvaluator(kind, SpectralParam(s), func, "cut_plane")


# ---------------------------------------------------------------------------
# residuals


def three_term_residual(psi, z):
    """``psi(z) - psi(z+1) - (z+1)^(-2s) psi(z/(z+1))``."""
    z = complex(z)
    s = psi.param.s
    return psi(z) - psi(z + 1) - complex(_cpow(z + 1, -2 * s)[()]) * psi(z / (z + 1))


def parity_residual(psi, z, sign, s=None):
    """``psi(z) - sign * z^(-2s) psi(1/z)``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    z = complex(z)
    s = psi.param.s if s is None else _as_s(s)
    return psi(z) - sign * complex(_cpow(z, -2 * s)[()]) * psi(1 / z)


def _limit_row(psi, nu, odd, tau_up, tau_down, t):
    row = {"T": float(t)}
    for tau, key in ((tau_up, "plus"), (tau_down, "minus")):
        row[key] = psi(tau) + complex(_cpow(tau, -1 - nu)[()]) * psi(-1 / tau)
    row["raw"] = row["plus"] + row["minus"]
    if odd:
        row["weighted"] = row["raw"]
    else:
        row["weighted"] = (row["plus"] / (1 + np.exp(-1j * np.pi * nu))
                           + row["minus"] / (1 + np.exp(1j * np.pi * nu)))
    return row


def limit_condition_residual(psi, T=(20.0, 40.0, 80.0), x=0.0, tol=1e-6, full_output=False):
    r"""Limit condition at ``Im tau -> +-oo`` for a period function.

    With ``h(tau) = psi(tau) + tau^(-1-nu) psi(-1/tau)``, the limits of
    ``h / (1 + e^(-+ pi i nu))`` at ``+-i oo`` are ``f(+-i oo)`` for the
    periodic function attached to ``psi``. Their sum, which vanishes, is
    the returned residual. The unweighted sum of the limits of ``h`` equals
    ``-i sin(pi nu) A_0`` rather than zero and is reported as ``raw``.

    For odd integer ``nu`` the weights are undefined and the residual is
    the unweighted sum.

    Returns
    -------
    complex or dict
        The residual at the largest ``T``; with `full_output` a dict with
        ``residual``, ``raw``, ``indicator`` (change between the last two
        ``T``) and the full ``table``.

    Raises
    ------
    NoConvergence
        If the values at the last two heights differ by more than `tol`.
    """
    nu = psi.param.nu
    odd = _is_odd_int(nu)
    table = []
    with warnings.catch_warnings():
        # -1/tau sits close to the real axis by design; the T-sequence
        # indicator below measures the resulting accuracy
        warnings.simplefilter("ignore", TruncationWarning)
        for t in T:
            table.append(_limit_row(psi, nu, odd, complex(x, t), complex(x, -t), t))
    indicator = abs(table[-1]["weighted"] - table[-2]["weighted"]) if len(table) > 1 else 0.0
    if indicator > tol:
        raise NoConvergence(f"limit condition not stable in T: change {indicator:.2e}")
    res = complex(table[-1]["weighted"])
    if full_output:
        return {"residual": res, "raw": complex(table[-1]["raw"]), "indicator": indicator, "table": table}
    return res


# ---------------------------------------------------------------------------
# the function F_alpha and its relation to f of iota(alpha)


def capF_from_coefficients(c: CoefficientSet, z):
    r"""The function ``F_alpha`` built from Fourier data, on both half planes.

    On the upper half plane
    ``2i e^(i pi nu/2) / ((2pi)^nu Gamma(1-nu)) sum m^(-nu) A_m e^(2 pi i m z)
    + i e^(i pi nu/2) sin(pi nu/2) B_0`` (plus ``i A_0`` when ``nu = 0``);
    on the lower half plane every sign and ``A_m`` is flipped to ``A_(-m)``.
    ``1/Gamma(1-nu)`` is taken as zero at its poles.
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z.imag) < CUT_TOL):
        raise DomainError("F is only defined off the real axis")
    nu = c.param.nu
    m = np.arange(1, c.n_max + 1)
    weight = np.exp(-nu * np.log(m)) if c.n_max else np.zeros(0)
    lead = 2j * rgamma(1 - nu) * np.exp(-nu * math.log(2 * math.pi))
    nu0 = abs(nu) < 1e-14
    out = np.empty_like(z)
    for sgn in (1, -1):
        mask = z.imag > 0 if sgn == 1 else z.imag < 0
        coeffs = (c.plus if sgn == 1 else c.minus) * weight
        rot = np.exp(sgn * 1j * np.pi * nu / 2)
        q = np.exp(sgn * 2j * np.pi * z[mask])
        val = lead * rot * _series(coeffs, q) + 1j * rot * np.sin(np.pi * nu / 2) * c.B0
        if nu0:
            val = val + 1j * c.A0
        out[mask] = sgn * val
    return complex(out) if scalar else out


def psiiotaalpha_identity_residual(c: CoefficientSet, z_samples, full_output=False):
    r"""Compare ``F_alpha`` with ``2i sqrt(pi) e^(+-i pi nu/2) f_{iota(alpha)}``
    divided by ``Gamma((1+nu)/2) Gamma(1-nu/2)``.

    Returns the largest relative residual over `z_samples` (absolute where
    both sides vanish); `full_output` adds the per-sample table.
    """
    nu = c.param.nu
    if _is_odd_int(nu):
        raise PoleError(f"the identity is undefined for odd integer nu = {nu}")
    if _near_int(nu) and round(nu.real) >= 2 and round(nu.real) % 2 == 0:
        raise DomainError(f"the identity does not apply for nu in 2N, got nu = {nu}")
    f_iota = f_from_coefficients(iota_map(c))
    const = 2j * math.sqrt(math.pi) * rgamma((1 + nu) / 2) * rgamma(1 - nu / 2)
    rows = []
    for z in z_samples:
        z = complex(z)
        sgn = 1 if z.imag > 0 else -1
        lhs = capF_from_coefficients(c, z)
        rhs = const * np.exp(sgn * 1j * np.pi * nu / 2) * eval_f(f_iota, z)
        scale = max(abs(lhs), abs(rhs))
        err = abs(lhs - rhs)
        rows.append({"z": z, "lhs": lhs, "rhs": complex(rhs), "residual": err / scale if scale > 1e-300 else err})
    worst = max((r["residual"] for r in rows), default=0.0)
    return (worst, rows) if full_output else worst


#: ``psi_from_f(f of iota(1-2s) eps_s) = EISENSTEIN_PSI_CONSTANT(s) * eisenstein_psi(s)``
#: for the family normalization; see :func:`EISENSTEIN_PSI_CONSTANT`.
def EISENSTEIN_PSI_CONSTANT(s):
    s = _as_s(s)
    return 1j * math.sqrt(math.pi) * complex_gamma(s + 0.5) * rgamma(s)
