r"""The transfer operator ``L_s psi(z) = sum_(n>=0) (z+n)^(-2s) psi(1 + 1/(z+n))``.

With ``phi(w) = psi(1+w)`` this becomes the Gauss-map operator
``sum_(m>=1) (w+m)^(-2s) phi(1/(w+m))``, which is nuclear on functions
analytic in ``|w-1| < 3/2``. The module truncates it in the Taylor basis
``(w-1)^m``, ``m < N``, scans the critical line ``s = 1/2 + it`` for
eigenvalues passing through ``+1`` or ``-1`` and turns the eigenvectors
back into period functions.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.special import comb

from .autoforms import SpectralParam
from .errors import (
    ConvergenceError,
    DomainError,
    NoConvergence,
    PoleError,
    PoleGuard,
    PoleGuardWarning,
    TailDivergence,
)
from .periodmap import (
    PsiEvaluator,
    eisenstein_psi,
    parity_residual,
    taylor_psi,
    three_term_residual,
)
from .specfun import EM_CUTOFF, EM_ORDER, hurwitz_zeta

__all__ = [
    "TransferMatrix",
    "Bracket",
    "Crossing",
    "ScanRow",
    "apply_transfer",
    "build_transfer_matrix",
    "eigen_spectrum",
    "fredholm_dets",
    "scan_critical_line",
    "refine_crossing",
    "eigenfunction_to_psi",
    "fixed_point_check",
    "eisenstein_zero_probe",
    "POLE_GUARD_TOL",
    "CROSSING_THRESHOLD",
]

POLE_GUARD_TOL = 1e-6
CROSSING_THRESHOLD = 0.15
#: Radius of the disk on which eigenvector Taylor polynomials are trusted.
PSI_RADIUS = 1.5 * 0.9

# sample points for the eigenfunction checks (all arguments stay in the disk)
_THREE_TERM_POINTS = (2.15, 2.2, 2.25, 2.2 + 0.05j, 2.2 - 0.05j)
_PARITY_POINTS = (0.9, 1.1, 1.2, 1.3, 1.15 + 0.05j)


def _param(s):
    return s if isinstance(s, SpectralParam) else SpectralParam(s)


# ---------------------------------------------------------------------------
# direct application


def _taylor_at_one(psi, order, radius=0.25, points=32):
    # psi^(j)(1)/j!, j < order, by the trapezoid rule on |z - 1| = radius
    theta = 2 * np.pi * np.arange(points) / points
    vals = psi(1 + radius * np.exp(1j * theta))
    j = np.arange(order)
    return (np.exp(-1j * np.outer(j, theta)) @ vals) / points / radius**j


def apply_transfer(psi, s, z, N_terms=10**4, tail_order=4):
    r"""Apply the transfer operator to a period-function evaluator at one point.

    The first `N_terms` terms are summed directly. For the rest,
    ``psi(1 + 1/x)`` is expanded as ``sum_(j < tail_order) c_j x^(-j)`` with
    Taylor coefficients ``c_j`` of ``psi`` at 1, and each power is summed as
    ``zeta_H(2s + j, z + N_terms)``.

    Raises
    ------
    TailDivergence
        If ``Re 2s + tail_order <= 1``.
    DomainError
        If ``Re z <= 0``.
    """
    s = _param(s).s
    z = complex(z)
    if not z.real > 0:
        raise DomainError(f"apply_transfer needs Re z > 0, got z = {z}")
    a = 2 * s
    if a.real + tail_order <= 1:
        raise TailDivergence(f"tail of order {tail_order} cannot close the sum at s = {s}")
    x = z + np.arange(N_terms)
    head = np.sum(np.exp(-a * np.log(x)) * psi(1 + 1 / x))
    if tail_order == 0:
        return complex(head)
    c = _taylor_at_one(psi, tail_order)
    j = np.arange(tail_order)
    if np.any(np.abs(a + j - 1) < 1e-12):
        raise PoleError(f"zeta_H(1, .) is required at s = {s}")
    tail = np.sum(c * hurwitz_zeta(a + j, z + N_terms))
    return complex(head + tail)


def fixed_point_check(N_terms=10**4, tail_order=4, points=None):
    """``max |apply_transfer(1/z, s=1, z) - 1/z|`` over ten points in ``[1.2, 2.8]``."""
    psi = PsiEvaluator("custom", SpectralParam(1), lambda z: 1 / z, "cut_plane")
    zs = np.linspace(1.2, 2.8, 10) if points is None else points
    return max(abs(apply_transfer(psi, 1, z, N_terms, tail_order) - 1 / z) for z in zs)


# ---------------------------------------------------------------------------
# the truncated matrix


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Truncation of the transfer operator to ``N`` Taylor monomials about ``w = 1``.

    ``entries[k, m]`` is the coefficient of ``(w-1)^k`` in the image of
    ``(w-1)^m``.
    """

    param: SpectralParam
    N: int
    entries: np.ndarray = field(repr=False)
    basis: str = "taylor (w-1)^m about w=1, phi(w) = psi(1+w)"
    assembly: dict = field(default_factory=dict)

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)


def _binomial_rows(a, N):
    # out[r, k] = binom(-(a + r), k) for r, k < N
    base = -(a + np.arange(N))
    out = np.ones((N, N), dtype=complex)
    for k in range(1, N):
        out[:, k] = out[:, k - 1] * (base - k + 1) / k
    return out


def _signed_pascal(N):
    # P[j, m] = binom(m, j) (-1)^(m-j)
    m = np.arange(N)
    P = comb(m[None, :], m[:, None]) * (-1.0) ** (m[None, :] - m[:, None])
    return np.where(m[None, :] >= m[:, None], P, 0.0)


def _cauchy_entries(a, N, rho, points, n0):
    # Taylor coefficients at w = 1 of L (w-1)^m from values on |w - 1| = rho,
    # together with a roundoff estimate for each coefficient
    w = 1 + rho * np.exp(2j * np.pi * np.arange(points) / points)
    x = w[:, None] + np.arange(1, n0)[None, :]
    base = np.exp(-a * np.log(x))
    r = 1 / x - 1
    G = np.empty((points, N), dtype=complex)
    size = np.empty(N)
    for m in range(N):
        G[:, m] = base.sum(axis=1)
        size[m] = np.max(np.abs(base).sum(axis=1))
        base = base * r
    # n >= n0: (1/x - 1)^m = sum_j binom(m, j) (-1)^(m-j) x^(-j)
    Z = hurwitz_zeta(a + np.arange(N)[None, :], (w + n0)[:, None])
    G = G + Z @ _signed_pascal(N)
    size = np.maximum(size, np.max(np.abs(Z) @ np.abs(_signed_pascal(N)), axis=0))
    C = np.fft.fft(G, axis=0) / points
    scale = rho ** np.arange(N)[:, None]
    return C[:N, :] / scale, np.finfo(float).eps * size[None, :] / scale


#: Contour radii tried by the FFT assembly; each entry is taken from the
#: radius with the smallest roundoff estimate.
CAUCHY_RADII = (0.6, 0.8, 1.0, 1.35)


def build_transfer_matrix(s, N, head_terms=None, method="cauchy", rho=CAUCHY_RADII, points=None):
    r"""Assemble the ``N x N`` Taylor-basis matrix of the transfer operator.

    The entries are
    ``M[k, m] = sum_j (-1)^(j+k) binom(m, j) binom(2s+m-j+k-1, k) zeta_H(2s+m-j+k, 2)``.

    ``method="cauchy"`` (default) evaluates the image of each monomial on
    the circle ``|w - 1| = rho`` (sum over ``n`` plus a Hurwitz-zeta tail)
    and extracts Taylor coefficients by FFT with `points` nodes. Its errors
    are uniform after scaling by ``rho^k``, so it stays accurate for large
    ``N``. On a circle the factor ``(w + n)^(-2s)`` varies in modulus by
    about ``exp(2 |Im s| arcsin(rho / (1 + n)))``, so small radii suit the
    low rows at large ``|Im s|`` while high rows need a large radius. `rho`
    may therefore be a sequence of radii; every entry is then taken from the
    radius with the smallest roundoff estimate ``eps * max|terms| / rho^k``.

    ``method="zeta"`` uses the closed form. Its binomial sums alternate and
    lose accuracy for ``N`` beyond about 40, so the first `head_terms` terms
    of the sum over ``n`` are expanded as products of two nonalternating
    Taylor series and the closed form is kept only for the remainder, with
    ``zeta_H(., head_terms + 1)``. Even so it degrades for large ``N``.

    Raises
    ------
    PoleGuard
        If some ``2s + r``, ``0 <= r <= 2N - 2``, is within ``1e-6`` of 1.
    """
    param = _param(s)
    s = param.s
    N = int(N)
    if N < 1:
        raise ValueError("basis size must be positive")
    a = 2 * s
    r = np.arange(2 * N - 1)
    if np.any(np.abs(a + r - 1) < POLE_GUARD_TOL):
        raise PoleGuard(f"zeta argument within {POLE_GUARD_TOL} of 1 at s = {s}")
    n0 = head_terms if head_terms is not None else 2 * N + int(abs(a))
    n0 = max(int(n0), 1)
    if method == "cauchy":
        points = points or max(256, 4 * N)
        radii = tuple(float(x) for x in np.atleast_1d(rho))
        M, err = _cauchy_entries(a, N, radii[0], points, n0 + 20)
        for radius in radii[1:]:
            M2, err2 = _cauchy_entries(a, N, radius, points, n0 + 20)
            better = err2 < err
            M = np.where(better, M2, M)
            err = np.minimum(err, err2)
        return TransferMatrix(
            param, N, M,
            assembly={"method": "cauchy", "rho": max(radii), "radii": radii, "points": points, "head_terms": n0 + 20,
                      "hurwitz_cutoff": EM_CUTOFF, "hurwitz_order": EM_ORDER},
        )
    if method != "zeta":  # closed form
        raise ValueError(f"unknown assembly method {method!r}")
    P = _signed_pascal(N)
    # remainder: sum_{n >= n0} (w+n)^(-2s) (1/(w+n) - 1)^m, expanded at w = 1
    Zt = hurwitz_zeta(a + r, n0 + 1.0)
    B = _binomial_rows(a, N)  # binom(-(a+j), k)
    G = B * Zt[np.arange(N)[:, None] + np.arange(N)[None, :]]  # G[j, k]
    M = G.T @ P
    if n0 > 1:
        # terms n = 1..n0-1: (-1)^m (n+u)^m (n+1+u)^(-a-m), u = w - 1
        n = np.arange(1, n0)
        p = n / (n + 1.0)
        m = np.arange(N)
        i = np.arange(N)
        # R[m, i, k] = binom(m, i) binom(-(a+m), k-i)
        R = np.zeros((N, N, N), dtype=complex)
        for ii in range(N):
            R[:, ii, ii:] = comb(m, ii)[:, None] * B[:, : N - ii]
        expo = m[:, None] - i[None, :]
        Pw = np.where(expo >= 0, p[:, None, None] ** np.maximum(expo, 0), 0.0)  # [n, m, i]
        W = np.exp(-(a + m[None, :]) * np.log(n + 1.0)[:, None])  # (n+1)^(-a-k)
        head = np.einsum("nmi,mik,nk->km", Pw, R, W)
        M = M + head * ((-1.0) ** m)[None, :]
    return TransferMatrix(
        param, N, M,
        assembly={"method": "zeta", "head_terms": n0, "hurwitz_cutoff": EM_CUTOFF, "hurwitz_order": EM_ORDER},
    )


def eigen_spectrum(M, scale=None):
    """Eigenpairs sorted by decreasing modulus.

    Each eigenvector is scaled so its largest-modulus entry equals 1. With
    `scale`, the problem is solved for ``D^-1 M D``, ``D = diag(scale^k)``,
    and the eigenvectors are mapped back; eigenvalues are unchanged.

    Raises
    ------
    ConvergenceError
        If LAPACK fails to converge.
    """
    A = M.entries if isinstance(M, TransferMatrix) else np.asarray(M, dtype=complex)
    d = None if scale is None else float(scale) ** np.arange(A.shape[0])
    if d is not None:
        A = A * d[None, :] / d[:, None]
    try:
        w, v = scipy.linalg.eig(A)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(str(exc)) from exc
    if d is not None:
        v = v * d[:, None]
    order = np.argsort(-np.abs(w), kind="stable")
    out = []
    for idx in order:
        vec = v[:, idx]
        vec = vec / vec[np.argmax(np.abs(vec))]
        out.append((complex(w[idx]), vec))
    return out


def _lu_det(A):
    lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    return complex(np.prod(np.diag(lu)) * (-1) ** swaps)


def fredholm_dets(s, N, method="cauchy"):
    """``(det(I - M_N(s)), det(I + M_N(s)))`` by LU factorization."""
    M = s if isinstance(s, TransferMatrix) else build_transfer_matrix(s, N, method=method)
    eye = np.eye(M.N)
    return _lu_det(eye - M.entries), _lu_det(eye + M.entries)


# ---------------------------------------------------------------------------
# critical-line scan


@dataclass(frozen=True)
class ScanRow:
    t: float
    nearest_eig: complex
    dist_to_plus1: float
    dist_to_minus1: float
    det_minus: complex
    det_plus: complex
    perturbed: bool = False


@dataclass(frozen=True)
class Bracket:
    t_lo: float
    t_hi: float
    sign: int
    t_min: float
    dist_min: float


@dataclass(frozen=True, eq=False)
class Crossing:
    t_star: float
    s: complex
    eigen_sign: int
    eigenvalue_at_t_star: complex
    eigvec: np.ndarray = field(repr=False)
    N: int = 0
    residuals: dict = field(default_factory=dict)


def _matrix_guarded(t, N, method="cauchy"):
    s = 0.5 + 1j * t
    try:
        return build_transfer_matrix(s, N, method=method), False
    except PoleGuard:
        warnings.warn(f"pole guard: s = {s} shifted by 1e-8 i", PoleGuardWarning, stacklevel=3)
        return build_transfer_matrix(s + 1e-8j, N, method=method), True


def _scan_point(t, N, sign, method="cauchy"):
    M, perturbed = _matrix_guarded(t, N, method)
    eig = np.linalg.eigvals(M.entries)
    d_plus = float(np.min(np.abs(eig - 1)))
    d_minus = float(np.min(np.abs(eig + 1)))
    near = complex(eig[np.argmin(np.abs(eig - sign))])
    det_m, det_p = fredholm_dets(M, N)
    return ScanRow(float(t), near, d_plus, d_minus, det_m, det_p, perturbed)


def _grid(t_lo, t_hi, step):
    if step <= 0:
        raise ValueError("step must be positive")
    if t_hi < t_lo:
        return np.zeros(0)
    n = int(math.floor((t_hi - t_lo) / step + 1e-9))
    return t_lo + step * np.arange(n + 1)


def scan_critical_line(t_lo, t_hi, step, N, sign, threshold=CROSSING_THRESHOLD,
                       threads=1, full_output=False, method="cauchy"):
    r"""Locate ``t`` where an eigenvalue of ``M_N(1/2 + it)`` passes ``sign``.

    The distance from `sign` to the nearest eigenvalue is tabulated on the
    grid ``t_lo, t_lo + step, ...``. A bracket is reported around each local
    minimum of the distance that lies below `threshold`, and around each
    sign change of ``Im(lambda - sign)`` where the distance stays below
    ``2 * threshold``.

    Returns
    -------
    list of Bracket, or (brackets, rows) with `full_output`
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    ts = _grid(t_lo, t_hi, step)
    if threads > 1 and len(ts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda t: _scan_point(t, N, sign, method), ts))
    else:
        rows = [_scan_point(t, N, sign, method) for t in ts]
    dist = np.array([r.dist_to_plus1 if sign == 1 else r.dist_to_minus1 for r in rows])
    im = np.array([(r.nearest_eig - sign).imag for r in rows])
    hits = []
    for i in range(len(rows)):
        left = dist[i - 1] if i > 0 else np.inf
        right = dist[i + 1] if i + 1 < len(rows) else np.inf
        if dist[i] < threshold and dist[i] <= left and dist[i] <= right:
            hits.append((max(i - 1, 0), min(i + 1, len(rows) - 1)))
        if i + 1 < len(rows) and im[i] * im[i + 1] < 0 and max(dist[i], dist[i + 1]) < 2 * threshold:
            hits.append((i, i + 1))
    brackets = []
    for lo, hi in sorted(hits):
        if brackets and lo <= brackets[-1][1]:
            brackets[-1] = (brackets[-1][0], max(hi, brackets[-1][1]))
        else:
            brackets.append((lo, hi))
    out = []
    for lo, hi in brackets:
        j = lo + int(np.argmin(dist[lo:hi + 1]))
        out.append(Bracket(float(ts[lo]), float(ts[hi]), sign, float(ts[j]), float(dist[j])))
    return (out, rows) if full_output else out


def refine_crossing(bracket, N, tol=1e-9, eig_tol=1e-5, max_iter=60, method="cauchy"):
    r"""Refine a bracket to a crossing ``lambda(1/2 + i t*) = sign``.

    A secant iteration in complex ``t`` solves ``lambda(t) = sign`` for the
    eigenvalue nearest to `sign`. A crossing is accepted only if the root
    lies on the critical line within the bracket, i.e. if the eigenvalue at
    the real part ``t*`` of the root is within `eig_tol` of `sign`.

    Raises
    ------
    NoConvergence
        If the iteration fails, leaves the bracket, or the root is not on the
        line (the truncated eigenvalue only approaches `sign`).
    """
    sign = bracket.sign
    width = bracket.t_hi - bracket.t_lo
    t0 = complex(bracket.t_min)
    t1 = complex(bracket.t_min + 0.25 * max(width, 1e-3))
    g0 = _nearest_c(t0, N, sign, method) - sign
    g1 = _nearest_c(t1, N, sign, method) - sign
    for _ in range(max_iter):
        if g1 == g0:
            break
        t2 = t1 - g1 * (t1 - t0) / (g1 - g0)
        t0, g0 = t1, g1
        t1 = t2
        if not (bracket.t_lo - width <= t1.real <= bracket.t_hi + width) or abs(t1.imag) > width:
            raise NoConvergence(f"secant iteration left the bracket [{bracket.t_lo}, {bracket.t_hi}]")
        g1 = _nearest_c(t1, N, sign, method) - sign
        if abs(t1 - t0) <= tol:
            break
    else:
        raise NoConvergence("secant iteration did not converge")
    t_star = t1.real
    M = build_transfer_matrix(0.5 + 1j * t_star, N, method=method)
    pairs = eigen_spectrum(M, scale=M.assembly.get("rho"))
    lam, vec = min(pairs, key=lambda p: abs(p[0] - sign))
    if abs(lam - sign) > eig_tol:
        raise NoConvergence(
            f"no crossing on the critical line at N={N}: the eigenvalue reaches {sign:+d} "
            f"at complex t = {t1.real:.10f}{t1.imag:+.3e}i; at t* it is {lam:.8g}"
        )
    crossing = Crossing(t_star, 0.5 + 1j * t_star, sign, lam, vec, N)
    object.__setattr__(crossing, "residuals", _crossing_residuals(crossing, M))
    return crossing


def _nearest_c(t, N, sign, method="cauchy"):
    M = build_transfer_matrix(0.5 + 1j * complex(t), N, method=method)
    eig = np.linalg.eigvals(M.entries)
    return complex(eig[np.argmin(np.abs(eig - sign))])


def eigenfunction_to_psi(c):
    """Taylor polynomial ``sum_m v_m (z-2)^m`` of a crossing's eigenvector."""
    return taylor_psi(SpectralParam(c.s), 2.0, c.eigvec, PSI_RADIUS)


def _crossing_residuals(c, M):
    v = c.eigvec
    vnorm = float(np.max(np.abs(v)))
    eig_res = float(np.max(np.abs(M.entries @ v - c.eigen_sign * v))) / vnorm
    psi = eigenfunction_to_psi(c)
    three = max(abs(three_term_residual(psi, z)) for z in _THREE_TERM_POINTS) / vnorm
    parity = max(abs(parity_residual(psi, z, c.eigen_sign)) for z in _PARITY_POINTS) / vnorm
    return {
        "eigen_residual": eig_res,
        "three_term": three,
        "psi_at_one": abs(psi(1.0)) / vnorm,
        "parity": parity,
    }


# ---------------------------------------------------------------------------
# exploratory: Eisenstein period function at a zero of zeta(2s)


def eisenstein_zero_probe(rho=0.5 + 14.134725141734693j, points=(1.5, 2.0, 2.5),
                          N_terms=64, tail_order=10):
    r"""Test the continued Eisenstein period function as a transfer eigenfunction.

    At ``s = rho / 2`` (so ``zeta(2s) = 0``) the relative residual
    ``|L psi - psi| / |psi|`` is measured for two weight conventions:
    ``(z+n)^(-2s)`` (``"weight_2s"``) and ``(z+n)^(2s-2)`` (``"weight_2-2s"``).

    Returns
    -------
    dict
        Maximal relative residual per convention.
    """
    s = complex(rho) / 2
    psi = eisenstein_psi(s, continued=True)
    out = {}
    for name, s_op in (("weight_2s", s), ("weight_2-2s", 1 - s)):
        res = 0.0
        for z in points:
            lhs = apply_transfer(psi, s_op, z, N_terms, tail_order)
            val = psi(z)
            res = max(res, abs(lhs - val) / abs(val))
        out[name] = res
    return out
