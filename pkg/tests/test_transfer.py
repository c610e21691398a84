import warnings

import mpmath
import numpy as np
import pytest

from periodlab.autoforms import SpectralParam
from periodlab.errors import DomainError, NoConvergence, PoleGuard, TailDivergence
from periodlab.periodmap import PsiEvaluator, parity_residual, taylor_psi, three_term_residual
from periodlab.transfer import (
    Bracket,
    apply_transfer,
    build_transfer_matrix,
    eigen_spectrum,
    eigenfunction_to_psi,
    eisenstein_zero_probe,
    fixed_point_check,
    fredholm_dets,
    refine_crossing,
    scan_critical_line,
)

#: Second eigenvalue of the Gauss-Kuzmin-Wirsing operator (Wirsing's constant, negated).
GKW_LAMBDA2 = -0.30366300289873265859744812190155623


def _mp_matrix(s, N):
    # oracle: closed-form entries evaluated in 60-digit arithmetic
    a = 2 * mpmath.mpc(s)
    Z = [mpmath.zeta(a + n, 2) for n in range(2 * N - 1)]
    M = np.zeros((N, N), dtype=complex)
    for k in range(N):
        for m in range(N):
            acc = mpmath.mpc(0)
            for j in range(m + 1):
                acc += (-1) ** (j + k) * mpmath.binomial(m, j) * mpmath.binomial(a + m - j + k - 1, k) * Z[m - j + k]
            M[k, m] = complex(acc)
    return M


def _inv_z():
    return PsiEvaluator("custom", SpectralParam(1), lambda z: 1 / z, "cut_plane")


# ---------------------------------------------------------------------------
# direct application


def test_fixed_point():
    assert fixed_point_check() <= 1e-10


def test_telescoping_partial_sum():
    # without a tail, 10 terms of L(1/z) at s = 1 sum to 1/z - 1/(z+10)
    for z in (1.2, 2.0 + 0.5j, 3.7):
        val = apply_transfer(_inv_z(), 1, z, N_terms=10, tail_order=0)
        assert abs(val - (1 / z - 1 / (z + 10))) < 1e-15


def test_apply_transfer_errors():
    with pytest.raises(TailDivergence):
        apply_transfer(_inv_z(), -1.0, 1.5, tail_order=1)
    with pytest.raises(DomainError):
        apply_transfer(_inv_z(), 1, -0.5)


# ---------------------------------------------------------------------------
# matrix assembly


@pytest.mark.parametrize("s", [0.5 + 5j, 1.3, 0.75 + 0.2j, 0.5 + 13.78j])
@pytest.mark.parametrize("method", ["cauchy", "zeta"])
def test_matrix_against_mp_oracle(s, method):
    N = 10
    ref = _mp_matrix(s, N)
    M = build_transfer_matrix(s, N, method=method).entries
    assert np.max(np.abs(M - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_methods_agree_at_moderate_size():
    s = 0.5 + 9.53j
    a = build_transfer_matrix(s, 28).entries
    b = build_transfer_matrix(s, 28, method="zeta").entries
    assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(a))


def test_matrix_is_immutable():
    M = build_transfer_matrix(1.0, 6)
    with pytest.raises(ValueError):
        M.entries[0, 0] = 0
    assert M.N == 6 and M.param == SpectralParam(1.0)


def test_pole_guard():
    with pytest.raises(PoleGuard):
        build_transfer_matrix(0.0, 4)
    with pytest.raises(PoleGuard):
        build_transfer_matrix(-1.5 + 1e-9j, 4)


def test_matrix_action_matches_direct_sum():
    s = 0.9 + 2j
    N = 32
    M = build_transfer_matrix(s, N)
    c = np.zeros(N, dtype=complex)
    c[:4] = [1.0, -0.5, 0.25j, 0.1]
    psi = taylor_psi(SpectralParam(s), 2.0, c, 1.35)
    image = taylor_psi(SpectralParam(s), 2.0, M.entries @ c, 1.35)
    for z in (1.8, 2.0, 2.3 + 0.2j, 2.5):
        direct = apply_transfer(psi, s, z, N_terms=2000, tail_order=8)
        assert abs(image(z) - direct) <= 1e-8 * max(1.0, abs(direct))


def test_gauss_kuzmin_wirsing_spectrum():
    pairs = eigen_spectrum(build_transfer_matrix(1.0, 32))
    assert abs(pairs[0][0] - 1) <= 1e-8
    assert abs(pairs[1][0] - GKW_LAMBDA2) <= 1e-9


def test_top_eigenvector_is_invariant_density():
    # the s = 1 eigenfunction is 1/z, i.e. sum_m (-1/2)^m (z-2)^m / 2
    lam, vec = eigen_spectrum(build_transfer_matrix(1.0, 32))[0]
    ref = 0.5 * (-0.5) ** np.arange(32)
    ref = ref / ref[0]
    assert np.max(np.abs(vec[:20] / vec[0] - ref[:20])) < 1e-8


@pytest.mark.parametrize("s", [1.0, 0.5 + 5j, 0.5 + 13.78j, 1.4 - 0.8j])
def test_spectral_stability(s):
    a = [p[0] for p in eigen_spectrum(build_transfer_matrix(s, 48))[:5]]
    b = [p[0] for p in eigen_spectrum(build_transfer_matrix(s, 56))[:5]]
    assert max(abs(x - y) for x, y in zip(a, b)) <= 1e-8


def test_eigen_spectrum_scaling_keeps_eigenvalues():
    M = build_transfer_matrix(0.5 + 5j, 24)
    a = [p[0] for p in eigen_spectrum(M)[:5]]
    b = [p[0] for p in eigen_spectrum(M, scale=1.35)[:5]]
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-10
    lam, vec = eigen_spectrum(M, scale=1.35)[0]
    assert np.max(np.abs(M.entries @ vec - lam * vec)) < 1e-10


@pytest.mark.parametrize("s", [0.5 + 5j, 0.5 + 9.53j, 1.2])
def test_fredholm_factorization(s):
    M = build_transfer_matrix(s, 32)
    dm, dp = fredholm_dets(M, 32)
    d2 = np.linalg.det(np.eye(32) - M.entries @ M.entries)
    assert abs(dm * dp - d2) <= 1e-9 * max(1.0, abs(d2))


# ---------------------------------------------------------------------------
# scans and crossings


def test_scan_rows_and_brackets():
    brackets, rows = scan_critical_line(13.5, 14.0, 0.05, 28, +1, full_output=True)
    assert len(rows) == 11
    assert [r.t for r in rows] == pytest.approx(13.5 + 0.05 * np.arange(11))
    assert len(brackets) == 1
    b = brackets[0]
    assert b.t_lo <= 13.7797513 <= b.t_hi


def test_scan_odd_window():
    assert len(scan_critical_line(9.3, 9.8, 0.05, 28, -1)) == 1


def test_scan_deterministic_across_threads():
    a = scan_critical_line(9.3, 9.5, 0.05, 16, -1, full_output=True)[1]
    b = scan_critical_line(9.3, 9.5, 0.05, 16, -1, threads=3, full_output=True)[1]
    assert a == b


def test_scan_empty_and_invalid():
    assert scan_critical_line(14.0, 13.0, 0.05, 16, 1) == []
    with pytest.raises(ValueError):
        scan_critical_line(13.0, 14.0, 0.05, 16, 2)


def test_refine_odd_crossing_large_basis():
    b = scan_critical_line(9.3, 9.8, 0.05, 64, -1)[0]
    c = refine_crossing(b, 64)
    c2 = refine_crossing(b, 72)
    assert abs(c.t_star - c2.t_star) <= 1e-6
    r = c.residuals
    assert r["eigen_residual"] <= 1e-8
    assert r["three_term"] <= 1e-6 and r["psi_at_one"] <= 1e-6 and r["parity"] <= 1e-6
    psi = eigenfunction_to_psi(c)
    vmax = np.max(np.abs(c.eigvec))
    assert abs(parity_residual(psi, 1.2, -1)) / vmax <= 1e-6
    assert abs(three_term_residual(psi, 2.2)) / vmax <= 1e-6


def test_refine_rejects_off_line_root():
    # at N = 28 the even eigenvalue curve passes +1 only at complex t
    b = scan_critical_line(13.5, 14.0, 0.05, 28, +1)[0]
    with pytest.raises(NoConvergence):
        refine_crossing(b, 28)


def test_refine_leaving_bracket():
    with pytest.raises(NoConvergence):
        refine_crossing(Bracket(11.0, 11.1, 1, 11.05, 0.1), 16)


def test_eisenstein_zero_probe():
    out = eisenstein_zero_probe()
    assert out["weight_2s"] < 1e-10
    assert out["weight_2-2s"] > 0.1
