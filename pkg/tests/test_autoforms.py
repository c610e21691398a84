import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from periodlab.autoforms import (
    CoefficientSet,
    EvalPoint,
    SpectralParam,
    eisenstein_coefficients,
    eisenstein_family_fe_residual,
    eval_eisenstein_fourier,
    eval_eisenstein_lattice,
    eval_maass,
    holomorphic_coefficients,
    iota_map,
    maass_coefficients,
    modular_invariance_residual,
)
from periodlab.errors import CoefficientError, DomainError, PoleError, TruncationError, TruncationWarning
from periodlab.specfun import completed_zeta
from periodlab.specfun import complex_gamma, whittaker_w0

from conftest import rel


def _eisenstein_mp(s, z, n_max=60):
    # independent Fourier oracle in mpmath
    s = mpmath.mpc(s)
    x, y = mpmath.mpf(z.real), mpmath.mpf(z.imag)

    def lam(u):
        return mpmath.pi ** (-u / 2) * mpmath.gamma(u / 2) * mpmath.zeta(u)

    val = 2 * lam(2 * s) * y**s + 2 * lam(2 * s - 1) * y ** (1 - s)
    for n in range(1, n_max + 1):
        sig = sum(mpmath.mpf(d) ** (2 * s - 1) for d in range(1, n + 1) if n % d == 0)
        w = mpmath.sqrt(4 * n * y) * mpmath.besselk(s - 0.5, 2 * mpmath.pi * n * y)
        val += 2 * sig * mpmath.mpf(n) ** (-s) * w * 2 * mpmath.cos(2 * mpmath.pi * n * x)
    return complex(val)


def _lattice_brute(s, z, P=400):
    # direct primed double sum over |p|, |q| <= P
    p = np.arange(-P, P + 1)
    total = 0j
    for q in range(-P, P + 1):
        d = np.abs(q * z + p) ** 2
        if q == 0:
            d = d[p != 0]
        total += np.sum(d ** (-s))
    return complex_gamma(s) * math.pi ** (-s) * z.imag**s * total


# ---------------------------------------------------------------------------
# types


def test_spectral_param_relation():
    p = SpectralParam(0.5 + 3j)
    assert p.nu == 6j
    assert SpectralParam.from_nu(6j) == p
    with pytest.raises(ValueError):
        SpectralParam(s=1, nu=3)
    with pytest.raises(TypeError):
        SpectralParam()


def test_eval_point():
    p = EvalPoint(0.3 + 1.1j)
    assert (p.x, p.y) == (0.3, 1.1)
    with pytest.raises(DomainError):
        EvalPoint(0.3)
    with pytest.raises(DomainError):
        EvalPoint(0.3 - 1j)


def test_coefficient_set_is_immutable():
    c = eisenstein_coefficients(2.3, 5)
    with pytest.raises(ValueError):
        c.plus[0] = 1
    with pytest.raises(AttributeError):
        c.A0 = 1


def test_parity_checked_on_construction():
    with pytest.raises(CoefficientError):
        CoefficientSet(SpectralParam(0.5), [1, 2], [1, 2.5], parity="even")
    with pytest.raises(CoefficientError):
        CoefficientSet(SpectralParam(0.5), [1, 2], [1, 2], parity="odd")
    CoefficientSet(SpectralParam(0.5), [1, 2], [-1, -2], parity="odd")


def test_c0_only_for_positive_integer_nu():
    with pytest.raises(CoefficientError):
        CoefficientSet(SpectralParam(nu=0.5), [], [], C0=1)
    CoefficientSet(SpectralParam(nu=2), [], [], C0=1)


@given(
    st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False), max_size=12),
    st.sampled_from(["even", "odd"]),
)
def test_parity_round_trip(values, parity):
    a = {n: v for n, v in enumerate(values, start=1)}
    c = maass_coefficients(a, 0.5 + 4j, parity)
    sign = 1 if parity == "even" else -1
    for n in range(1, c.n_max + 1):
        assert c.A(-n) == sign * c.A(n)


# ---------------------------------------------------------------------------
# constructors


def test_eisenstein_star_values():
    c = eisenstein_coefficients(2, 10)
    assert rel(c.A(1), 2 / math.pi) < 1e-14
    assert rel(c.B0, 2 * completed_zeta(4)) < 1e-14
    assert c.C0 == 0 and c.parity == "even"
    assert c.param.nu == -3  # stored at nu = 1 - 2s
    for n in range(1, 11):
        assert c.A(-n) == c.A(n)


def test_eisenstein_star_against_mpmath():
    s = 0.7 + 2.1j
    c = eisenstein_coefficients(s, 12)
    sm = mpmath.mpc(s)
    for n in (1, 6, 12):
        sig = sum(mpmath.mpf(d) ** (1 - 2 * sm) for d in range(1, n + 1) if n % d == 0)
        ref = 2 * mpmath.pi ** (1 - sm) * mpmath.gamma(sm) * sig
        assert rel(c.A(n), complex(ref)) < 1e-12
    lam = lambda u: mpmath.pi ** (-u / 2) * mpmath.gamma(u / 2) * mpmath.zeta(u)
    A0 = 2 * mpmath.sqrt(mpmath.pi) * mpmath.gamma(sm) / mpmath.gamma(sm - 0.5) * lam(2 * sm - 1)
    assert rel(c.A0, complex(A0)) < 1e-12


def test_eisenstein_family_factor():
    s = 1.3 + 0.4j
    star = eisenstein_coefficients(s, 6)
    fam = eisenstein_coefficients(s, 6, "family")
    factor = 0.5 / complex_gamma(s - 1)
    assert rel(fam.A(3), factor * star.A(3)) < 1e-14
    assert rel(fam.B0, factor * star.B0) < 1e-14


@pytest.mark.parametrize("s", [1, 0.5, 0, -1.5])
def test_eisenstein_refused_at_poles(s):
    with pytest.raises(PoleError):
        eisenstein_coefficients(s, 5)


def test_maass_values():
    assert maass_coefficients({}, 0.5 + 9j).is_zero()
    c = maass_coefficients({1: 1, -1: 1}, 0.5, "even")
    assert rel(c.A(1), math.pi) < 1e-14
    assert c.A0 == c.B0 == c.C0 == 0
    with pytest.raises(CoefficientError):
        maass_coefficients({1: 1, -1: 2}, 0.5, "even")
    with pytest.raises(PoleError):
        maass_coefficients({1: 1}, 2)


def test_holomorphic_values():
    c = holomorphic_coefficients({1: 1, 2: -24}, 6)
    assert c.param.nu == 11
    assert rel(c.A(1), 4.0**-6) < 1e-15
    assert rel(c.A(2), -24 * 4.0**-6) < 1e-15
    assert all(c.A(-n) == 0 for n in (1, 2))
    assert holomorphic_coefficients({}, 3).is_zero()
    with pytest.raises(CoefficientError):
        holomorphic_coefficients({0: 1}, 2)


# ---------------------------------------------------------------------------
# evaluators


def test_eval_maass_zero_and_single_term():
    s = 0.5 + 9.53j
    value, tail = eval_maass(maass_coefficients({}, s), 1.2j)
    assert value == 0 and tail == 0
    y = 0.9
    c = maass_coefficients({1: 1, -1: 1}, s, "even")
    u = eval_maass(c, 1j * y, tol=1e-3, full_output=False)
    assert rel(u, 2 * whittaker_w0(s - 0.5, 4 * math.pi * y)) < 1e-12


def test_eval_maass_even_symmetry():
    rng = np.random.default_rng(5)
    a = {n: complex(*rng.standard_normal(2)) for n in range(1, 9)}
    c = maass_coefficients(a, 0.5 + 13.78j, "even")
    z = 0.3 + 1.1j
    u1 = eval_maass(c, z, full_output=False)
    u2 = eval_maass(c, -z.conjugate(), full_output=False)
    assert rel(u2, u1) < 1e-12


def test_eval_maass_truncation_bound():
    rng = np.random.default_rng(2)
    a = {n: complex(*rng.standard_normal(2)) / n for n in range(1, 41)}
    c20 = maass_coefficients({n: a[n] for n in range(1, 21)}, 0.5 + 9.5j)
    c40 = maass_coefficients(a, 0.5 + 9.5j)
    z = 0.1 + 0.35j
    v20, tail20 = eval_maass(c20, z, tol=1.0)
    v40, _ = eval_maass(c40, z, tol=1.0)
    assert abs(v40 - v20) <= tail20
    with pytest.warns(TruncationWarning):
        eval_maass(c20, 0.2j, tol=1e-30)
    with pytest.raises(TruncationError):
        eval_maass(c20, 0.05j)


def test_catalan_closed_form():
    # sum'(p^2+q^2)^(-2) = 4 zeta(2) beta(2) with Catalan's constant beta(2)
    ref = 4 * (math.pi**2 / 6) * float(mpmath.catalan) / math.pi**2
    assert rel(eval_eisenstein_lattice(2, 1j), ref) < 1e-13
    assert rel(eval_eisenstein_fourier(2, 1j), ref) < 1e-13


@pytest.mark.parametrize("s,z", [(1.5, 1j), (2.2 + 0.7j, 0.31 + 0.9j), (0.5 + 5j, -0.4 + 1.3j), (0.3, 0.1 + 0.8j)])
def test_fourier_against_mpmath(s, z):
    assert rel(eval_eisenstein_fourier(s, z), _eisenstein_mp(s, z)) < 1e-11


def test_lattice_against_brute_force():
    z = 0.21 + 1.05j
    assert rel(eval_eisenstein_lattice(3, z), _lattice_brute(3, z)) < 1e-8


def test_fourier_lattice_agreement_random(rng):
    for _ in range(20):
        s = complex(rng.uniform(1.2, 3), rng.uniform(-2, 2))
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.5))
        assert rel(eval_eisenstein_lattice(s, z), eval_eisenstein_fourier(s, z)) < 1e-8


def test_fourier_properties():
    s, z = 1.7 + 0.3j, 0.27 + 0.93j
    assert rel(eval_eisenstein_fourier(s, z + 1), eval_eisenstein_fourier(s, z)) < 1e-13
    v = eval_eisenstein_fourier(2.4, 1.3j)
    assert abs(v.imag) < 1e-15 * abs(v)


def test_evaluator_errors():
    with pytest.raises(DomainError):
        eval_eisenstein_lattice(1.0, 1j)
    with pytest.raises(PoleError):
        eval_eisenstein_fourier(1, 1j)
    with pytest.raises(TruncationError):
        eval_eisenstein_fourier(2, 0.05j)


def test_lattice_symmetries():
    s, z = 1.7, 0.2 + 1.3j
    assert rel(eval_eisenstein_lattice(s, -1 / z), eval_eisenstein_lattice(s, z)) < 1e-12


# ---------------------------------------------------------------------------
# iota and the residual diagnostics


def _random_set(rng, nu, n=8):
    plus = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    minus = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return CoefficientSet(SpectralParam(nu=nu), plus, minus, complex(*rng.standard_normal(2)),
                          complex(*rng.standard_normal(2)))


def test_iota_zero_is_identity(rng):
    c = _random_set(rng, 0)
    d = iota_map(c)
    assert np.array_equal(d.plus, c.plus) and d.A0 == c.A0 and d.B0 == c.B0


def test_iota_involution_random(rng):
    for _ in range(20):
        nu = complex(rng.uniform(-3, 3), rng.uniform(-5, 5))
        c = _random_set(rng, nu)
        back = iota_map(iota_map(c))
        for n in range(1, c.n_max + 1):
            assert rel(back.A(n), c.A(n)) < 1e-12
            assert rel(back.A(-n), c.A(-n)) < 1e-12
        assert rel(back.A0, c.A0) < 1e-12 and rel(back.B0, c.B0) < 1e-12


def test_iota_involution_example(rng):
    c = _random_set(rng, 0.4 + 0.2j)
    back = iota_map(iota_map(c))
    assert np.max(np.abs(back.plus - c.plus)) < 1e-12


def test_iota_coefficient_formula():
    nu = 0.4 + 0.2j
    c = CoefficientSet(SpectralParam(nu=nu), [0, 0, 1], [0, 0, 0])
    d = iota_map(c)
    ref = mpmath.mpf(3) ** 0 * (mpmath.pi * 3) ** (-mpmath.mpc(nu)) * mpmath.gamma((1 + mpmath.mpc(nu)) / 2) \
        / mpmath.gamma((1 - mpmath.mpc(nu)) / 2)
    assert rel(d.A(3), complex(ref)) < 1e-13
    assert d.param.nu == -nu


def test_iota_keeps_vanishing_constants(rng):
    c = maass_coefficients({1: 1, 2: 0.5}, 0.5 + 4j)
    d = iota_map(c)
    assert d.A0 == d.B0 == d.C0 == 0


def test_iota_integer_cases():
    # nu in 2N: B_0 comes from C_0; nu in -2N: C_0 comes from B_0
    c = CoefficientSet(SpectralParam(nu=2), [1.0], [1.0], A0=0, B0=0.5, C0=2.0)
    d = iota_map(c)
    assert d.param.nu == -2 and d.C0 == 0
    assert rel(d.B0, 2.0 / complex_gamma(1.5)) < 1e-14
    e = iota_map(CoefficientSet(SpectralParam(nu=-2), [1.0], [1.0], B0=0.5))
    assert rel(e.C0, complex_gamma(-0.5) * 0.5) < 1e-14
    with pytest.raises(PoleError):
        iota_map(CoefficientSet(SpectralParam(nu=3), [1.0], [1.0]))


def test_modular_invariance_eisenstein(rng):
    for s in (1.6, 1.7, 1.5 + 0.5j):
        th = rng.uniform(0.5, math.pi - 0.5, 10)
        zs = rng.uniform(0.95, 1.05, 10) * np.exp(1j * th)
        for ev in (eval_eisenstein_fourier, eval_eisenstein_lattice):
            table = modular_invariance_residual(lambda z: ev(s, z), zs)
            assert table["max_rel"] <= 1e-8
            assert len(table["rows"]) == 10


def test_modular_invariance_trivial_cases():
    zero = maass_coefficients({}, 0.5 + 9j)
    t = modular_invariance_residual(lambda z: eval_maass(zero, z, full_output=False), [0.2 + 1j])
    assert t["max_abs"] == 0
    # on |z| = 1, -1/z = -conj(z): any even data is exactly invariant
    c = maass_coefficients({1: 0.7, 2: -0.3}, 0.5 + 9j, "even")
    zs = np.exp(1j * np.array([1.1, 1.4, 2.0]))
    t = modular_invariance_residual(lambda z: eval_maass(c, z, tol=1e-3, full_output=False), zs)
    assert t["max_rel"] < 1e-13
    with pytest.raises(DomainError):
        modular_invariance_residual(lambda z: 0, [0.5 - 1j])


FE_S = [0.3 + 0.4j, 0.7 - 1.2j, 1.3 + 0.2j, 1.8 + 2.5j, 2.4 - 0.7j,
        0.15 + 3j, -0.4 + 0.6j, 1.1 - 2j, 2.9 + 1.5j, 0.55 + 0.05j]


@pytest.mark.parametrize("s", FE_S)
def test_family_functional_equation(s):
    assert eisenstein_family_fe_residual(s)["max"] <= 1e-9


def test_family_fe_symmetric_in_s():
    s = 0.3 + 0.4j
    a = eisenstein_family_fe_residual(s)["max"]
    b = eisenstein_family_fe_residual(1 - s)["max"]
    assert a <= 1e-12 and b <= 1e-12


def test_family_fe_refuses_integers():
    with pytest.raises(PoleError):
        eisenstein_family_fe_residual(2)


def test_star_normalization_iota_relation():
    # eps*_(1-s) = iota(1 - 2s) eps*_s exactly on stored coefficients
    s = 0.8 + 1.7j
    lhs = eisenstein_coefficients(1 - s, 10)
    rhs = iota_map(eisenstein_coefficients(s, 10))
    assert rhs.param == lhs.param
    assert np.max(np.abs(lhs.plus - rhs.plus) / np.abs(lhs.plus)) < 1e-13
    assert rel(rhs.A0, lhs.A0) < 1e-12 and rel(rhs.B0, lhs.B0) < 1e-12


def test_no_warnings_in_default_regime():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        eval_eisenstein_fourier(1.7, 0.3 + 0.8j)
