import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from bcspherical.errors import ParameterDomainError, PoleError
from bcspherical.gammacore import (
    SphericalFunctionRank1,
    beta_nu,
    beta_recursion_check,
    c0,
    c_function,
    f_tilde,
    f_tilde_kernel,
    gindikin_gamma,
    log_f_tilde,
    n_nu,
    n_ratio,
    plancherel_density,
)
from bcspherical.rootdata import make_root_system

S114 = make_root_system(1, 1, 1, 1)


def test_gindikin_gamma_examples():
    assert gindikin_gamma(1, 1, 3.5) == pytest.approx(math.lgamma(3.5))
    assert gindikin_gamma(2, 2, 3) == pytest.approx(math.log(2))
    with pytest.raises(PoleError) as info:
        gindikin_gamma(2, 2, 1)
    assert "sigma" in info.value.factor


def test_n_nu_rank1_values():
    for nu, val in oracles.N_RANK1_11.items():
        assert n_nu(S114, nu) == pytest.approx(float(val), rel=1e-14)
    assert n_nu(S114, 4) == pytest.approx(oracles.n_nu_rank1_adaptive(1, 1, 4), rel=1e-10)


@pytest.mark.parametrize("r,a,b,iota,nu", [(1, 1, 2, 1, 5), (2, 2, 1, 1, 6), (2, 1, Fraction(1, 2), 2, 7),
                                           (3, Fraction(3, 2), 1, Fraction(1, 2), 9)])
def test_n_nu_matches_selberg(r, a, b, iota, nu):
    s = make_root_system(r, a, b, iota)
    ref = oracles.n_nu_via_selberg(r, float(a), float(b), float(iota), float(nu))
    assert n_nu(s, nu) == pytest.approx(ref, rel=1e-12)


def test_n_nu_domain():
    with pytest.raises(ParameterDomainError):
        n_nu(S114, 2)


def test_n_ratio_rank1_and_limit():
    assert n_ratio(S114, 4) == pytest.approx(0.5, rel=1e-15)
    assert n_ratio(S114, 1e8) == pytest.approx(1.0, abs=1e-6)


pos = st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4)


@given(st.integers(1, 3), pos, pos, pos, st.fractions(min_value=Fraction(1, 4), max_value=5, max_denominator=4))
@settings(max_examples=25, deadline=None)
def test_ratio_and_beta_at_rho(r, a, b, iota, extra):
    s = make_root_system(r, a, b, iota)
    nu = s.admissible_nu_bound + extra
    quotient = n_nu(s, nu + 1) / n_nu(s, nu)
    assert n_ratio(s, nu) == pytest.approx(quotient, rel=1e-12)
    rho = np.array([float(x) for x in s.rho])
    assert abs(beta_nu(s, nu, rho) - 1) <= 1e-12
    u = np.array([[0.3 * (k + 1) for k in range(r)]])
    assert beta_recursion_check(s, nu, 1j * u) <= 1e-12


def test_f_tilde_at_zero_and_kernel_route():
    assert f_tilde(S114, 4, [0.0]).real == pytest.approx(float(oracles.F_TILDE_0_114), rel=1e-14)
    kern = f_tilde_kernel(S114, 4)
    lam = 1j * np.array([[0.0], [1.0], [3.0]])
    assert np.allclose(kern.value(4, lam), f_tilde(S114, 4, lam), rtol=1e-13)


def test_f_tilde_positive_and_decaying():
    s = make_root_system(2, 2, 1, 1)
    u = np.linspace(0, 40, 81)
    pts = np.stack([u, 0.5 * u], axis=1)
    vals = f_tilde(s, 6, 1j * pts)
    assert np.all(vals.real > 0) and np.allclose(vals.imag, 0, atol=1e-12 * vals.real.max())
    logs = log_f_tilde(s, 6, 1j * pts).real
    slopes = np.diff(logs[40:]) / np.diff(u[40:])
    assert np.all(slopes < -1.0)


def test_f_tilde_pole():
    with pytest.raises(PoleError):
        f_tilde(S114, 4, [6.0])  # nu - rho_1/2 - lambda/2 = 0


def test_beta_recursion_rank1_examples():
    for u in (0.0, 1.0, 2.0):
        assert beta_recursion_check(S114, 4, np.array([1j * u])) <= 1e-12


def test_c_function_rank1_form():
    lam = np.array([0.7 + 0.3j])
    b, iota = 1.0, 1.0
    import scipy.special as sp

    z = lam[0]
    ref = sp.gamma(z + b) * sp.gamma(2 * z) / (sp.gamma(z + b + iota / 2) * sp.gamma(2 * z + 2 * b))
    assert c_function(S114, lam) == pytest.approx(ref, rel=1e-13)
    scaled = c_function(S114, lam, "scaled")
    z2 = z / 2
    ref2 = sp.gamma(z2 + b / 2) * sp.gamma(2 * z2) / (sp.gamma(z2 + b / 2 + iota / 2) * sp.gamma(2 * z2 + b))
    assert scaled == pytest.approx(ref2, rel=1e-13)


def test_plancherel_density_properties():
    s = make_root_system(2, 2, 1, 1)
    g = np.linspace(-10, 10, 21)
    pts = np.array([[x, y] for x in g for y in g])
    d = plancherel_density(s, pts)
    assert np.all(np.isfinite(d)) and np.all(d >= 0)
    assert plancherel_density(S114, np.array([[0.0]]))[0] == 0
    flipped = plancherel_density(s, pts * np.array([-1, 1]))
    assert np.allclose(d, flipped, rtol=1e-12)
    assert np.allclose(d, plancherel_density(s, pts[:, ::-1]), rtol=1e-12)


def test_c0_readings_differ():
    printed = c0(S114, "printed")
    at_rho = c0(S114, "c-of-rho", "printed")
    assert printed > 0 and at_rho > 0
    assert printed != pytest.approx(at_rho)


def test_spherical_rank1_basics():
    phi = SphericalFunctionRank1(S114)
    assert phi(1.3j, 0.0) == pytest.approx(1.0)
    for t in (0.5, 2.0, 6.0):
        assert phi(2.0, t) == pytest.approx(1.0, abs=1e-13)  # lambda = rho
    assert phi.eigen_defect(1.7j, [0.2, 1.0, 3.0]) <= 1e-8
    assert phi.eigen_defect(0.5, [0.4, 2.0]) <= 1e-8


def test_spherical_rank1_needs_rank1():
    with pytest.raises(ParameterDomainError):
        SphericalFunctionRank1(make_root_system(2, 1, 1, 1))
