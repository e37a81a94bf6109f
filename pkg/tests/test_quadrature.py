from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq

import oracles
from bcspherical.cherednik import SpectralPolynomial
from bcspherical.errors import CutoffError, ParameterDomainError
from bcspherical.gammacore import n_nu
from bcspherical.polyalg import SymmetricPoly
from bcspherical.quadrature import (
    compact_grid,
    compact_inner_product,
    compact_integral,
    compact_weight,
    exact_compact_inner_product,
    noncompact_grid,
    noncompact_integral,
    selberg_quadrature,
    spectral_grid,
    spectral_inner_product,
)
from bcspherical.rootdata import make_root_system, partitions_upto

S114 = make_root_system(1, 1, 1, 1)
S2 = make_root_system(2, 2, 1, 1)


def sym(r, coeffs):
    return SymmetricPoly(r, {k: mpq(v.numerator, v.denominator) if isinstance(v, Fraction) else mpq(v)
                             for k, v in coeffs.items()})


def test_compact_one_one_is_doubled_normalization():
    one = sym(1, {(0,): 1})
    assert compact_inner_product(S114, 4, one, one) == pytest.approx(float(oracles.N_RANK1_11[8]), rel=1e-12)


def test_moment_ratio():
    one, z = sym(1, {(0,): 1}), sym(1, {(1,): 1})
    ratio = compact_inner_product(S114, 4, z, one) / compact_inner_product(S114, 4, one, one)
    assert ratio == pytest.approx(float(oracles.MOMENT_RATIO_114), rel=1e-13)
    assert exact_compact_inner_product(S114, 4, z, one).normalized == oracles.MOMENT_RATIO_114


def test_selberg_quadrature_rank1_rank2():
    assert selberg_quadrature(S114, 4) == pytest.approx(8 / 3, rel=1e-12)
    ref = oracles.n_nu_via_selberg(2, 2.0, 1.0, 1.0, 6.0)
    assert selberg_quadrature(S2, 6) == pytest.approx(ref, rel=1e-12)


def test_chamber_rule_for_odd_a():
    s = make_root_system(2, 1, Fraction(1, 2), 1)
    ref = oracles.n_nu_via_selberg(2, 1.0, 0.5, 1.0, 5.0)
    assert selberg_quadrature(s, 5, 30, "chamber") == pytest.approx(ref, rel=1e-11)


@pytest.mark.parametrize("a", [2, 4])
def test_exact_path_matches_quadrature(a):
    s = make_root_system(2, a, 1, 1)
    nu = s.admissible_nu_bound + 2
    basis = partitions_upto(3, 2)
    for i, p in enumerate(basis):
        for q in basis[i:]:
            f, g = sym(2, {p: 1}), sym(2, {q: 1})
            exact = exact_compact_inner_product(s, nu, f, g).value
            quad = compact_inner_product(s, nu, f, g, order=20)
            assert quad == pytest.approx(exact, rel=1e-12)


def test_antisymmetric_probe_vanishes():
    w = compact_weight(S2, 6)
    val = compact_integral(w, lambda z: z[:, 0] ** 2 * z[:, 1] - z[:, 1] ** 2 * z[:, 0], 12)
    assert abs(val) <= 1e-15


def test_compact_grid_is_permutation_symmetric():
    for method in ("tensor", "chamber"):
        g = compact_grid(compact_weight(make_root_system(2, 1, 1, 1), 6), 10, method)
        f = lambda z: np.exp(z[:, 0]) * (1 + 3 * z[:, 1] ** 2)
        swapped = lambda z: f(z[:, ::-1])
        assert g.integrate(f(g.nodes)) == pytest.approx(g.integrate(swapped(g.nodes)), rel=1e-13)
        assert np.all(g.weights > 0)


def test_order_refinement_estimate():
    w = compact_weight(make_root_system(2, 1, 1, 1), 6)
    val, est = compact_integral(w, lambda z: np.cos(z[:, 0] + z[:, 1]), 16, estimate=True)
    val2 = compact_integral(w, lambda z: np.cos(z[:, 0] + z[:, 1]), 64)
    assert abs(val2 - val) <= max(est, 1e-15) * 10


def test_noncompact_normalization_and_sign_unfolding():
    assert noncompact_integral(S114, lambda t: np.ones(len(t)), 4) == pytest.approx(8 / 3, rel=1e-12)
    g = noncompact_grid(S2, 6, 20)
    assert np.any(g.nodes[:, 0] < 0) and np.any(g.nodes[:, 1] < 0)
    odd = g.integrate(g.nodes[:, 0] * np.exp(-g.nodes[:, 1] ** 2))
    assert abs(odd) <= 1e-14


def test_noncompact_rank_limit_and_domain():
    with pytest.raises(ParameterDomainError):
        noncompact_grid(make_root_system(3, 1, 1, 1), 10, 10)
    with pytest.raises(ParameterDomainError):
        noncompact_integral(S114, lambda t: np.ones(len(t)), 1)


def test_noncompact_weyl_symmetry():
    f = lambda t: np.exp(-(t[:, 0] - 0.3) ** 2) / (1 + t[:, 1] ** 2)
    g = lambda t: f(t[:, ::-1] * np.array([-1, 1]))
    a = noncompact_integral(S2, f, 6, 30)
    b = noncompact_integral(S2, g, 6, 30)
    assert a == pytest.approx(b, rel=1e-13)


def test_spectral_moment_ratio_against_adaptive():
    one = SpectralPolynomial(1, {(0,): mpq(1)})
    l2 = SpectralPolynomial(1, {(1,): mpq(1)})
    ratio = spectral_inner_product(S114, 4, l2, one) / spectral_inner_product(S114, 4, one, one)
    assert ratio == pytest.approx(-12.0, rel=1e-12)
    assert -ratio == pytest.approx(oracles.spectral_moment_ratio_rank1(1, 1, 4), rel=1e-9)


def test_spectral_rank1_q_is_orthogonal_to_one():
    one = SpectralPolynomial(1, {(0,): mpq(1)})
    q = SpectralPolynomial(1, {k: mpq(v.numerator, v.denominator) for k, v in oracles.Q1_114.items()})
    ip = spectral_inner_product(S114, 4, q, one)
    scale = spectral_inner_product(S114, 4, one, one)
    assert abs(ip) <= 1e-13 * scale


def test_spectral_parity():
    p = SpectralPolynomial(2, {(1, 0): mpq(1), (0, 0): mpq(3)})
    half = spectral_inner_product(S2, 6, p, p)
    full_grid = spectral_grid(S2, 6, 16, degree=2, symmetric=True)
    full = spectral_inner_product(S2, 6, p, p, grid=full_grid)
    assert half == pytest.approx(full, rel=1e-12)


def test_cutoff_error_suggests_value():
    with pytest.raises(CutoffError) as info:
        spectral_grid(S114, 4, cutoff=2.0)
    assert info.value.suggested > 2.0


def test_grid_descriptor():
    g = spectral_grid(S114, 4)
    d = g.describe()
    assert d["family"] == "spectral" and d["cutoff"] > 0 and d["points"] == len(g)
