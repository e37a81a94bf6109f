from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bcspherical.errors import IntegrityError
from bcspherical.polyalg import (
    MultiPoly,
    SymmetricPoly,
    exact_divide,
    monomial_symmetric,
    to_symmetric,
    weyl_act,
)
from bcspherical.rootdata import sigma_i, s_ij, weyl_group

R = 2


@st.composite
def polys(draw, rank=R, max_terms=4, max_deg=3):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        e = tuple(draw(st.integers(0, max_deg)) for _ in range(rank))
        terms[e] = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
    return MultiPoly(rank, terms)


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, s):
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q) * s == p * (q * s)
    assert p * (q + s) == p * q + p * s
    assert p - p == MultiPoly(R)


@given(polys(), polys())
def test_exact_divide_roundtrip(p, d):
    if d.is_zero():
        return
    assert exact_divide(p * d, d) == p


def test_exact_divide_rejects_remainder():
    x = MultiPoly.variable(2, 1)
    with pytest.raises(IntegrityError) as info:
        exact_divide(x * x + MultiPoly.constant(2), x)
    assert info.value.remainder is not None


@given(polys())
@settings(max_examples=30)
def test_weyl_action_is_ring_map(p):
    q = MultiPoly.variable(R, 1) + MultiPoly.constant(R, 3)
    for w in weyl_group(R):
        assert weyl_act(w, p * q) == weyl_act(w, p) * weyl_act(w, q)


@given(polys())
def test_derivative_leibniz(p):
    x = MultiPoly.variable(R, 1)
    assert (x * p).derivative(1) == p + x * p.derivative(1)


@given(polys())
def test_json_roundtrip(p):
    assert MultiPoly.from_json(R, p.to_json()) == p


def test_symmetric_roundtrip_and_rejections():
    f = monomial_symmetric((2, 1)).scale(3) + monomial_symmetric((0, 0))
    sym = to_symmetric(f)
    assert sym.coefficient((2, 1)) == 3 and sym.coefficient((0, 0)) == 1
    assert sym.expand() == f
    with pytest.raises(IntegrityError):
        to_symmetric(MultiPoly.monomial((1, 0)))
    with pytest.raises(IntegrityError):
        to_symmetric(MultiPoly.monomial((2, 0)))


def test_evaluate_exact_and_float():
    p = MultiPoly.monomial((2, 1), 3) + MultiPoly.constant(2, -1)
    assert p.evaluate((Fraction(1, 2), 2)) == Fraction(1, 2)
    pts = np.array([[0.5, 2.0], [1.0, 1.0]])
    assert np.allclose(p.evaluate(pts), [0.5, 2.0])


def test_symmetric_poly_evaluate_z():
    s = SymmetricPoly(2, {(1, 0): Fraction(1), (0, 0): Fraction(-2)})
    assert np.allclose(s.evaluate_z(np.array([[0.25, 0.5]])), [0.75 - 2])


def test_reflections_on_monomials():
    p = MultiPoly.monomial((3, 1))
    assert weyl_act(s_ij(2, 1, 2), p) == MultiPoly.monomial((1, 3))
    assert weyl_act(sigma_i(2, 1), p) == MultiPoly.monomial((3, 1), -1)
