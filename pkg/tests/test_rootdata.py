import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bcspherical.errors import ParameterDomainError
from bcspherical.polyalg import MultiPoly, weyl_act
from bcspherical.rootdata import (
    CompactMultiplicity,
    Dominance,
    as_rational,
    canonical_key,
    dominance_leq,
    identity,
    make_root_system,
    orbit_representative,
    orbit_size,
    partitions_of,
    partitions_upto,
    s_ij,
    sigma_i,
    sigma_ij,
    weyl_generators,
    weyl_group,
)


def test_rho_and_multiplicities():
    s = make_root_system(3, 2, 1, 1)
    assert [int(x) for x in s.rho] == [6, 4, 2]
    assert s.rho1 == 6 and s.admissible_nu_bound == 6
    assert (s.k1, s.k2, s.k3) == (1, Fraction(1, 2), 1)


def test_rejects_bad_parameters():
    with pytest.raises(ParameterDomainError):
        make_root_system(0, 1, 1, 1)
    with pytest.raises(ParameterDomainError):
        make_root_system(2, -1, 1, 1)
    with pytest.raises(ParameterDomainError):
        make_root_system(1, 1, 1, 1).check_nu(2)
    with pytest.raises(ParameterDomainError):
        as_rational(0.3)


def test_as_rational_forms():
    assert as_rational("-7/3") == Fraction(-7, 3)
    assert as_rational(Fraction(5, 2)) == Fraction(5, 2)
    assert as_rational(2.0) == 2


def test_compact_multiplicity():
    s = make_root_system(1, 1, 1, 1)
    k = CompactMultiplicity.from_system(s, 4)
    # k2 = (2(8 - 3) + 1)/2, k1 = 3/2 - k2
    assert k.k2nu == Fraction(11, 2) and k.k1nu == -4 and k.k3nu == Fraction(1, 2)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_weyl_group_order_and_closure(r):
    W = weyl_group(r)
    assert len(W) == 2 ** r * [1, 1, 2, 6][r]
    labels = {(w.perm, w.signs) for w in W}
    for u, v in itertools.product(W[:8], W[:8]):
        p = u * v
        assert (p.perm, p.signs) in labels


def test_product_matches_composition_of_actions():
    r = 3
    p = MultiPoly.monomial((3, 1, 2)) + MultiPoly.monomial((0, 2, 1)).scale(5)
    for u, v in itertools.product(weyl_group(r)[::5], weyl_group(r)[::7]):
        assert weyl_act(u * v, p) == weyl_act(u, weyl_act(v, p))


def test_reflections_are_involutions():
    r = 3
    for w in [s_ij(r, 1, 3), sigma_ij(r, 2, 3), sigma_i(r, 2)] + weyl_generators(r):
        assert (w * w).is_identity()
    assert identity(r).is_identity()


def test_partitions():
    assert list(partitions_of(3, 2)) == [(3, 0), (2, 1)]
    parts = partitions_upto(3, 2)
    assert parts[0] == (0, 0) and len(parts) == 6
    assert orbit_representative((0, 2, 1)) == (2, 1, 0)
    assert orbit_size((2, 1, 1)) == 3


def test_dominance_examples():
    assert dominance_leq((1, 1), (2, 0)) is Dominance.LESS
    assert dominance_leq((2, 0), (1, 1)) is Dominance.GREATER
    assert dominance_leq((3, 1, 1, 1), (2, 2, 2, 0)) is Dominance.INCOMPARABLE
    # weight takes part in the comparison
    assert dominance_leq((1, 0), (1, 1)) is Dominance.LESS


partition3 = st.lists(st.integers(0, 4), min_size=3, max_size=3).map(lambda x: tuple(sorted(x, reverse=True)))


@given(partition3, partition3)
def test_canonical_order_extends_dominance(p, q):
    if dominance_leq(p, q) is Dominance.LESS:
        assert canonical_key(p) < canonical_key(q)


@given(partition3, partition3, partition3)
def test_dominance_is_transitive(p, q, s):
    le = lambda x, y: dominance_leq(x, y) in (Dominance.LESS, Dominance.EQUAL)
    if le(p, q) and le(q, s):
        assert le(p, s)
