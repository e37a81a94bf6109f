"""Root data of type BC_r: multiplicities, rho, the signed permutation group
and partitions with the dominance order.

Coordinates are 1-indexed in the public API (``j = 1..r``) and 0-indexed in
tuples.  All multiplicities are exact rationals (``gmpy2.mpq``).
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from gmpy2 import mpq

from .errors import ParameterDomainError

Partition = tuple  # weakly decreasing tuple of non-negative ints, padded to rank


def as_rational(value) -> mpq:
    """Convert int, Fraction, mpq or a ``"p/q"`` string to an exact rational.

    Floats are rejected unless they are integral; exact paths must never be
    contaminated by binary rounding.
    """
    if isinstance(value, type(mpq())):
        return value
    if isinstance(value, bool):
        raise ParameterDomainError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        try:
            return mpq(text)
        except ValueError:
            try:
                return as_rational(Fraction(text))
            except ValueError:
                raise ParameterDomainError(f"cannot parse rational {value!r}") from None
    if isinstance(value, float):
        if value.is_integer():
            return mpq(int(value))
        raise ParameterDomainError(f"float {value!r} given where an exact rational is required")
    raise ParameterDomainError(f"not a rational: {value!r}")


def rational_str(q) -> str:
    return str(as_rational(q))


@dataclass(frozen=True)
class RootSystemBC:
    """BC_r with multiplicities (k1, k2, k3) = (b, iota/2, a/2)."""

    rank: int
    a: mpq
    b: mpq
    iota: mpq
    rho: tuple = field(init=False)

    def __post_init__(self):
        if not isinstance(self.rank, int) or self.rank < 1:
            raise ParameterDomainError(f"rank must be a positive integer, got {self.rank!r}")
        for name in ("a", "b", "iota"):
            val = as_rational(getattr(self, name))
            if val <= 0:
                raise ParameterDomainError(f"multiplicity {name} must be positive, got {val}")
            object.__setattr__(self, name, val)
        r = self.rank
        rho = tuple(self.iota + self.b + (r - j) * self.a for j in range(1, r + 1))
        object.__setattr__(self, "rho", rho)

    @property
    def k1(self):
        return self.b

    @property
    def k2(self):
        return self.iota / 2

    @property
    def k3(self):
        return self.a / 2

    @property
    def rho1(self):
        return self.rho[0]

    @property
    def admissible_nu_bound(self):
        """nu must exceed iota + b + a(r-1) = rho_1 for every transform result."""
        return self.iota + self.b + self.a * (self.rank - 1)

    def check_nu(self, nu):
        nu = as_rational(nu) if not isinstance(nu, float) else nu
        if not nu > self.admissible_nu_bound:
            raise ParameterDomainError(
                f"nu={nu} not admissible: need nu > iota + b + a(r-1) = {self.admissible_nu_bound}"
            )
        return nu

    def as_dict(self) -> dict:
        return {
            "r": self.rank,
            "a": str(self.a),
            "b": str(self.b),
            "iota": str(self.iota),
            "rho": [str(x) for x in self.rho],
        }


def make_root_system(r: int, a, b, iota) -> RootSystemBC:
    return RootSystemBC(r, as_rational(a), as_rational(b), as_rational(iota))


@dataclass(frozen=True)
class CompactMultiplicity:
    """Multiplicities k^(nu) of the compact-torus weight attached to nu."""

    k1nu: mpq
    k2nu: mpq
    k3nu: mpq

    @classmethod
    def from_system(cls, system: RootSystemBC, nu) -> "CompactMultiplicity":
        nu = as_rational(nu)
        r = system.rank
        k2 = (2 * (2 * nu - (1 + system.iota + system.b + system.a * (r - 1))) + 1) / 2
        k1 = (system.iota + 2 * system.b) / 2 - k2
        return cls(k1, k2, system.a / 2)


# ----------------------------------------------------------------------------
# partitions


def is_partition(parts: Sequence[int]) -> bool:
    return all(p >= 0 for p in parts) and all(
        parts[i] >= parts[i + 1] for i in range(len(parts) - 1)
    )


def orbit_representative(exponents: Sequence[int]) -> Partition:
    """The unique partition in the S_r-orbit of an exponent tuple."""
    if any(e < 0 for e in exponents):
        raise ParameterDomainError(f"negative exponent in {tuple(exponents)}")
    return tuple(sorted((int(e) for e in exponents), reverse=True))


class Dominance(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


def _partial_sums(p):
    return list(itertools.accumulate(p))


def dominance_leq(p: Sequence[int], q: Sequence[int]) -> Dominance:
    """Compare by partial sums: p <= q iff p_1+..+p_k <= q_1+..+q_k for all k.

    The full sum takes part in the comparison, so partitions of different
    weight can still be comparable.
    """
    if len(p) != len(q):
        raise ParameterDomainError(f"rank mismatch: {tuple(p)} vs {tuple(q)}")
    if tuple(p) == tuple(q):
        return Dominance.EQUAL
    sp, sq = _partial_sums(p), _partial_sums(q)
    if all(x <= y for x, y in zip(sp, sq)):
        return Dominance.LESS
    if all(x >= y for x, y in zip(sp, sq)):
        return Dominance.GREATER
    return Dominance.INCOMPARABLE


def dominated_by(p, q) -> bool:
    """True if p <= q in dominance (including equality)."""
    return dominance_leq(p, q) in (Dominance.LESS, Dominance.EQUAL)


def canonical_key(p: Sequence[int]):
    """Weight-graded lexicographic key; a linear extension of dominance."""
    return (sum(p), tuple(p))


def partitions_of(n: int, r: int, max_part: int | None = None) -> Iterator[Partition]:
    """Partitions of n into at most r parts, padded with zeros to length r."""
    if max_part is None:
        max_part = n
    if r == 0:
        if n == 0:
            yield ()
        return
    if n == 0:
        yield (0,) * r
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions_of(n - first, r - 1, first):
            yield (first,) + rest


def partitions_upto(max_weight: int, r: int) -> list:
    """All partitions with weight <= max_weight, in canonical order."""
    out = [p for n in range(max_weight + 1) for p in partitions_of(n, r)]
    return sorted(out, key=canonical_key)


def distinct_permutations(p: Sequence[int]) -> list:
    return sorted(set(itertools.permutations(p)), reverse=True)


def orbit_size(p: Sequence[int]) -> int:
    counts = {}
    for x in p:
        counts[x] = counts.get(x, 0) + 1
    size = math.factorial(len(p))
    for c in counts.values():
        size //= math.factorial(c)
    return size


# ----------------------------------------------------------------------------
# Weyl group W = S_r x Z_2^r


@dataclass(frozen=True)
class WeylElement:
    """Signed permutation acting by the substitution x_i -> signs[i] * x_perm[i].

    ``perm`` and ``signs`` are 0-indexed tuples.
    """

    perm: tuple
    signs: tuple

    def __post_init__(self):
        r = len(self.perm)
        if sorted(self.perm) != list(range(r)) or len(self.signs) != r:
            raise ParameterDomainError(f"not a signed permutation: {self.perm}, {self.signs}")
        if any(s not in (1, -1) for s in self.signs):
            raise ParameterDomainError(f"signs must be +-1: {self.signs}")

    @property
    def rank(self):
        return len(self.perm)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        # act(self * other, p) == act(self, act(other, p))
        perm = tuple(self.perm[other.perm[i]] for i in range(self.rank))
        signs = tuple(other.signs[i] * self.signs[other.perm[i]] for i in range(self.rank))
        return WeylElement(perm, signs)

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.rank)) and all(s == 1 for s in self.signs)

    def apply_to_point(self, x):
        """Image of a coordinate vector under the substitution."""
        return tuple(self.signs[i] * x[self.perm[i]] for i in range(self.rank))

    def label(self) -> str:
        return f"perm={list(self.perm)} signs={list(self.signs)}"


def identity(r: int) -> WeylElement:
    return WeylElement(tuple(range(r)), (1,) * r)


def s_ij(r: int, i: int, j: int) -> WeylElement:
    """Transposition of coordinates i and j (1-indexed)."""
    perm = list(range(r))
    perm[i - 1], perm[j - 1] = j - 1, i - 1
    return WeylElement(tuple(perm), (1,) * r)


def sigma_ij(r: int, i: int, j: int) -> WeylElement:
    """x_i -> -x_j, x_j -> -x_i."""
    perm = list(range(r))
    perm[i - 1], perm[j - 1] = j - 1, i - 1
    signs = [1] * r
    signs[i - 1] = signs[j - 1] = -1
    return WeylElement(tuple(perm), tuple(signs))


def sigma_i(r: int, i: int) -> WeylElement:
    signs = [1] * r
    signs[i - 1] = -1
    return WeylElement(tuple(range(r)), tuple(signs))


def weyl_generators(r: int) -> list:
    """Simple reflections s_{i,i+1} and sigma_r; they generate W."""
    gens = [s_ij(r, i, i + 1) for i in range(1, r)]
    gens.append(sigma_i(r, r))
    return gens


def weyl_group(r: int) -> list:
    out = []
    for perm in itertools.permutations(range(r)):
        for signs in itertools.product((1, -1), repeat=r):
            out.append(WeylElement(perm, signs))
    return out
