"""Exact sparse multivariate polynomials over Q in x_1..x_r.

Terms are stored as ``{exponent tuple: mpq}`` with zero coefficients never
kept.  Serialization orders terms graded-lexicographically, highest first.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np
from gmpy2 import mpq

from .errors import IntegrityError, ParameterDomainError
from .rootdata import (
    WeylElement,
    as_rational,
    canonical_key,
    distinct_permutations,
    is_partition,
    orbit_representative,
    weyl_generators,
)

_ZERO = mpq(0)
_ONE = mpq(1)


def _graded_key(e):
    return (sum(e), e)


class MultiPoly:
    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: Mapping | None = None):
        self.rank = rank
        clean = {}
        if terms:
            for e, c in terms.items():
                if len(e) != rank:
                    raise ParameterDomainError(f"exponent {e} does not have length {rank}")
                if c:
                    clean[tuple(e)] = c if isinstance(c, type(_ONE)) else as_rational(c)
        self.terms = clean

    # constructors -----------------------------------------------------------

    @classmethod
    def constant(cls, rank: int, c=1) -> "MultiPoly":
        return cls(rank, {(0,) * rank: as_rational(c)})

    @classmethod
    def variable(cls, rank: int, j: int) -> "MultiPoly":
        """x_j, 1-indexed."""
        e = [0] * rank
        e[j - 1] = 1
        return cls(rank, {tuple(e): _ONE})

    @classmethod
    def monomial(cls, exponents, c=1) -> "MultiPoly":
        exponents = tuple(int(x) for x in exponents)
        return cls(len(exponents), {exponents: as_rational(c)})

    @classmethod
    def _raw(cls, rank, terms):
        out = cls.__new__(cls)
        out.rank = rank
        out.terms = terms
        return out

    # arithmetic -------------------------------------------------------------

    def _check(self, other):
        if self.rank != other.rank:
            raise ParameterDomainError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.rank, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, _ZERO) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.rank, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.rank, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.rank, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "MultiPoly":
        c = as_rational(c)
        if not c:
            return MultiPoly(self.rank)
        return MultiPoly._raw(self.rank, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, _ZERO) + c1 * c2
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MultiPoly._raw(self.rank, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = MultiPoly.constant(self.rank)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.rank == other.rank and self.terms == other.terms
        if isinstance(other, (int, type(_ONE))):
            return self == MultiPoly.constant(self.rank, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.rank, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # inspection -------------------------------------------------------------

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def coeff(self, exponents) -> mpq:
        return self.terms.get(tuple(exponents), _ZERO)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _graded_key(kv[0]), reverse=True)

    def is_even(self) -> bool:
        return all(x % 2 == 0 for e in self.terms for x in e)

    def derivative(self, j: int) -> "MultiPoly":
        """d/dx_j, 1-indexed."""
        k = j - 1
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                f = list(e)
                f[k] -= 1
                out[tuple(f)] = c * e[k]
        return MultiPoly._raw(self.rank, out)

    def evaluate(self, point):
        """Evaluate at a point.  Rational inputs give an exact result; numpy
        arrays of shape (..., r) are evaluated in floating point."""
        if isinstance(point, np.ndarray):
            pts = np.asarray(point)
            total = np.zeros(pts.shape[:-1], dtype=np.result_type(pts.dtype, float))
            for e, c in self.terms.items():
                term = np.full(pts.shape[:-1], float(c), dtype=total.dtype)
                for k, p in enumerate(e):
                    if p:
                        term = term * pts[..., k] ** p
                total = total + term
            return total
        vals = [as_rational(v) if not isinstance(v, (float, complex)) else v for v in point]
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, p in zip(vals, e):
                if p:
                    term = term * v**p
            total = total + term
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"x{k + 1}" if p == 1 else f"x{k + 1}^{p}" for k, p in enumerate(e) if p
            )
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def to_json(self) -> list:
        return [{"exponents": list(e), "coeff": str(c)} for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, rank: int, data: Iterable[dict]) -> "MultiPoly":
        return cls(rank, {tuple(t["exponents"]): as_rational(t["coeff"]) for t in data})


# ----------------------------------------------------------------------------
# Weyl action and exact division


def weyl_act(w: WeylElement, p: MultiPoly) -> MultiPoly:
    """Substitute x_i -> signs[i] * x_perm[i]."""
    if w.rank != p.rank:
        raise ParameterDomainError(f"rank mismatch: {w.rank} vs {p.rank}")
    out = {}
    for e, c in p.terms.items():
        f = [0] * p.rank
        sign = 1
        for i, ei in enumerate(e):
            f[w.perm[i]] += ei
            if w.signs[i] < 0 and ei % 2:
                sign = -sign
        out[tuple(f)] = c if sign > 0 else -c
    return MultiPoly._raw(p.rank, out)


def exact_divide(p: MultiPoly, d: MultiPoly) -> MultiPoly:
    """Quotient q with q * d == p; IntegrityError carrying the remainder if
    the division is not exact.

    Plain multivariate long division with respect to lex order; exact
    whenever d divides p.
    """
    if p.rank != d.rank:
        raise ParameterDomainError("rank mismatch in exact_divide")
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lead_e, lead_c = max(d.terms.items(), key=lambda kv: kv[0])
    rem = dict(p.terms)
    quot: dict = {}
    while rem:
        e = max(rem)
        if any(a < b for a, b in zip(e, lead_e)):
            raise IntegrityError(
                f"non-exact division: leading term x^{e} not divisible by x^{lead_e}",
                remainder=MultiPoly._raw(p.rank, rem),
            )
        qe = tuple(a - b for a, b in zip(e, lead_e))
        qc = rem[e] / lead_c
        quot[qe] = quot.get(qe, _ZERO) + qc
        for de, dc in d.terms.items():
            f = tuple(a + b for a, b in zip(qe, de))
            v = rem.get(f, _ZERO) - qc * dc
            if v:
                rem[f] = v
            else:
                rem.pop(f, None)
    return MultiPoly(p.rank, quot)


# ----------------------------------------------------------------------------
# symmetric functions in the squares x_j^2


def monomial_symmetric(eta, squared: bool = True) -> MultiPoly:
    """m_eta, as a polynomial in x; with ``squared`` it is m_eta(x_1^2, ..)."""
    eta = tuple(int(x) for x in eta)
    if not is_partition(eta):
        raise ParameterDomainError(f"{eta} is not a partition")
    mult = 2 if squared else 1
    return MultiPoly(
        len(eta), {tuple(mult * x for x in zeta): _ONE for zeta in distinct_permutations(eta)}
    )


class SymmetricPoly:
    """Coordinates in the basis {m_eta(x_1^2, ..., x_r^2)}.

    Coefficients may be exact rationals or floats (quadrature-built families).
    """

    __slots__ = ("rank", "coeffs")

    def __init__(self, rank: int, coeffs: Mapping | None = None):
        self.rank = rank
        clean = {}
        for eta, c in (coeffs or {}).items():
            eta = tuple(int(x) for x in eta)
            if len(eta) != rank or not is_partition(eta):
                raise ParameterDomainError(f"{eta} is not a rank-{rank} partition")
            if c:
                clean[eta] = c
        self.coeffs = clean

    def is_exact(self) -> bool:
        return all(isinstance(c, type(_ONE)) for c in self.coeffs.values())

    def partitions(self) -> list:
        return sorted(self.coeffs, key=canonical_key)

    def expand(self) -> MultiPoly:
        if not self.is_exact():
            raise ParameterDomainError("only exact symmetric polynomials expand to MultiPoly")
        out = MultiPoly(self.rank)
        for eta, c in self.coeffs.items():
            out = out + monomial_symmetric(eta).scale(c)
        return out

    def evaluate_z(self, z: np.ndarray) -> np.ndarray:
        """Float evaluation at z_j = x_j^2; z has shape (..., r)."""
        z = np.asarray(z, dtype=float)
        total = np.zeros(z.shape[:-1])
        for eta, c in self.coeffs.items():
            total = total + float(c) * monomial_values(eta, z)
        return total

    def coefficient(self, eta) -> object:
        return self.coeffs.get(tuple(eta), 0)

    def __add__(self, other: "SymmetricPoly") -> "SymmetricPoly":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return SymmetricPoly(self.rank, out)

    def scale(self, c) -> "SymmetricPoly":
        return SymmetricPoly(self.rank, {k: v * c for k, v in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, SymmetricPoly):
            return NotImplemented
        return self.rank == other.rank and self.coeffs == other.coeffs

    def __repr__(self):
        return "SymmetricPoly(" + ", ".join(f"{k}: {self.coeffs[k]}" for k in self.partitions()) + ")"

    def to_json(self) -> list:
        return [
            {"partition": list(k), "coeff": str(v) if isinstance(v, type(_ONE)) else float(v)}
            for k, v in ((k, self.coeffs[k]) for k in self.partitions())
        ]


def monomial_values(eta, y: np.ndarray) -> np.ndarray:
    """m_eta(y_1, .., y_r) evaluated on an array of shape (..., r)."""
    total = np.zeros(y.shape[:-1], dtype=y.dtype)
    for zeta in distinct_permutations(eta):
        term = np.ones(y.shape[:-1], dtype=y.dtype)
        for k, p in enumerate(zeta):
            if p:
                term = term * y[..., k] ** p
        total = total + term
    return total


def check_weyl_invariant(p: MultiPoly) -> None:
    for w in weyl_generators(p.rank):
        if weyl_act(w, p) != p:
            raise IntegrityError(f"polynomial is not W-invariant: fails under {w.label()}", element=w)


def to_symmetric(p: MultiPoly) -> SymmetricPoly:
    """Coordinates of an even W-invariant polynomial in the m_eta(x^2) basis."""
    if not p.is_even():
        odd = next(e for e in p.terms if any(x % 2 for x in e))
        raise IntegrityError(f"polynomial is not even: term x^{odd}")
    check_weyl_invariant(p)
    coeffs = {}
    for e, c in p.terms.items():
        eta = orbit_representative(tuple(x // 2 for x in e))
        if eta in coeffs:
            if coeffs[eta] != c:
                raise IntegrityError(f"orbit of {eta} carries unequal coefficients")
        else:
            coeffs[eta] = c
    return SymmetricPoly(p.rank, coeffs)
