"""Cherednik operators conjugated by the canonical function, in x = tanh t.

    calD_j = f_{-delta} D_j f_delta
           = delta x_j + (1 - x_j^2) d_j
             - a/2 sum_{i<j} (1+x_i)(1-x_j)/(x_i-x_j) (1 - s_ij)
             + a/2 sum_{k>j} (1+x_j)(1-x_k)/(x_j-x_k) (1 - s_jk)
             + a/2 sum_{k!=j} (1+x_j)(1+x_k)/(x_j+x_k) (1 - sigma_jk)
             + iota/2 (1+x_j)^2/x_j (1 - sigma_j) + b (1+x_j)/x_j (1 - sigma_j)
             - rho_j

Every reflection term is evaluated as shape * exact_divide((1 - w) p, form), so
a wrong assembly shows up as an IntegrityError instead of a silent rational
function.  The module also carries the exact identity checks for the
Bernstein-Sato formula and the two product identities behind it, the triangularity probe, the
transition matrix m_zeta(calD^2) 1 -> m_kappa(x^2) and the l_eta spectral
polynomials obtained from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from .errors import IntegrityError, ParameterDomainError
from .polyalg import MultiPoly, SymmetricPoly, exact_divide, monomial_values, to_symmetric, weyl_act
from .rootdata import (
    Dominance,
    RootSystemBC,
    as_rational,
    canonical_key,
    distinct_permutations,
    dominance_leq,
    is_partition,
    orbit_representative,
    partitions_upto,
    s_ij,
    sigma_i,
    sigma_ij,
)

_ZERO = mpq(0)


@dataclass(frozen=True)
class CherednikParams:
    system: RootSystemBC
    delta: mpq

    def __post_init__(self):
        object.__setattr__(self, "delta", as_rational(self.delta))

    @classmethod
    def for_transform(cls, system: RootSystemBC, nu) -> "CherednikParams":
        """delta = -2 nu with nu in the admissible range."""
        nu = system.check_nu(as_rational(nu))
        return cls(system, -2 * nu)

    @property
    def rank(self):
        return self.system.rank

    def as_dict(self):
        return {**self.system.as_dict(), "delta": str(self.delta)}


def _apply_whole(params: CherednikParams, j: int, p: MultiPoly) -> MultiPoly:
    """calD_j p assembled term by term on the whole polynomial."""
    sysm = params.system
    r = sysm.rank
    if not 1 <= j <= r:
        raise ParameterDomainError(f"index j={j} outside 1..{r}")
    if p.rank != r:
        raise ParameterDomainError("polynomial rank does not match the root system")
    x = [MultiPoly.variable(r, k) for k in range(1, r + 1)]
    one = MultiPoly.constant(r)
    xj = x[j - 1]
    half_a = sysm.a / 2

    dp = p.derivative(j)
    out = (xj * p).scale(params.delta) + dp - xj * xj * dp
    for i in range(1, j):
        g = p - weyl_act(s_ij(r, i, j), p)
        if g:
            q = exact_divide(g, x[i - 1] - xj)
            out = out - ((one + x[i - 1]) * (one - xj) * q).scale(half_a)
    for k in range(j + 1, r + 1):
        g = p - weyl_act(s_ij(r, j, k), p)
        if g:
            q = exact_divide(g, xj - x[k - 1])
            out = out + ((one + xj) * (one - x[k - 1]) * q).scale(half_a)
    for k in range(1, r + 1):
        if k == j:
            continue
        g = p - weyl_act(sigma_ij(r, j, k), p)
        if g:
            q = exact_divide(g, xj + x[k - 1])
            out = out + ((one + xj) * (one + x[k - 1]) * q).scale(half_a)
    g = p - weyl_act(sigma_i(r, j), p)
    if g:
        q = exact_divide(g, xj)
        shape = ((one + xj) * (one + xj)).scale(sysm.iota / 2) + (one + xj).scale(sysm.b)
        out = out + shape * q
    return out - p.scale(sysm.rho[j - 1])


class CherednikOperators:
    """calD_1..calD_r for fixed parameters, with images of monomials cached.

    Instances are not thread-safe; use one per worker.
    """

    def __init__(self, params: CherednikParams):
        self.params = params
        self.rank = params.rank
        self._images: dict = {}

    def monomial_image(self, j: int, exponents) -> dict:
        key = (j, tuple(exponents))
        img = self._images.get(key)
        if img is None:
            img = _apply_whole(self.params, j, MultiPoly.monomial(key[1])).terms
            self._images[key] = img
        return img

    def apply(self, j: int, p: MultiPoly) -> MultiPoly:
        if not 1 <= j <= self.rank:
            raise ParameterDomainError(f"index j={j} outside 1..{self.rank}")
        out: dict = {}
        for e, c in p.terms.items():
            for f, v in self.monomial_image(j, e).items():
                s = out.get(f, _ZERO) + c * v
                if s:
                    out[f] = s
                else:
                    del out[f]
        return MultiPoly(self.rank, out)

    def apply_word(self, word: Sequence[int], p: MultiPoly) -> MultiPoly:
        """Apply calD_{word[0]} ... calD_{word[-1]} to p, rightmost first."""
        for j in reversed(word):
            p = self.apply(j, p)
        return p


def apply_cherednik(params: CherednikParams, j: int, p: MultiPoly) -> MultiPoly:
    return _apply_whole(params, j, p)


# ----------------------------------------------------------------------------
# exact identity checks


def _ones(r):
    return MultiPoly.constant(r)


def verify_ascending_product(params: CherednikParams, j: int, ops: CherednikOperators | None = None) -> MultiPoly:
    """prod_{l<=j} (calD_l + delta + rho_1) 1 - prod (delta + a(l-1)) prod (1 + x_l)."""
    ops = ops or CherednikOperators(params)
    s, r = params.system, params.rank
    shift = params.delta + s.rho1
    f = _ones(r)
    for l in range(1, j + 1):
        f = ops.apply(l, f) + f.scale(shift)
    const = mpq(1)
    expected = _ones(r)
    for l in range(1, j + 1):
        const *= params.delta + s.a * (l - 1)
        expected = expected * (_ones(r) + MultiPoly.variable(r, l))
    return f - expected.scale(const)


def verify_descending_product(params: CherednikParams, j: int, ops: CherednikOperators | None = None) -> MultiPoly:
    """prod_{l>=j} (calD_l - (delta + rho_1)) applied to prod_l (1 + x_l), minus
    prod_{l>=j} (1 - delta - iota - a(r-l)) prod_l (1 + x_l) prod_{l>=j} (1 - x_l)."""
    ops = ops or CherednikOperators(params)
    s, r = params.system, params.rank
    shift = params.delta + s.rho1
    plus = _ones(r)
    for l in range(1, r + 1):
        plus = plus * (_ones(r) + MultiPoly.variable(r, l))
    f = plus
    for l in range(r, j - 1, -1):
        f = ops.apply(l, f) - f.scale(shift)
    const = mpq(1)
    expected = plus
    for l in range(j, r + 1):
        const *= 1 - params.delta - s.iota - s.a * (r - l)
        expected = expected * (_ones(r) - MultiPoly.variable(r, l))
    return f - expected.scale(const)


def bernstein_sato_constant(params: CherednikParams) -> mpq:
    s, r, d = params.system, params.rank, params.delta
    const = mpq(1)
    for j in range(1, r + 1):
        const *= (d + s.a * (j - 1)) * (1 - d - s.iota - s.a * (r - j))
    return const


def verify_bernstein_sato(params: CherednikParams, ops: CherednikOperators | None = None) -> MultiPoly:
    """prod_j (calD_j^2 - (delta + rho_1)^2) 1 - C prod_j (1 - x_j^2).

    Conjugation turns f_{delta-2}/f_delta into prod (1 - x_j^2).
    """
    ops = ops or CherednikOperators(params)
    s, r = params.system, params.rank
    c2 = (params.delta + s.rho1) ** 2
    f = _ones(r)
    for j in range(1, r + 1):
        f = ops.apply(j, ops.apply(j, f)) - f.scale(c2)
    expected = _ones(r)
    for j in range(1, r + 1):
        xj = MultiPoly.variable(r, j)
        expected = expected * (_ones(r) - xj * xj)
    return f - expected.scale(bernstein_sato_constant(params))


# ----------------------------------------------------------------------------
# triangularity


def _raise_at(eta, j):
    e = list(eta)
    e[j - 1] += 1
    return tuple(e)


def leading_coefficient_probe(params: CherednikParams, eta, j: int,
                              ops: CherednikOperators | None = None) -> mpq:
    """Coefficient of x^{eta^j} in calD_j x^eta, read off the operator."""
    ops = ops or CherednikOperators(params)
    img = ops.monomial_image(j, tuple(eta))
    return img.get(_raise_at(eta, j), _ZERO)


def _count_larger_before(eta, j):
    return sum(1 for i in range(j - 1) if eta[i] > eta[j - 1])


def printed_leading_coefficient(params: CherednikParams, eta, j: int) -> mpq:
    """delta + a #{i<j: eta_i > eta_j} + (iota/2)(1 - (-1)^eta_j), as printed."""
    s = params.system
    odd = eta[j - 1] % 2
    return params.delta + s.a * _count_larger_before(eta, j) + (s.iota if odd else 0)


def corrected_leading_coefficient(params: CherednikParams, eta, j: int) -> mpq:
    """Printed form plus the -eta_j coming from (1 - x_j^2) d_j."""
    return printed_leading_coefficient(params, eta, j) - eta[j - 1]


def observed_leading_coefficient(params: CherednikParams, eta, j: int) -> mpq:
    """delta - eta_j + a #{i != j: eta_i > eta_j} + iota [eta_j odd].

    The (1 - s_jk) terms with k > j also reach x^{eta^j} when eta_k > eta_j.
    """
    s = params.system
    e = eta[j - 1]
    larger = sum(1 for i in range(params.rank) if i != j - 1 and eta[i] > e)
    return params.delta - e + s.a * larger + (s.iota if e % 2 else 0)


@dataclass
class TriangularityReport:
    params: CherednikParams
    max_weight: int
    violations: list = field(default_factory=list)  # (eta, j, zeta)
    coefficients: list = field(default_factory=list)  # dicts per (eta, j)

    @property
    def ok(self) -> bool:
        return not self.violations

    def printed_mismatches(self):
        return [c for c in self.coefficients if not c["printed_match"]]

    def corrected_mismatches(self):
        return [c for c in self.coefficients if not c["corrected_match"]]

    def observed_mismatches(self):
        return [c for c in self.coefficients if not c["observed_match"]]


def exponent_tuples(max_degree: int, r: int):
    if r == 0:
        yield ()
        return
    for first in range(max_degree + 1):
        for rest in exponent_tuples(max_degree - first, r - 1):
            yield (first,) + rest


def triangularity_check(params: CherednikParams, max_weight: int,
                        ops: CherednikOperators | None = None) -> TriangularityReport:
    """Every monomial x^zeta in calD_j x^eta must satisfy zeta* <= (eta^j)*.

    Runs over all exponent tuples eta in N^r with |eta| <= max_weight.
    """
    ops = ops or CherednikOperators(params)
    r = params.rank
    rep = TriangularityReport(params, max_weight)
    for eta in exponent_tuples(max_weight, r):
        for j in range(1, r + 1):
            top = orbit_representative(_raise_at(eta, j))
            img = ops.monomial_image(j, eta)
            for zeta in img:
                if dominance_leq(orbit_representative(zeta), top) not in (Dominance.LESS, Dominance.EQUAL):
                    rep.violations.append((eta, j, zeta))
            computed = img.get(_raise_at(eta, j), _ZERO)
            printed = printed_leading_coefficient(params, eta, j)
            corrected = corrected_leading_coefficient(params, eta, j)
            observed = observed_leading_coefficient(params, eta, j)
            rep.coefficients.append({
                "eta": list(eta), "j": j,
                "computed": computed, "printed": printed, "corrected": corrected,
                "observed": observed,
                "printed_match": computed == printed,
                "corrected_match": computed == corrected,
                "observed_match": computed == observed,
            })
    return rep


# ----------------------------------------------------------------------------
# m_eta(calD^2) 1 and the transition matrix


class SymmetrizedPowers:
    """m_zeta(calD_1^2, .., calD_r^2) 1, with words applied right to left and
    intermediate polynomials cached by the applied suffix."""

    def __init__(self, ops: CherednikOperators, reverse: bool = False):
        self.ops = ops
        self.reverse = reverse
        r = ops.rank
        self._cache = {(0,) * r: MultiPoly.constant(r)}

    def word_value(self, e: tuple) -> MultiPoly:
        """calD_1^{e_1} ... calD_r^{e_r} 1 (or the reversed product)."""
        val = self._cache.get(e)
        if val is not None:
            return val
        idx = [k for k, v in enumerate(e) if v]
        k = idx[-1] if self.reverse else idx[0]
        rest = list(e)
        rest[k] -= 1
        val = self.ops.apply(k + 1, self.word_value(tuple(rest)))
        self._cache[e] = val
        return val

    def m_of_squares(self, zeta) -> MultiPoly:
        out = MultiPoly(self.ops.rank)
        for perm in distinct_permutations(zeta):
            out = out + self.word_value(tuple(2 * v for v in perm))
        return out


D_ETA_READINGS = ("printed", "corrected", "observed")


def d_eta_conjecture(params: CherednikParams, eta, reading: str = "corrected") -> mpq:
    """Closed-form guesses for the diagonal entry of m_eta(calD^2) 1.

    reading="printed":   prod_j prod_{k<eta_j} (delta+(r-j)-2k)(delta+(r-j)a+iota-1-2k)
    reading="corrected": same with (r-j)a in the first factor
    reading="observed":  prod_j prod_{k<eta_j} (delta+(j-1)a-2k)(delta+(j-1)a+iota-1-2k)
    """
    if reading not in D_ETA_READINGS:
        raise ParameterDomainError(f"unknown reading {reading!r}; use one of {D_ETA_READINGS}")
    s, r, d = params.system, params.rank, params.delta
    out = mpq(1)
    for j in range(1, r + 1):
        if reading == "observed":
            shift1 = shift2 = (j - 1) * s.a
        else:
            shift2 = (r - j) * s.a
            shift1 = shift2 if reading == "corrected" else mpq(r - j)
        for k in range(eta[j - 1]):
            out *= (d + shift1 - 2 * k) * (d + shift2 + s.iota - 1 - 2 * k)
    return out


@dataclass
class TransitionMatrix:
    params: CherednikParams
    max_weight: int
    order: list
    rows: dict  # zeta -> {kappa: mpq}
    incomparable_entries: list = field(default_factory=list)

    def entry(self, zeta, kappa) -> mpq:
        return self.rows[tuple(zeta)].get(tuple(kappa), _ZERO)

    def diagonal(self, eta) -> mpq:
        return self.entry(eta, eta)

    def row_poly(self, zeta) -> SymmetricPoly:
        return SymmetricPoly(self.params.rank, self.rows[tuple(zeta)])

    def as_lists(self) -> list:
        return [[self.entry(z, k) for k in self.order] for z in self.order]

    def to_csv_rows(self) -> list:
        header = ["row\\col"] + [_label(k) for k in self.order]
        body = [[_label(z)] + [str(self.entry(z, k)) for k in self.order] for z in self.order]
        return [header] + body


def _label(p) -> str:
    return "(" + ",".join(str(x) for x in p) + ")"


def build_transition_matrix(params: CherednikParams, max_weight: int,
                            ops: CherednikOperators | None = None) -> TransitionMatrix:
    """Row zeta holds the m_kappa(x^2) coordinates of m_zeta(calD^2) 1."""
    ops = ops or CherednikOperators(params)
    powers = SymmetrizedPowers(ops)
    order = partitions_upto(max_weight, params.rank)
    pos = {p: i for i, p in enumerate(order)}
    rows = {}
    incomparable = []
    for zeta in order:
        sym = to_symmetric(powers.m_of_squares(zeta))  # raises on failed W-invariance
        for kappa in sym.coeffs:
            if kappa not in pos or pos[kappa] > pos[zeta]:
                raise IntegrityError(f"m_{zeta}(D^2)1 has a term m_{kappa} above the diagonal")
            if kappa != zeta and dominance_leq(kappa, zeta) is not Dominance.LESS:
                incomparable.append((zeta, kappa))
        if not sym.coefficient(zeta):
            raise IntegrityError(f"vanishing diagonal entry d_{zeta} at delta={params.delta}")
        rows[zeta] = dict(sym.coeffs)
    return TransitionMatrix(params, max_weight, order, rows, incomparable)


# ----------------------------------------------------------------------------
# spectral polynomials


class SpectralPolynomial:
    """sum_eta c_eta m_eta(lambda_1^2, .., lambda_r^2)."""

    __slots__ = ("rank", "coeffs")

    def __init__(self, rank: int, coeffs: dict | None = None):
        self.rank = rank
        self.coeffs = {tuple(k): v for k, v in (coeffs or {}).items() if v}

    def partitions(self):
        return sorted(self.coeffs, key=canonical_key)

    def coefficient(self, eta):
        return self.coeffs.get(tuple(eta), 0)

    def leading_partition(self):
        return self.partitions()[-1] if self.coeffs else None

    def evaluate(self, lam) -> np.ndarray:
        """Evaluate at spectral points lam of shape (..., r), complex allowed."""
        lam = np.asarray(lam)
        sq = lam * lam
        total = np.zeros(sq.shape[:-1], dtype=sq.dtype)
        for eta, c in self.coeffs.items():
            total = total + float(c) * monomial_values(eta, sq)
        return total

    def evaluate_imaginary(self, u) -> np.ndarray:
        """Evaluate at lam = i u (u real), where lam_j^2 = -u_j^2; real result."""
        u = np.asarray(u, dtype=float)
        sq = -(u * u)
        total = np.zeros(sq.shape[:-1])
        for eta, c in self.coeffs.items():
            total = total + float(c) * monomial_values(eta, sq)
        return total

    def evaluate_exact(self, lam) -> mpq:
        lam = [as_rational(v) for v in lam]
        total = mpq(0)
        for eta, c in self.coeffs.items():
            for perm in distinct_permutations(eta):
                term = mpq(c)
                for v, p in zip(lam, perm):
                    term *= (v * v) ** p
                total += term
        return total

    def scale(self, c) -> "SpectralPolynomial":
        return SpectralPolynomial(self.rank, {k: v * c for k, v in self.coeffs.items()})

    def vector(self, order: list) -> np.ndarray:
        return np.array([float(self.coefficient(p)) for p in order])

    def to_json(self) -> list:
        return [
            {"partition": list(k), "coeff": str(v) if isinstance(v, type(_ZERO)) else float(v)}
            for k, v in ((k, self.coeffs[k]) for k in self.partitions())
        ]

    def __repr__(self):
        return "SpectralPolynomial(" + ", ".join(f"{k}: {self.coeffs[k]}" for k in self.partitions()) + ")"


def l_polynomial(params: CherednikParams, eta, M: TransitionMatrix) -> SpectralPolynomial:
    """Row eta of M^{-1}, read in the basis m_zeta(lambda^2).

    m_eta(x^2) = sum_zeta (M^{-1})[eta, zeta] m_zeta(calD^2) 1 and the spherical
    transform replaces m_zeta(calD^2) by m_zeta(lambda^2).
    """
    eta = tuple(eta)
    if M.params != params:
        raise ParameterDomainError("transition matrix built with different parameters")
    if eta not in M.rows:
        raise ParameterDomainError(f"|{eta}| exceeds the matrix max weight {M.max_weight}")
    pos = {p: i for i, p in enumerate(M.order)}
    top = pos[eta]
    sol = {}
    for k in range(top, -1, -1):
        kappa = M.order[k]
        diag = M.diagonal(kappa)
        if not diag:
            raise ParameterDomainError(f"singular diagonal at {kappa}: inadmissible delta")
        if k == top:
            sol[kappa] = 1 / diag
            continue
        acc = _ZERO
        for m in range(k + 1, top + 1):
            zeta = M.order[m]
            if zeta in sol:
                acc += sol[zeta] * M.entry(zeta, kappa)
        if acc:
            sol[kappa] = -acc / diag
    return SpectralPolynomial(params.rank, sol)


def l_polynomials(params: CherednikParams, M: TransitionMatrix) -> dict:
    return {eta: l_polynomial(params, eta, M) for eta in M.order}


def check_partition(eta, r):
    eta = tuple(int(x) for x in eta)
    if len(eta) != r or not is_partition(eta):
        raise ParameterDomainError(f"{eta} is not a rank-{r} partition")
    return eta
