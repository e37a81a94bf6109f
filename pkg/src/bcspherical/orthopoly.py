"""Orthogonal families on both sides of the spherical transform.

Compact side: Jacobi polynomials P_{nu,eta} = 2^{2|eta|} m_eta(x^2) + lower,
orthogonal for the weight attached to nu.  Non-compact side: the Jacobi-type
functions H_{nu,eta}(t) = f_{-2nu}(t) P_{nu,eta}(tanh t).  Spectral side: their
transforms f~_{-2nu} q_{nu,eta}, with q assembled from the l_eta polynomials,
and the Macdonald-Koornwinder polynomials built independently by Gram-Schmidt
against f~^2 |c|^{-2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .cherednik import (
    CherednikParams,
    SpectralPolynomial,
    TransitionMatrix,
    build_transition_matrix,
    l_polynomials,
)
from .errors import ConditioningError, ParameterDomainError
from .gammacore import n_nu
from .quadrature import (
    _is_even_integer,
    compact_gram,
    compact_inner_product,
    exact_compact_inner_product,
    log_f_delta,
    noncompact_integral,
    spectral_constant,
    spectral_gram,
)
from .polyalg import SymmetricPoly
from .rootdata import RootSystemBC, dominated_by, partitions_upto


# ----------------------------------------------------------------------------
# Gram-Schmidt in a coefficient basis


def _triangular_gram_schmidt(G: np.ndarray, leads: list, tol: float = 1e-13) -> tuple:
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Works in the diagonally scaled metric D G D (D = diag G^{-1/2}) and
    returns the coefficient matrix C (row k is the k-th orthogonal vector in
    the original basis, with C[k, k] = leads[k]) and the condition number of
    the scaled Gram matrix.
    """
    n = G.shape[0]
    d = 1 / np.sqrt(np.diag(G))
    Gs = G * d[:, None] * d[None, :]
    cond = float(np.linalg.cond(Gs)) if n else 1.0
    Q = np.zeros((n, n))
    C = np.zeros((n, n))
    for k in range(n):
        v = np.zeros(n)
        v[k] = 1.0
        for _ in range(2):
            for j in range(k):
                v = v - (Q[j] @ Gs @ v) * Q[j]
        norm2 = float(v @ Gs @ v)
        if not norm2 > tol:
            raise ConditioningError(
                f"Gram matrix numerically singular at basis element {k} "
                f"(residual norm^2 {norm2:.3g}, condition {cond:.3g}); raise the order or lower max weight"
            )
        Q[k] = v / math.sqrt(norm2)
        c = v * d
        C[k] = c * (leads[k] / c[k])
        C[k, k] = leads[k]  # pin exactly
    return C, cond


def _exact_gram_schmidt(inner, basis: list, leads: list) -> list:
    """Rational Gram-Schmidt; inner(i, j) returns exact <b_i, b_j>."""
    n = len(basis)
    G = [[inner(i, j) for j in range(n)] for i in range(n)]
    rows = []
    norms = []
    for k in range(n):
        c = [mpq(0)] * n
        c[k] = mpq(1)
        for j in range(k):
            num = sum(rows[j][m] * G[k][m] for m in range(n) if rows[j][m])
            coef = num / norms[j]
            for m in range(n):
                if rows[j][m]:
                    c[m] -= coef * rows[j][m]
        nrm = sum(c[i] * c[m] * G[i][m] for i in range(n) if c[i] for m in range(n) if c[m])
        if nrm <= 0:
            raise ConditioningError(f"exact Gram matrix is not positive definite at {basis[k]}")
        rows.append(c)
        norms.append(nrm)
    return [[x * leads[k] for x in rows[k]] for k in range(n)]


def dominance_extensions(max_weight: int, r: int, alternative: bool = False) -> list:
    """Canonical order, or a different linear extension of dominance that
    reverses the tie-breaking among incomparable partitions."""
    parts = partitions_upto(max_weight, r)
    if not alternative:
        return parts
    remaining = list(parts)
    out = []
    while remaining:
        minimal = [p for p in remaining
                   if not any(q != p and dominated_by(q, p) for q in remaining)]
        # largest weight first, then lexicographically smallest
        pick = sorted(minimal, key=lambda p: (-sum(p), p))[0]
        out.append(pick)
        remaining.remove(pick)
    return out


# ----------------------------------------------------------------------------
# compact side


@dataclass
class JacobiFamily:
    system: RootSystemBC
    nu: object
    max_weight: int
    basis: list
    polys: dict
    norms: dict
    order: int | None = None
    method: str = "quadrature"
    condition: float = 1.0

    def coefficient_matrix(self) -> np.ndarray:
        return np.array([[float(self.polys[e].coefficient(z)) for z in self.basis] for e in self.basis])

    def to_json(self) -> dict:
        return {
            "nu": str(self.nu), "max_weight": self.max_weight, "method": self.method,
            "order": self.order, "condition": self.condition,
            "polynomials": [
                {"partition": list(e), "coefficients": self.polys[e].to_json(), "norm2": float(self.norms[e])}
                for e in self.basis
            ],
        }


def compact_order(system: RootSystemBC, max_weight: int) -> int:
    return 2 * max_weight + 4 + int(math.ceil(float(system.a))) * (system.rank - 1)


def gram_schmidt_jacobi(system: RootSystemBC, nu, max_weight: int, order: int | None = None,
                        exact: bool | None = None, basis: list | None = None,
                        method: str = "auto") -> JacobiFamily:
    """P_{nu,eta} for |eta| <= max_weight, leading coefficient 2^{2|eta|}.

    exact=None picks the rational path whenever it is available (rank one or
    even integer a).
    """
    system.check_nu(nu)
    r = system.rank
    basis = basis or partitions_upto(max_weight, r)
    leads = [4 ** sum(e) for e in basis]
    can_exact = r == 1 or _is_even_integer(system.a)
    if exact is None:
        exact = can_exact and not isinstance(nu, float)
    if exact and not can_exact:
        raise ParameterDomainError("exact Gram-Schmidt needs rank one or even integer a")
    if exact:
        mono = [SymmetricPoly(r, {e: mpq(1)}) for e in basis]
        cache = {}

        def inner(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                cache[key] = exact_compact_inner_product(system, nu, mono[key[0]], mono[key[1]])
            return cache[key].normalized

        rows = _exact_gram_schmidt(inner, basis, leads)
        scale = exact_compact_inner_product(system, nu, mono[0], mono[0]).log_scale
        polys = {e: SymmetricPoly(r, dict(zip(basis, rows[k]))) for k, e in enumerate(basis)}
        norms = {}
        for k, e in enumerate(basis):
            val = exact_compact_inner_product(system, nu, polys[e], polys[e])
            norms[e] = float(val.normalized) * math.exp(scale)
        return JacobiFamily(system, nu, max_weight, basis, polys, norms, None, "exact", 1.0)
    order = order or compact_order(system, max_weight)
    G = compact_gram(system, nu, basis, order, method)
    C, cond = _triangular_gram_schmidt(G, leads)
    polys = {e: SymmetricPoly(r, {z: C[k, m] for m, z in enumerate(basis) if C[k, m]})
             for k, e in enumerate(basis)}
    norms = {e: float(C[k] @ G @ C[k]) for k, e in enumerate(basis)}
    return JacobiFamily(system, nu, max_weight, basis, polys, norms, order, "quadrature", cond)


def jacobi_norms(family: JacobiFamily) -> dict:
    return dict(family.norms)


def orthogonality_defects(family: JacobiFamily, order: int | None = None, method: str = "auto") -> dict:
    """max_{zeta != eta} |<P_eta, P_zeta>| / (|P_eta| |P_zeta|), recomputed on a
    grid independent of the one used to build the family."""
    sysm, basis = family.system, family.basis
    order = order or 2 * compact_order(sysm, family.max_weight)
    G = compact_gram(sysm, family.nu, basis, order, method)
    C = family.coefficient_matrix()
    H = C @ G @ C.T
    nrm = np.sqrt(np.diag(H))
    out = {}
    for k, e in enumerate(basis):
        off = [abs(H[k, m]) / (nrm[k] * nrm[m]) for m in range(len(basis)) if m != k]
        out[e] = max(off, default=0.0)
    return out


def triangularity_defect(family: JacobiFamily) -> float:
    """Largest |coefficient| of P_eta on m_zeta with zeta not dominated by eta,
    relative to the leading coefficient."""
    worst = 0.0
    for e in family.basis:
        lead = abs(float(family.polys[e].coefficient(e)))
        for z, c in family.polys[e].coeffs.items():
            if z != e and not dominated_by(z, e):
                worst = max(worst, abs(float(c)) / lead)
    return worst


def order_independence_defect(system: RootSystemBC, nu, max_weight: int, **kw) -> float:
    """Max coefficient change of P_eta between two linear extensions of dominance."""
    a = gram_schmidt_jacobi(system, nu, max_weight, basis=dominance_extensions(max_weight, system.rank), **kw)
    b = gram_schmidt_jacobi(system, nu, max_weight,
                            basis=dominance_extensions(max_weight, system.rank, alternative=True), **kw)
    worst = 0.0
    for e in a.basis:
        pa, pb = a.polys[e], b.polys[e]
        scale = max(abs(float(c)) for c in pa.coeffs.values())
        for z in set(pa.coeffs) | set(pb.coeffs):
            worst = max(worst, abs(float(pa.coefficient(z)) - float(pb.coefficient(z))) / scale)
    return worst


@dataclass
class JacobiTypeFunction:
    """H_{nu,eta}(t) = f_{-2nu}(t) P_{nu,eta}(tanh t_1, .., tanh t_r)."""

    nu: object
    eta: tuple
    poly: SymmetricPoly

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        z = np.tanh(t) ** 2
        return np.exp(log_f_delta(t, -2 * float(self.nu))) * self.poly.evaluate_z(z)


def norm_transfer_check(system: RootSystemBC, nu, eta, order: int = 60, family: JacobiFamily | None = None) -> dict:
    """|H_eta|^2 in L^2(dmu) against (P_eta, P_eta) on the compact side."""
    eta = tuple(eta)
    family = family or gram_schmidt_jacobi(system, nu, sum(eta))
    P = family.polys[eta]
    H = JacobiTypeFunction(nu, eta, P)
    # one factor f_{-2nu} sits in the grid weight, the other in the integrand
    lhs = noncompact_integral(system, lambda t: H(t) * P.evaluate_z(np.tanh(t) ** 2), nu, order)
    rhs = compact_inner_product(system, nu, P, P, order=order)
    return {"eta": eta, "noncompact": lhs, "compact": rhs, "rel_error": abs(lhs - rhs) / abs(rhs)}


# ----------------------------------------------------------------------------
# spectral side


@dataclass
class SpectralFamily:
    system: RootSystemBC
    nu: object
    max_weight: int
    basis: list
    qpolys: dict = field(default_factory=dict)
    mkpolys: dict = field(default_factory=dict)
    q_norms: dict = field(default_factory=dict)
    mk_norms: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)


def transform_H(system: RootSystemBC, nu, family: JacobiFamily, M: TransitionMatrix | None = None) -> SpectralFamily:
    """q_{nu,eta} = sum_zeta coeff(P_eta, m_zeta) l_zeta."""
    params = CherednikParams.for_transform(system, nu)
    if M is None:
        M = build_transition_matrix(params, family.max_weight)
    if M.params != params:
        raise ParameterDomainError("transition matrix and family disagree on parameters")
    ls = l_polynomials(params, M)
    out = SpectralFamily(system, nu, family.max_weight, family.basis)
    for e in family.basis:
        acc: dict = {}
        for z, c in family.polys[e].coeffs.items():
            if z not in ls:
                raise ParameterDomainError(f"missing l polynomial for {z}")
            for k, v in ls[z].coeffs.items():
                acc[k] = acc.get(k, 0) + (c * v if isinstance(c, type(mpq())) else float(c) * float(v))
        out.qpolys[e] = SpectralPolynomial(system.rank, acc)
    out.meta["transition_diagonal"] = {e: M.diagonal(e) for e in family.basis}
    return out


def gram_schmidt_mk(system: RootSystemBC, nu, max_weight: int, order: int = 16, cutoff: float | None = None,
                    normalization="none", basis: list | None = None) -> tuple:
    """Monic orthogonal polynomials in m_eta(lambda^2) for f~^2 |c|^{-2}.

    Returns (polys, norms, gram, grid)."""
    system.check_nu(nu)
    r = system.rank
    basis = basis or partitions_upto(max_weight, r)
    G, grid = spectral_gram(system, nu, basis, order, cutoff, normalization)
    C, cond = _triangular_gram_schmidt(G, [1.0] * len(basis))
    polys = {e: SpectralPolynomial(r, {z: C[k, m] for m, z in enumerate(basis) if C[k, m]})
             for k, e in enumerate(basis)}
    norms = {e: float(C[k] @ G @ C[k]) for k, e in enumerate(basis)}
    return polys, norms, G, grid, cond


@dataclass
class CorrespondenceRow:
    eta: tuple
    proportionality_angle: float
    coefficient_deviation: float
    offdiag_mass: float
    norm_ratio_defect: float
    absolute_ratio: float
    q_leading: float
    expected_leading: float

    def defects(self) -> dict:
        return {
            "proportionality_angle": self.proportionality_angle,
            "coefficient_deviation": self.coefficient_deviation,
            "offdiag_mass": self.offdiag_mass,
            "norm_ratio_defect": self.norm_ratio_defect,
        }

    def worst(self) -> float:
        return max(self.defects().values())


@dataclass
class CorrespondenceReport:
    system: RootSystemBC
    nu: object
    max_weight: int
    rows: list
    jacobi: JacobiFamily
    spectral: SpectralFamily
    implied_constant: float
    printed_constant: float
    meta: dict = field(default_factory=dict)

    def worst(self) -> float:
        return max((row.worst() for row in self.rows), default=0.0)

    def passed(self, tol: float) -> bool:
        return self.worst() <= tol


def _angle(x: np.ndarray, y: np.ndarray) -> float:
    """Sine of the angle between the lines spanned by x and y."""
    xh, yh = x / np.linalg.norm(x), y / np.linalg.norm(y)
    return float(np.linalg.norm(xh - (xh @ yh) * yh))


def verify_transform_correspondence(system: RootSystemBC, nu, max_weight: int, spectral_order: int = 16,
                       cutoff: float | None = None, compact_order_: int | None = None) -> CorrespondenceReport:
    """Compare the transforms q_{nu,eta} of H_{nu,eta} with independently built
    Macdonald-Koornwinder polynomials."""
    fam = gram_schmidt_jacobi(system, nu, max_weight, order=compact_order_)
    spec = transform_H(system, nu, fam)
    basis = fam.basis
    mk, mk_norms, G, grid, cond = gram_schmidt_mk(system, nu, max_weight, spectral_order, cutoff, basis=basis)
    spec.mkpolys, spec.mk_norms = mk, mk_norms
    Q = np.array([spec.qpolys[e].vector(basis) for e in basis])
    Hq = Q @ G @ Q.T
    qn = np.diag(Hq)
    for k, e in enumerate(basis):
        spec.q_norms[e] = float(qn[k])
    empty = basis[0]
    rows = []
    for k, e in enumerate(basis):
        qv = Q[k]
        mv = mk[e].vector(basis)
        lead = qv[k]
        dev = float(np.max(np.abs(qv / lead - mv)) / np.max(np.abs(mv)))
        off = max((abs(Hq[k, m]) / math.sqrt(qn[k] * qn[m]) for m in range(len(basis)) if m != k), default=0.0)
        ratio_q = qn[k] / qn[0]
        ratio_p = fam.norms[e] / fam.norms[empty]
        d_eta = spec.meta["transition_diagonal"][e]
        rows.append(CorrespondenceRow(
            eta=e,
            proportionality_angle=_angle(qv, mv),
            coefficient_deviation=dev,
            offdiag_mass=float(off),
            norm_ratio_defect=float(abs(ratio_q / ratio_p - 1)),
            absolute_ratio=float(fam.norms[e] / qn[k]),
            q_leading=float(lead),
            expected_leading=float(mpq(4 ** sum(e)) / d_eta),
        ))
    implied = fam.norms[empty] / float(qn[0])
    printed = spectral_constant(system, "printed")
    meta = {"spectral_grid": grid.describe(), "spectral_condition": cond,
            "compact": {"method": fam.method, "order": fam.order, "condition": fam.condition}}
    return CorrespondenceReport(system, nu, max_weight, rows, fam, spec, implied, printed, meta)


# ----------------------------------------------------------------------------
# approximate-identity probe and the rank-one Wilson comparison


def default_probe(t: np.ndarray) -> np.ndarray:
    """A bounded continuous test function with value 1 at the origin."""
    return 1 / (1 + np.asarray(t)[..., 0] ** 2)


def approximate_identity_sequence(system: RootSystemBC, nus, probe=default_probe, phi0: float = 1.0,
                       order: int = 80) -> list:
    """(1/N_nu) int f_{-2nu} probe dmu for each nu, with the distance to probe(0)."""
    out = []
    for nu in nus:
        val = noncompact_integral(system, probe, nu, order) / n_nu(system, nu)
        out.append({"nu": nu, "value": val, "error": abs(val - phi0)})
    return out


def wilson_rank1(n: int, params, y) -> np.ndarray:
    """Wilson polynomial W_n(y; a,b,c,d) with y = x^2, via the terminating 4F3."""
    a, b, c, d = (float(p) for p in params)
    y = np.asarray(y, dtype=float)
    s = a + b + c + d
    total = np.zeros_like(y)
    term_const = 1.0
    for k in range(n + 1):
        if k:
            term_const *= (-n + k - 1) * (n + s - 1 + k - 1) / ((a + b + k - 1) * (a + c + k - 1) * (a + d + k - 1) * k)
        prod = np.ones_like(y)
        for m in range(k):
            prod = prod * ((a + m) ** 2 + y)
        total = total + term_const * prod
    pre = 1.0
    for m in range(n):
        pre *= (a + b + m) * (a + c + m) * (a + d + m)
    return pre * total


def wilson_guess(system: RootSystemBC, nu) -> tuple:
    A = float(nu) - float(system.rho1) / 2
    return (A, A, float(system.iota + system.b) / 2, float(system.b + 1) / 2)


def wilson_crosscheck_rank1(system: RootSystemBC, nu, n: int, params=None, mk: SpectralPolynomial | None = None,
                            spectral_order: int = 16) -> dict:
    """Least-squares distance between the monic (in lambda^2) Wilson polynomial,
    taken at x = u/2, and p^MK_(n)."""
    if system.rank != 1:
        raise ParameterDomainError("the Wilson comparison is rank one")
    params = tuple(params) if params is not None else wilson_guess(system, nu)
    if mk is None:
        polys, *_ = gram_schmidt_mk(system, nu, n, spectral_order)
        mk = polys[(n,)]
    # sample lambda^2 = -u^2 at n+1 distinct points and fit
    lam2 = -np.linspace(0.5, 3.0, n + 1) ** 2
    W = wilson_rank1(n, params, -lam2 / 4)
    V = np.vander(lam2, n + 1, increasing=True)
    w_coef = np.linalg.solve(V, W) if n else np.array([W[0]])
    if abs(w_coef[-1]) == 0:
        return {"params": params, "defect": math.inf, "wilson": w_coef.tolist(), "mk": []}
    w_coef = w_coef / w_coef[-1]
    mk_coef = np.array([float(mk.coefficient((k,))) for k in range(n + 1)])
    defect = float(np.linalg.norm(w_coef - mk_coef) / np.linalg.norm(mk_coef))
    return {"params": params, "defect": defect, "wilson": w_coef.tolist(), "mk": mk_coef.tolist()}
