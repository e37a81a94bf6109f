"""Deterministic quadrature for the three measures in play.

* compact: the weight on [0,1]^r in z_j = x_j^2,
      2^{(2iota+2b+a(r-1))r} prod z^alpha (1-z)^beta prod_{i<j}|z_i-z_j|^a,
  alpha = (2b+iota-1)/2.  With beta = 2nu-(1+iota+b+a(r-1)) this is the inner
  product on symmetric polynomials attached to nu; with nu in place of 2nu it is
  the Selberg form of the integral of f_{-2nu}.
* noncompact: integrals of f_{-2nu}(t) g(t) dmu(t) over R^r, computed on a
  compact grid after t_j = atanh(sqrt z_j) with the Jacobian and the measure
  evaluated directly in t.
* spectral: integrals against f~_{-2nu}(iu)^2 |c(iu)|^{-2} du with Gauss-Legendre
  panels on a cutoff box.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from gmpy2 import mpq
from scipy.special import betaln, roots_jacobi, roots_legendre

from .errors import CutoffError, DivergenceError, ParameterDomainError
from .gammacore import log_f_tilde, log_inverse_c_squared, c0
from .polyalg import MultiPoly, SymmetricPoly, monomial_symmetric, monomial_values
from .rootdata import RootSystemBC, as_rational

LOG2 = math.log(2.0)
TAIL_BUDGET = 1e-14


@dataclass
class QuadratureGrid:
    nodes: np.ndarray  # (n, r)
    weights: np.ndarray  # (n,)
    family: str
    order: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        keep = self.weights > 0
        self.nodes = np.ascontiguousarray(self.nodes[keep])
        self.weights = np.ascontiguousarray(self.weights[keep])

    @property
    def rank(self):
        return self.nodes.shape[1]

    def __len__(self):
        return len(self.weights)

    def integrate(self, values) -> float:
        # numpy sums contiguous float arrays pairwise
        return float(np.sum(self.weights * np.asarray(values)))

    def describe(self) -> dict:
        return {"family": self.family, "order": self.order, "points": len(self), **self.meta}


# ----------------------------------------------------------------------------
# compact weight in z


@dataclass(frozen=True)
class CompactWeight:
    """prefactor * prod z^alpha (1-z)^beta prod_{i<j} |z_i-z_j|^a on [0,1]^r."""

    rank: int
    alpha: object
    beta: object
    a: object
    log_prefactor: float = 0.0

    def log_density(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        al, be, a = float(self.alpha), float(self.beta), float(self.a)
        with np.errstate(divide="ignore"):
            out = np.sum(al * np.log(z) + be * np.log1p(-z), axis=-1)
            for i in range(self.rank):
                for j in range(i + 1, self.rank):
                    out = out + a * np.log(np.abs(z[..., i] - z[..., j]))
        return out + self.log_prefactor


def compact_weight(system: RootSystemBC, exponent_nu, *, doubled: bool = True) -> CompactWeight:
    """Weight attached to nu (doubled=True: the inner product, 2nu in the
    (1-z) exponent) or to the Selberg form of N_nu (doubled=False)."""
    r, a, b, io = system.rank, system.a, system.b, system.iota
    nu = as_rational(exponent_nu) if not isinstance(exponent_nu, float) else exponent_nu
    system.check_nu(nu)
    top = 2 * nu if doubled else nu
    beta = top - (1 + io + b + a * (r - 1))
    alpha = (2 * b + io - 1) / 2
    pref = float((2 * io + 2 * b + a * (r - 1)) * r) * LOG2
    return CompactWeight(r, alpha, beta, a, pref)


def _jacobi_01(n: int, alpha: float, beta: float):
    """Nodes and weights for int_0^1 z^alpha (1-z)^beta h(z) dz."""
    x, w = roots_jacobi(n, beta, alpha)
    return (1 + x) / 2, w / 2 ** (alpha + beta + 1)


def _is_even_integer(q) -> bool:
    q = as_rational(q) if not isinstance(q, float) else q
    return float(q).is_integer() and int(q) % 2 == 0


def _tensor_grid(weight: CompactWeight, order: int) -> tuple:
    z1, w1 = _jacobi_01(order, float(weight.alpha), float(weight.beta))
    r = weight.rank
    nodes = np.array(list(itertools.product(z1, repeat=r)))
    weights = np.prod(np.array(list(itertools.product(w1, repeat=r))), axis=1)
    a = float(weight.a)
    for i in range(r):
        for j in range(i + 1, r):
            weights = weights * np.abs(nodes[:, i] - nodes[:, j]) ** a
    return nodes, weights * math.exp(weight.log_prefactor)


def _chamber_grid(weight: CompactWeight, order: int) -> tuple:
    """Rank two: z_2 = z_1 s on the chamber z_2 < z_1, mirrored to the square.

    int_{z2<z1} w = int z1^{2al+a+1}(1-z1)^be int s^al (1-s)^a (1-z1 s)^be ds dz1
    """
    al, be, a = float(weight.alpha), float(weight.beta), float(weight.a)
    zz, wz = _jacobi_01(order, 2 * al + a + 1, be)
    ss, ws = _jacobi_01(order, al, a)
    Z, S = np.meshgrid(zz, ss, indexing="ij")
    W = np.outer(wz, ws) * np.exp(be * np.log1p(-Z * S))
    z1, z2, w = Z.ravel(), (Z * S).ravel(), W.ravel()
    nodes = np.concatenate([np.stack([z1, z2], axis=1), np.stack([z2, z1], axis=1)])
    weights = np.concatenate([w, w]) * math.exp(weight.log_prefactor)
    return nodes, weights


def compact_grid(weight: CompactWeight, order: int, method: str = "auto") -> QuadratureGrid:
    """Grid whose weights carry the full compact weight.

    method "tensor" is exact for polynomials of per-variable degree < 2*order
    when a is an even integer; "chamber" (rank two) removes the |z_1-z_2|^a kink
    for other a.
    """
    if order < 1:
        raise ParameterDomainError("quadrature order must be positive")
    if method == "auto":
        method = "chamber" if weight.rank == 2 and not _is_even_integer(weight.a) else "tensor"
    if method == "tensor":
        nodes, weights = _tensor_grid(weight, order)
    elif method == "chamber":
        if weight.rank != 2:
            raise ParameterDomainError("the chamber rule is implemented for rank two")
        nodes, weights = _chamber_grid(weight, order)
    else:
        raise ParameterDomainError(f"unknown compact method {method!r}")
    meta = {"method": method, "alpha": str(weight.alpha), "beta": str(weight.beta)}
    return QuadratureGrid(nodes, weights, "compact-jacobi", order, meta)


def compact_integral(weight: CompactWeight, func: Callable, order: int, method: str = "auto",
                     estimate: bool = False):
    """int func(z) w(z) dz; with estimate=True also |I(order) - I(2 order)|."""
    grid = compact_grid(weight, order, method)
    val = grid.integrate(func(grid.nodes))
    if not estimate:
        return val
    fine = compact_grid(weight, 2 * order, method)
    val2 = fine.integrate(func(fine.nodes))
    return val2, abs(val2 - val)


def _default_order(system, max_degree: int) -> int:
    base = max_degree + 2
    if system.rank >= 2:
        base += int(math.ceil(float(system.a))) * (system.rank - 1)
    return max(base, 8)


def compact_inner_product(system: RootSystemBC, nu, f: SymmetricPoly, g: SymmetricPoly,
                          order: int | None = None, method: str = "auto") -> float:
    """(f, g) attached to nu, f and g in the m_eta(x^2) basis."""
    weight = compact_weight(system, nu)
    deg = max((sum(p) for p in f.coeffs), default=0) + max((sum(p) for p in g.coeffs), default=0)
    grid = compact_grid(weight, order or _default_order(system, deg), method)
    return grid.integrate(f.evaluate_z(grid.nodes) * g.evaluate_z(grid.nodes))


def compact_gram(system: RootSystemBC, nu, basis: list, order: int, method: str = "auto") -> np.ndarray:
    """Matrix of (m_eta, m_zeta) for eta, zeta in basis."""
    grid = compact_grid(compact_weight(system, nu), order, method)
    V = np.array([monomial_values(eta, grid.nodes) for eta in basis])
    return (V * grid.weights) @ V.T


def selberg_quadrature(system: RootSystemBC, nu, order: int = 40, method: str = "auto") -> float:
    """N_nu as the z-form integral (doubled=False weight) by quadrature."""
    grid = compact_grid(compact_weight(system, nu, doubled=False), order, method)
    return float(np.sum(grid.weights))


# ----------------------------------------------------------------------------
# exact path (even a)


def _beta_moments(alpha: mpq, beta: mpq, n: int) -> list:
    """M(k) = int z^{alpha+k}(1-z)^beta / int z^alpha (1-z)^beta, k = 0..n."""
    out = [mpq(1)]
    for k in range(n):
        out.append(out[-1] * (alpha + 1 + k) / (alpha + beta + 2 + k))
    return out


def _z_poly(p: SymmetricPoly) -> MultiPoly:
    out = MultiPoly(p.rank)
    for eta, c in p.coeffs.items():
        out = out + monomial_symmetric(eta, squared=False).scale(c)
    return out


@dataclass(frozen=True)
class ExactCompactValue:
    """value = normalized * exp(log_scale); normalized is an exact rational."""

    normalized: mpq
    log_scale: float

    @property
    def value(self) -> float:
        return float(self.normalized) * math.exp(self.log_scale)


def exact_compact_inner_product(system: RootSystemBC, nu, f: SymmetricPoly, g: SymmetricPoly,
                                doubled: bool = True) -> ExactCompactValue:
    """Exact evaluation for even integer a: expand prod (z_i - z_j)^a and use beta moments."""
    if system.rank > 1 and not _is_even_integer(system.a):
        raise ParameterDomainError("the exact compact path needs an even integer a")
    if not (f.is_exact() and g.is_exact()):
        raise ParameterDomainError("the exact compact path needs exact coefficients")
    weight = compact_weight(system, nu, doubled=doubled)
    r = system.rank
    poly = _z_poly(f) * _z_poly(g)
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            poly = poly * (MultiPoly.variable(r, i) - MultiPoly.variable(r, j)) ** int(system.a)
    alpha, beta = as_rational(weight.alpha), as_rational(weight.beta)
    top = max((max(e) for e in poly.terms), default=0)
    mom = _beta_moments(alpha, beta, top)
    total = mpq(0)
    for e, c in poly.terms.items():
        term = c
        for k in e:
            term *= mom[k]
        total += term
    log_scale = weight.log_prefactor + r * float(betaln(float(alpha) + 1, float(beta) + 1))
    return ExactCompactValue(total, log_scale)


# ----------------------------------------------------------------------------
# noncompact side


def _log_abs_2sinh(t: np.ndarray) -> np.ndarray:
    t = np.abs(t)
    with np.errstate(divide="ignore"):
        return t + np.log(-np.expm1(-2 * t))


def _log_2cosh(t: np.ndarray) -> np.ndarray:
    t = np.abs(t)
    return t + np.log1p(np.exp(-2 * t))


def log_measure_density(system: RootSystemBC, t: np.ndarray) -> np.ndarray:
    """log of prod_{alpha>0} |2 sinh(alpha(t)/2)|^{2k_alpha}."""
    t = np.asarray(t, dtype=float)
    b, io, a = float(system.b), float(system.iota), float(system.a)
    out = np.sum(2 * b * _log_abs_2sinh(t) + io * _log_abs_2sinh(2 * t), axis=-1)
    r = system.rank
    for i in range(r):
        for j in range(i + 1, r):
            out = out + a * (_log_abs_2sinh(t[..., i] - t[..., j]) + _log_abs_2sinh(t[..., i] + t[..., j]))
    return out


def log_f_delta(t: np.ndarray, delta) -> np.ndarray:
    """log prod cosh^delta t_j."""
    return float(delta) * np.sum(_log_2cosh(np.asarray(t, dtype=float)) - LOG2, axis=-1)


def _z_to_t(z: np.ndarray) -> tuple:
    """t = atanh(sqrt z) and log of dt/dz, computed without cancellation near z = 1."""
    sq = np.sqrt(z)
    one_minus = (1 - z) / (1 + sq)  # 1 - sqrt z
    t = 0.5 * (np.log1p(sq) - np.log(one_minus))
    log_jac = -LOG2 - 0.5 * np.log(z) - np.log1p(-z)
    return t, log_jac


MAX_NONCOMPACT_RANK = 2


def noncompact_grid(system: RootSystemBC, nu, order: int, method: str = "auto") -> QuadratureGrid:
    """Nodes t in R^r and weights w with sum w g(t) ~ int f_{-2nu}(t) g(t) dmu(t).

    The compact Selberg-form grid for f_{-2nu} supplies nodes in [0,1]^r; the
    weight at each node is corrected by the ratio of f_{-2nu} dmu dt/dz,
    evaluated directly in t, to the compact density.  Each node is unfolded
    over all 2^r sign patterns.
    """
    r = system.rank
    if r > MAX_NONCOMPACT_RANK:
        raise ParameterDomainError(f"noncompact quadrature is limited to rank <= {MAX_NONCOMPACT_RANK}")
    weight = compact_weight(system, nu, doubled=False)
    grid = compact_grid(weight, order, method)
    z = grid.nodes
    t, log_jac = _z_to_t(z)
    log_target = log_f_delta(t, -2 * float(nu)) + log_measure_density(system, t) + np.sum(log_jac, axis=-1)
    ratio = np.exp(log_target - weight.log_density(z))
    if not np.all(np.isfinite(ratio)):
        raise DivergenceError("integrand of the noncompact measure is not finite on the grid")
    base_w = grid.weights * ratio
    nodes, weights = [], []
    for signs in itertools.product((1.0, -1.0), repeat=r):
        nodes.append(t * np.array(signs))
        weights.append(base_w)
    meta = {"method": grid.meta["method"], "nu": str(nu), "sign_patterns": 2 ** r}
    return QuadratureGrid(np.concatenate(nodes), np.concatenate(weights),
                          "noncompact-t", order, meta)


def noncompact_integral(system: RootSystemBC, integrand: Callable, nu, order: int = 60,
                        method: str = "auto", decay_check: bool = True) -> float:
    """int f_{-2nu}(t) integrand(t) dmu(t) over R^r.

    ``integrand`` maps an (n, r) array of points t to n values.  The decay
    check evaluates the integrand far out and refuses to integrate anything
    that grows faster than f_{-2nu} decays.
    """
    grid = noncompact_grid(system, nu, order, method)
    vals = np.asarray(integrand(grid.nodes), dtype=float)
    if decay_check:
        far = np.full((1, system.rank), 30.0)
        growth = abs(float(np.asarray(integrand(far)).ravel()[0]))
        log_envelope = math.log(growth) if growth > 0 else -math.inf
        rate = 2 * float(nu) - float(system.rho1) * 2
        if log_envelope > 30.0 * rate * system.rank:
            raise DivergenceError("integrand grows faster than f_{-2nu} decays")
    return grid.integrate(vals)


# ----------------------------------------------------------------------------
# spectral side

SPECTRAL_NORMALIZATIONS = ("none", "printed", "c-of-rho")


def log_spectral_weight(system: RootSystemBC, nu, u: np.ndarray) -> np.ndarray:
    """log of f~_{-2nu}(iu)^2 |c(iu)|^{-2} for real u of shape (..., r)."""
    u = np.asarray(u, dtype=float)
    lf = log_f_tilde(system, nu, 1j * u).real
    return 2 * lf + log_inverse_c_squared(system, u, "scaled")


def spectral_constant(system: RootSystemBC, normalization) -> float:
    """Constant in front of the spectral weight: 1, (2pi)^{-r} c_0^2 or a number."""
    if isinstance(normalization, (int, float)) and not isinstance(normalization, bool):
        return float(normalization)
    if normalization not in SPECTRAL_NORMALIZATIONS:
        raise ParameterDomainError(f"unknown spectral normalization {normalization!r}")
    if normalization == "none":
        return 1.0
    return (2 * math.pi) ** (-system.rank) * c0(system, normalization, "scaled") ** 2


def _axis_profile(system, nu, us, degree):
    """Largest log weight along the coordinate axes and the diagonal, plus
    the polynomial growth of degree-`degree` integrands in u^2."""
    r = system.rank
    rays = [np.eye(r)[k] for k in range(r)] + [np.ones(r) / math.sqrt(r)]
    prof = np.full(len(us), -np.inf)
    for ray in rays:
        base = np.ones(r) * 0.7  # keep off the zero set of |c|^{-2}
        pts = base[None, :] + us[:, None] * ray[None, :]
        prof = np.maximum(prof, log_spectral_weight(system, nu, pts))
    return prof + 2 * degree * np.log1p(us)


def choose_cutoff(system: RootSystemBC, nu, degree: int = 0, budget: float = TAIL_BUDGET) -> float:
    """Smallest U (step 0.5) beyond which the envelope of the weight, times
    polynomial growth, stays below budget relative to its peak."""
    us = np.arange(0.0, 400.0, 0.5)
    prof = _axis_profile(system, nu, us, degree)
    peak = np.max(prof)
    log_budget = math.log(budget)
    above = np.nonzero(prof - peak > log_budget + math.log(1e-3))[0]
    if len(above) == 0:
        return 1.0
    last = above[-1]
    if last + 1 >= len(us):
        raise CutoffError("spectral weight does not decay within u < 400", suggested=None)
    return float(us[last + 1]) + 1.0


def check_cutoff(system: RootSystemBC, nu, cutoff: float, degree: int = 0, budget: float = TAIL_BUDGET):
    needed = choose_cutoff(system, nu, degree, budget)
    if cutoff < needed:
        raise CutoffError(f"cutoff U={cutoff} leaves a tail above {budget:g}; use U >= {needed}",
                          suggested=needed)


def spectral_grid(system: RootSystemBC, nu, order: int = 16, cutoff: float | None = None,
                  degree: int = 0, panel_width: float = 2.0, symmetric: bool = False) -> QuadratureGrid:
    """Gauss-Legendre panels on [0,U]^r (or [-U,U]^r) carrying the spectral weight.

    On the positive orthant the weights are multiplied by 2^r, which is exact
    for integrands even in each u_j (all polynomials in lambda^2 are).
    """
    r = system.rank
    if cutoff is None:
        cutoff = choose_cutoff(system, nu, degree)
    else:
        check_cutoff(system, nu, cutoff, degree)
    lo = -cutoff if symmetric else 0.0
    npanel = max(1, int(math.ceil((cutoff - lo) / panel_width)))
    edges = np.linspace(lo, cutoff, npanel + 1)
    x, w = roots_legendre(order)
    pts, wts = [], []
    for a0, a1 in zip(edges[:-1], edges[1:]):
        pts.append((a1 - a0) / 2 * x + (a1 + a0) / 2)
        wts.append((a1 - a0) / 2 * w)
    u1, w1 = np.concatenate(pts), np.concatenate(wts)
    nodes = np.array(list(itertools.product(u1, repeat=r)))
    weights = np.prod(np.array(list(itertools.product(w1, repeat=r))), axis=1)
    weights = weights * np.exp(log_spectral_weight(system, nu, nodes))
    if not symmetric:
        weights = weights * 2 ** r
    meta = {"cutoff": cutoff, "panels": npanel, "symmetric": symmetric, "tail_budget": TAIL_BUDGET}
    return QuadratureGrid(nodes, weights, "spectral", order, meta)


def spectral_inner_product(system: RootSystemBC, nu, p, q, order: int = 16,
                           cutoff: float | None = None, normalization="none",
                           grid: QuadratureGrid | None = None) -> float:
    """int p(iu) q(iu) f~(iu)^2 |c(iu)|^{-2} du over R^r for spectral polynomials p, q."""
    if grid is None:
        deg = _spectral_degree(p) + _spectral_degree(q)
        grid = spectral_grid(system, nu, order, cutoff, degree=deg)
    vals = p.evaluate_imaginary(grid.nodes) * q.evaluate_imaginary(grid.nodes)
    return spectral_constant(system, normalization) * grid.integrate(vals)


def _spectral_degree(p) -> int:
    return max((sum(k) for k in p.coeffs), default=0)


def spectral_gram(system: RootSystemBC, nu, basis: list, order: int = 16,
                  cutoff: float | None = None, normalization="none") -> tuple:
    """Moments (m_eta(lambda^2), m_zeta(lambda^2)) on the spectral side, and the grid."""
    deg = 2 * max((sum(p) for p in basis), default=0)
    grid = spectral_grid(system, nu, order, cutoff, degree=deg)
    V = np.array([monomial_values(eta, -(grid.nodes ** 2)) for eta in basis])
    G = (V * grid.weights) @ V.T
    return spectral_constant(system, normalization) * G, grid
