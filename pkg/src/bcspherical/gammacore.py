"""Gamma-product kernels: the Gindikin Gamma function, the normalization N_nu
of f_{-2nu}, its spherical transform, the c-function, the Plancherel density
and the rank-one spherical function.

Everything is evaluated in log space with complex log-Gamma and exponentiated
once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np
from scipy.special import loggamma

from .errors import DivergenceError, ParameterDomainError, PoleError
from .rootdata import RootSystemBC, as_rational

LOG2 = math.log(2.0)


def _is_pole(z) -> bool:
    z = complex(z)
    return z.imag == 0 and z.real <= 0 and float(z.real).is_integer()


def log_gamma(z, label: str = "") -> complex:
    """Complex log-Gamma with an explicit pole check."""
    if _is_pole(z):
        raise PoleError(f"Gamma pole at {label or 'argument'} = {complex(z).real:g}", factor=label or str(z))
    return complex(loggamma(complex(z)))


def _log_gamma_array(z: np.ndarray, label: str) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    bad = (z.imag == 0) & (z.real <= 0) & (np.round(z.real) == z.real)
    if np.any(bad):
        where = np.asarray(z[bad]).ravel()[0]
        raise PoleError(f"Gamma pole in factor {label} at {where.real:g}", factor=label)
    return loggamma(z)


def _neg_log_abs_gamma(z: np.ndarray) -> np.ndarray:
    """-log|Gamma(z)| = log|z| - log|Gamma(z+1)|; equals -inf exactly at z = 0.

    Used for factors that sit in a denominator of the Plancherel density, so a
    pole of Gamma becomes a zero of the density instead of nan.
    """
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(z)) - loggamma(z + 1).real


# ----------------------------------------------------------------------------
# generic kernel


@dataclass(frozen=True)
class GammaArg:
    """alpha*nu + beta*lambda_j + gamma; j is 1-indexed, 0 means no lambda."""

    alpha: object
    beta: object
    gamma: object
    j: int = 0

    def value(self, nu, lam):
        out = float(self.alpha) * nu + float(self.gamma)
        if self.j and self.beta:
            out = out + float(self.beta) * np.asarray(lam)[..., self.j - 1]
        return out

    def describe(self) -> str:
        parts = []
        if self.alpha:
            parts.append(f"{self.alpha}*nu")
        if self.beta and self.j:
            parts.append(f"{self.beta}*lambda_{self.j}")
        parts.append(str(self.gamma))
        return " + ".join(parts)


@dataclass
class GammaProductKernel:
    """prefactor * 2^two_power * prod Gamma(arg)^sign."""

    factors: list = field(default_factory=list)  # (sign, GammaArg)
    prefactor: object = 1
    two_power: object = 0

    def log_value(self, nu, lam=None) -> np.ndarray:
        nu = float(nu)
        lam = np.zeros((1,)) if lam is None else np.asarray(lam, dtype=complex)
        total = math.log(float(self.prefactor)) + float(self.two_power) * LOG2
        acc = np.zeros(lam.shape[:-1], dtype=complex) + total
        for sign, arg in self.factors:
            acc = acc + sign * _log_gamma_array(arg.value(nu, lam), arg.describe())
        return acc

    def value(self, nu, lam=None) -> np.ndarray:
        return np.exp(self.log_value(nu, lam))


# ----------------------------------------------------------------------------
# Gindikin Gamma and N_nu


def gindikin_gamma(a, r: int, sigma) -> float:
    """log Gamma_a(sigma) = sum_j log Gamma(sigma - (a/2)(j-1))."""
    a = float(as_rational(a)) if not isinstance(a, float) else a
    total = 0.0
    for j in range(1, r + 1):
        z = float(sigma) - a / 2 * (j - 1)
        total += log_gamma(z, f"Gamma(sigma - a/2*{j - 1})").real
    return total


def _check_nu(system: RootSystemBC, nu):
    if isinstance(nu, float):
        if not nu > float(system.admissible_nu_bound):
            raise ParameterDomainError(f"nu={nu} not admissible: need nu > {system.admissible_nu_bound}")
        return nu
    return float(system.check_nu(nu))


def log_n_nu(system: RootSystemBC, nu) -> float:
    r, a, b, io = system.rank, float(system.a), float(system.b), float(system.iota)
    nu = _check_nu(system, nu)
    out = r * (2 * io + 2 * b + a * (r - 1)) * LOG2 + math.lgamma(r + 1)
    out += gindikin_gamma(a, r, (io + 1 + 2 * b + a * (r - 1)) / 2)
    out += gindikin_gamma(a, r, nu - (a / 2 * (r - 1) + io + b))
    out -= gindikin_gamma(a, r, nu + (1 - io) / 2)
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            out += math.lgamma(a / 2 * (j - i + 1)) - math.lgamma(a / 2 * (j - i))
    return out


def n_nu(system: RootSystemBC, nu) -> float:
    """N_nu = integral of f_{-2nu} against dmu, in closed form."""
    return math.exp(log_n_nu(system, nu))


def n_ratio(system: RootSystemBC, nu) -> float:
    """N_{nu+1}/N_nu as the product over j."""
    r, a, b, io = system.rank, float(system.a), float(system.b), float(system.iota)
    nu = _check_nu(system, nu)
    rho1 = float(system.rho1)
    out = 1.0
    for j in range(1, r + 1):
        out *= (nu - rho1 / 2 - (io + b + a * (j - 1)) / 2) / (nu + (1 - io) / 2 - a / 2 * (j - 1))
    return out


def selberg_log(alpha, beta, gamma, r: int) -> float:
    """log of int_{[0,1]^r} prod z^{alpha-1}(1-z)^{beta-1} prod_{i<j}|z_i-z_j|^{2 gamma} dz."""
    total = 0.0
    for j in range(r):
        total += (math.lgamma(alpha + j * gamma) + math.lgamma(beta + j * gamma)
                  + math.lgamma(1 + (j + 1) * gamma)
                  - math.lgamma(alpha + beta + (r + j - 1) * gamma) - math.lgamma(1 + gamma))
    return total


# ----------------------------------------------------------------------------
# spherical transform of f_{-2nu}


def _c_shifts(system: RootSystemBC) -> list:
    """iota + b + a(j-1), j = 1..r."""
    return [float(system.iota + system.b + system.a * (j - 1)) for j in range(1, system.rank + 1)]


def f_tilde_kernel(system: RootSystemBC, nu) -> GammaProductKernel:
    r = system.rank
    nu_q = as_rational(nu) if not isinstance(nu, float) else nu
    half = as_rational("1/2")
    factors = []
    for j in range(1, r + 1):
        c = system.iota + system.b + system.a * (j - 1)
        for eps in (1, -1):
            factors.append((1, GammaArg(1, eps * half, -system.rho1 / 2, j)))
            factors.append((-1, GammaArg(1, 0, -system.rho1 / 2 + eps * c / 2, 0)))
    return GammaProductKernel(factors, prefactor=n_nu(system, nu_q))


def log_f_tilde(system: RootSystemBC, nu, lam) -> np.ndarray:
    """log f~_{-2nu}(lambda); lam has shape (..., r) and may be complex."""
    lam = np.asarray(lam, dtype=complex)
    if lam.shape[-1] != system.rank:
        raise ParameterDomainError(f"lambda must have last axis {system.rank}")
    out = np.full(lam.shape[:-1], log_n_nu(system, nu), dtype=complex)
    A = float(nu) - float(system.rho1) / 2
    for j, c in enumerate(_c_shifts(system)):
        for eps in (1, -1):
            out = out + _log_gamma_array(A + eps * lam[..., j] / 2, f"Gamma(nu - rho_1/2 {'+-'[eps < 0]} lambda_{j + 1}/2)")
            out = out - log_gamma(A + eps * c / 2, f"Gamma(nu - rho_1/2 {'+-'[eps < 0]} c_{j + 1}/2)")
    return out


def f_tilde(system: RootSystemBC, nu, lam) -> np.ndarray:
    return np.exp(log_f_tilde(system, nu, lam))


def beta_nu(system: RootSystemBC, nu, lam) -> np.ndarray:
    """f~_{-2nu}(lambda)/N_nu."""
    return np.exp(log_f_tilde(system, nu, lam) - log_n_nu(system, nu))


def beta_recursion_check(system: RootSystemBC, nu, lam) -> float:
    """Relative defect of the nu -> nu+1 step obtained from the Bernstein-Sato identity.

    beta_nu prod_j (lambda_j^2 - (rho_1 - 2nu)^2)
        = (N_{nu+1}/N_nu) prod_j (-2nu + a(j-1))(1 + 2nu - iota - a(r-j)) beta_{nu+1}
    """
    lam = np.asarray(lam, dtype=complex)
    r, a, io = system.rank, float(system.a), float(system.iota)
    nu_f = float(nu)
    rho1 = float(system.rho1)
    left = beta_nu(system, nu, lam) * np.prod(lam ** 2 - (rho1 - 2 * nu_f) ** 2, axis=-1)
    const = 1.0
    for j in range(1, r + 1):
        const *= (-2 * nu_f + a * (j - 1)) * (1 + 2 * nu_f - io - a * (r - j))
    nu_next = nu + 1 if not isinstance(nu, float) else nu + 1.0
    right = n_ratio(system, nu) * const * beta_nu(system, nu_next, lam)
    scale = np.maximum(np.abs(left), np.abs(right))
    return float(np.max(np.abs(left - right) / np.where(scale > 0, scale, 1.0)))


# ----------------------------------------------------------------------------
# c-function and Plancherel density

C_CONVENTIONS = ("printed", "scaled")
C0_READINGS = ("printed", "c-of-rho")


def _c_params(system: RootSystemBC, convention: str):
    if convention not in C_CONVENTIONS:
        raise ParameterDomainError(f"unknown c-function convention {convention!r}")
    b = float(system.b)
    if convention == "scaled":
        return 0.5, b / 2
    return 1.0, b


def _log_c_terms(system, lam, convention):
    """Yield (sign, argument, label) with c = prod Gamma(arg)^sign."""
    s, b = _c_params(system, convention)
    lam = np.asarray(lam, dtype=complex) * s
    io, a, r = float(system.iota), float(system.a), system.rank
    for j in range(r):
        x = lam[..., j]
        yield 1, x + b, f"Gamma(lambda_{j + 1} + b)"
        yield 1, 2 * x, f"Gamma(2 lambda_{j + 1})"
        yield -1, x + b + io / 2, f"Gamma(lambda_{j + 1} + b + iota/2)"
        yield -1, 2 * x + 2 * b, f"Gamma(2 lambda_{j + 1} + 2b)"
    for j in range(r):
        for k in range(j + 1, r):
            for eps, sym in ((1, "+"), (-1, "-")):
                z = lam[..., j] + eps * lam[..., k]
                yield 1, z, f"Gamma(lambda_{j + 1} {sym} lambda_{k + 1})"
                yield -1, z + a / 2, f"Gamma(lambda_{j + 1} {sym} lambda_{k + 1} + a/2)"


def c_function(system: RootSystemBC, lam, convention: str = "printed") -> np.ndarray:
    """Harish-Chandra c-function.

    "printed": prod_j Gamma(l_j+b)Gamma(2l_j)/(Gamma(l_j+b+iota/2)Gamma(2l_j+2b))
               * prod_{j<k,+-} Gamma(l_j +- l_k)/Gamma(l_j +- l_k + a/2)
    "scaled":  the same expression at lambda/2 with b replaced by b/2, which is the
               normalization matching the transform and spherical function used here.
    """
    lam = np.asarray(lam, dtype=complex)
    out = np.zeros(lam.shape[:-1], dtype=complex)
    for sign, z, label in _log_c_terms(system, lam, convention):
        out = out + sign * _log_gamma_array(z, label)
    return np.exp(out)


def log_inverse_c_squared(system: RootSystemBC, u, convention: str = "scaled") -> np.ndarray:
    """log |c(iu)|^{-2} for real u of shape (..., r); -inf where the density vanishes."""
    lam = 1j * np.asarray(u, dtype=float)
    out = np.zeros(lam.shape[:-1])
    for sign, z, _ in _log_c_terms(system, lam, convention):
        if sign > 0:
            out = out + 2 * _neg_log_abs_gamma(z)
        else:
            out = out + 2 * loggamma(z).real
    return out


def c0(system: RootSystemBC, reading: str = "printed", convention: str = "printed") -> float:
    """The Plancherel constant c_0.

    "printed":  prod_j Gamma(rho_j+b+1)Gamma(2rho_j+1)/(Gamma(rho_j+b+iota/2+1)Gamma(2rho_j+b+1))
                * prod_{j<k,+-} Gamma(rho_j +- rho_k + 1)/Gamma(rho_j +- rho_k + a/2 + 1)
    "c-of-rho": c(rho) in the chosen convention.
    """
    if reading not in C0_READINGS:
        raise ParameterDomainError(f"unknown c0 reading {reading!r}")
    rho = [float(x) for x in system.rho]
    if reading == "c-of-rho":
        return float(c_function(system, np.array(rho), convention).real)
    b, io, a, r = float(system.b), float(system.iota), float(system.a), system.rank
    out = 0.0
    for p in rho:
        out += math.lgamma(p + b + 1) + math.lgamma(2 * p + 1)
        out -= math.lgamma(p + b + io / 2 + 1) + math.lgamma(2 * p + b + 1)
    for j in range(r):
        for k in range(j + 1, r):
            for z in (rho[j] + rho[k], rho[j] - rho[k]):
                out += log_gamma(z + 1, "Gamma(rho_j +- rho_k + 1)").real
                out -= log_gamma(z + a / 2 + 1, "Gamma(rho_j +- rho_k + a/2 + 1)").real
    return math.exp(out)


def plancherel_density(system: RootSystemBC, u, convention: str = "scaled",
                       c0_reading: str = "printed", constant: float | None = None) -> np.ndarray:
    """(2pi)^{-r} c_0^2 / (c(iu) c(-iu)) at real u of shape (..., r).

    ``constant`` replaces c_0^2 when given.
    """
    r = system.rank
    k = constant if constant is not None else c0(system, c0_reading, convention) ** 2
    return k * (2 * math.pi) ** (-r) * np.exp(log_inverse_c_squared(system, u, convention))


# ----------------------------------------------------------------------------
# rank-one spherical function


@dataclass(frozen=True)
class SphericalFunctionRank1:
    """phi_lambda(t) = 2F1((rho-lambda)/2, (rho+lambda)/2; alpha+1; -sinh^2 t)."""

    system: RootSystemBC
    alpha: object = field(init=False)
    beta: object = field(init=False)

    def __post_init__(self):
        if self.system.rank != 1:
            raise ParameterDomainError("the hypergeometric realization is rank one only")
        object.__setattr__(self, "alpha", self.system.b + (self.system.iota - 1) / 2)
        object.__setattr__(self, "beta", (self.system.iota - 1) / 2)

    @property
    def rho(self) -> float:
        return float(self.system.rho1)

    def _mp(self, lam, t):
        z = -mpmath.sinh(t) ** 2
        if abs(z) > 1e250:
            raise DivergenceError(f"-sinh^2 t = {mpmath.nstr(z, 5)} beyond the series continuation range")
        rho = mpmath.mpf(self.rho)
        return mpmath.hyp2f1((rho - lam) / 2, (rho + lam) / 2, mpmath.mpf(float(self.alpha)) + 1, z)

    def __call__(self, lam, t) -> float:
        """phi_lambda(t); real for lambda real or purely imaginary."""
        return float(mpmath.re(self._mp(mpmath.mpmathify(lam), mpmath.mpf(t))))

    def values(self, lam, ts: Sequence[float]) -> np.ndarray:
        lam = mpmath.mpmathify(lam)
        return np.array([float(mpmath.re(self._mp(lam, mpmath.mpf(t)))) for t in ts])

    def eigen_defect(self, lam, ts: Sequence[float], dps: int = 30) -> float:
        """max over t of |phi'' + ((2a+1)coth t + (2b+1)tanh t) phi' - (lam^2 - rho^2) phi|,
        relative to the size of the individual terms."""
        worst = 0.0
        with mpmath.workdps(dps):
            lam = mpmath.mpmathify(lam)
            a1 = 2 * mpmath.mpf(float(self.alpha)) + 1
            b1 = 2 * mpmath.mpf(float(self.beta)) + 1
            ev = lam ** 2 - mpmath.mpf(self.rho) ** 2
            for t in ts:
                t = mpmath.mpf(t)
                if t == 0:
                    continue
                f = lambda s: self._mp(lam, s)
                d0, d1, d2 = (mpmath.diff(f, t, n) for n in range(3))
                drift = (a1 * mpmath.coth(t) + b1 * mpmath.tanh(t)) * d1
                res = d2 + drift - ev * d0
                scale = max(abs(d2), abs(drift), abs(ev * d0), mpmath.mpf(1e-30))
                worst = max(worst, float(abs(res) / scale))
        return worst


def spherical_rank1(system: RootSystemBC, lam, t) -> float:
    return SphericalFunctionRank1(system)(lam, t)
