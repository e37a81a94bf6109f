"""Exact and numerical tools for spherical analysis on root systems of type BC.

The package covers conjugated Cherednik operators and their Bernstein-Sato
identity, the spherical transform of the canonical weight f_{-2nu}, and the
orthogonal families related by that transform: Jacobi polynomials on the
compact side, Jacobi-type functions on the non-compact side and
Macdonald-Koornwinder polynomials on the spectral side.
"""

from .cherednik import (
    CherednikOperators,
    CherednikParams,
    SpectralPolynomial,
    TransitionMatrix,
    apply_cherednik,
    build_transition_matrix,
    d_eta_conjecture,
    l_polynomial,
    l_polynomials,
    triangularity_check,
    verify_bernstein_sato,
    verify_ascending_product,
    verify_descending_product,
)
from .errors import (
    BCError,
    ConditioningError,
    ConfigError,
    CutoffError,
    DivergenceError,
    IntegrityError,
    ParameterDomainError,
    PoleError,
)
from .gammacore import (
    SphericalFunctionRank1,
    beta_recursion_check,
    c0,
    c_function,
    f_tilde,
    gindikin_gamma,
    n_nu,
    n_ratio,
    plancherel_density,
    spherical_rank1,
)
from .orthopoly import (
    JacobiFamily,
    JacobiTypeFunction,
    SpectralFamily,
    gram_schmidt_jacobi,
    gram_schmidt_mk,
    jacobi_norms,
    approximate_identity_sequence,
    norm_transfer_check,
    orthogonality_defects,
    transform_H,
    verify_transform_correspondence,
    wilson_crosscheck_rank1,
)
from .polyalg import MultiPoly, SymmetricPoly, exact_divide, monomial_symmetric, to_symmetric, weyl_act
from .quadrature import (
    QuadratureGrid,
    compact_inner_product,
    exact_compact_inner_product,
    noncompact_integral,
    spectral_inner_product,
)
from .rootdata import RootSystemBC, WeylElement, make_root_system, partitions_upto

__version__ = "0.1.0"
