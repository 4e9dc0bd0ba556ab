"""Huesler-Reiss multivariate Pareto parameterization toolkit.

Precision-matrix / variogram conversions, marginal standardization,
closed-form slab masses, the integrability classification of generalized
Huesler-Reiss functions, pairwise-interaction probes, graph extraction,
and a deterministic Monte Carlo oracle that re-derives every closed form.
"""

from .classification import (
    Classification,
    classify,
    homogeneity_degree,
    is_mp_density,
)
from .errors import (
    ConvergenceError,
    DegenerateProposalError,
    DimensionTooLargeError,
    DomainError,
    HrParetoError,
    InputError,
    NonSymmetricError,
    NotIntegrableError,
    NotS1Error,
    NotS1PlusError,
    NotStrictlyCNDError,
    NumericalError,
    OutsideSupportError,
    SingularVariogramError,
)
from .graphs import ExtremalGraph, Pi2Flags, check_pi2, extremal_graph, factorization_residual
from .hr import (
    GhrParams,
    MuDiagnostics,
    PrecisionMatrix,
    VariogramMatrix,
    det_theta_k,
    exceedance_ratio,
    gamma_to_theta,
    log_density_unnormalized,
    log_marginal_integral_k,
    marginal_integral_k,
    mu_diagnostics,
    mu_hr,
    mu_hr_printed_formula,
    sigma_k,
    sigma_tilde_k,
    theta_to_gamma,
)
from .linalg import (
    DEFAULT_TOL,
    S1Certificate,
    SpectralDecomposition,
    certify_s1_plus,
    pseudo_determinant,
    pseudo_inverse,
    spectral_decompose,
    symmetrize,
)
from .oracle import (
    McEstimate,
    ProposalSpec,
    estimate_marginal_mass,
    estimate_total_mass,
    integrability_trend,
    proposal_spec,
)
from .probe import (
    IDENTITY,
    LOG,
    SQUARED_LOG,
    PairwiseFamilySpec,
    ResidualScan,
    StatFn,
    cross_difference,
    homogeneity_residual,
    homogeneity_residual_scan,
    log_pairwise_density,
    residual_grid,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "Classification",
    "ConvergenceError",
    "DegenerateProposalError",
    "DimensionTooLargeError",
    "DomainError",
    "ExtremalGraph",
    "GhrParams",
    "HrParetoError",
    "IDENTITY",
    "InputError",
    "LOG",
    "McEstimate",
    "MuDiagnostics",
    "NonSymmetricError",
    "NotIntegrableError",
    "NotS1Error",
    "NotS1PlusError",
    "NotStrictlyCNDError",
    "NumericalError",
    "OutsideSupportError",
    "PairwiseFamilySpec",
    "Pi2Flags",
    "PrecisionMatrix",
    "ProposalSpec",
    "ResidualScan",
    "S1Certificate",
    "SQUARED_LOG",
    "SingularVariogramError",
    "SpectralDecomposition",
    "StatFn",
    "VariogramMatrix",
    "certify_s1_plus",
    "check_pi2",
    "classify",
    "cross_difference",
    "det_theta_k",
    "estimate_marginal_mass",
    "estimate_total_mass",
    "exceedance_ratio",
    "extremal_graph",
    "factorization_residual",
    "gamma_to_theta",
    "homogeneity_degree",
    "homogeneity_residual",
    "homogeneity_residual_scan",
    "integrability_trend",
    "is_mp_density",
    "log_density_unnormalized",
    "log_marginal_integral_k",
    "log_pairwise_density",
    "marginal_integral_k",
    "mu_diagnostics",
    "mu_hr",
    "mu_hr_printed_formula",
    "proposal_spec",
    "pseudo_determinant",
    "pseudo_inverse",
    "residual_grid",
    "sigma_k",
    "sigma_tilde_k",
    "spectral_decompose",
    "symmetrize",
    "theta_to_gamma",
]
