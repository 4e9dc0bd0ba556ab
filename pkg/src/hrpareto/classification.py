"""Three-way classification of generalized Huesler-Reiss functions.

A parameter pair (mu, Theta) with Theta in S1 indexes an unnormalized
function on the exceedance region that is exactly one of:

* ``HrDensity``          - integrable and, once normalized, a multivariate
                           Pareto density (Theta in S1+, mu = mu_hr(Theta));
* ``IntegrableNonPareto`` - integrable but not marginally standardized
                           (Theta in S1+, mu' 1 > d, mu != mu_hr(Theta));
* ``NonIntegrable``      - infinite total mass (Theta not in S1+, or
                           mu' 1 <= d).

``classify`` decides via the mu-match route; ``is_mp_density`` re-decides
through the independent marginal-mass route (equality of every closed-form
slab mass). The two must agree, and tests hold them to that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotIntegrableError
from .hr import GhrParams, marginal_integral_k, mu_hr
from .linalg import S1Certificate

TAG_HR_DENSITY = "HrDensity"
TAG_INTEGRABLE_NON_PARETO = "IntegrableNonPareto"
TAG_NON_INTEGRABLE = "NonIntegrable"

REASON_NEGATIVE_EIGENVALUE = "NegativeEigenvalue"
REASON_RANK_DEFICIT = "RankDeficit"
REASON_LINEAR_MASS = "LinearMassCondition"
REASON_BOUNDARY = "BoundaryCase"
REASON_MU_MISMATCH = "MuMismatch"

# Default infinity-norm tolerance for the mu = mu_hr(Theta) match.
MU_MATCH_TOL = 1e-8


@dataclass(frozen=True)
class Classification:
    """Tag plus the complete list of failed conditions and the degree mu'1."""

    tag: str
    reasons: tuple
    homogeneity_degree: float


def homogeneity_degree(p: GhrParams) -> float:
    """Degree alpha with f(t y) = t^-alpha f(y) for t > 1; equals mu' 1."""
    return float(p.mu.sum())


def spectral_reasons(cert: S1Certificate) -> list:
    """Failure codes explaining why a certificate is not S1+ spectrally."""
    reasons = []
    lam = cert.eigenvalues
    amax = float(np.max(np.abs(lam))) if lam.size else 0.0
    if amax == 0.0:
        return [REASON_RANK_DEFICIT]
    cutoff = cert.tol * amax
    if bool(np.any(lam < -cutoff)):
        reasons.append(REASON_NEGATIVE_EIGENVALUE)
    if int(np.count_nonzero(np.abs(lam) <= cutoff)) != 1:
        reasons.append(REASON_RANK_DEFICIT)
    return reasons


def classify(p: GhrParams, tol: float = MU_MATCH_TOL) -> Classification:
    """Classify a parameter pair, reporting every failed condition.

    Non-integrability reasons cover both the spectral side
    (``NegativeEigenvalue``, ``RankDeficit``) and the linear side
    (``LinearMassCondition``, with ``BoundaryCase`` flagged when mu' 1 sits
    within tol of d, where the classification is a tie broken toward
    NonIntegrable). An integrable pair that misses mu_hr(Theta) by more
    than tol in infinity norm gets ``MuMismatch``.
    """
    degree = homogeneity_degree(p)
    reasons = [] if p.theta.certified_plus else spectral_reasons(p.theta.certificate)
    if degree <= p.d + tol:
        reasons.append(REASON_LINEAR_MASS)
        if abs(degree - p.d) <= tol:
            reasons.append(REASON_BOUNDARY)
    if reasons:
        return Classification(TAG_NON_INTEGRABLE, tuple(reasons), degree)
    target = mu_hr(p.theta)
    if float(np.max(np.abs(p.mu - target))) < tol:
        return Classification(TAG_HR_DENSITY, (), degree)
    return Classification(TAG_INTEGRABLE_NON_PARETO, (REASON_MU_MISMATCH,), degree)


def is_mp_density(p: GhrParams, tol: float = MU_MATCH_TOL) -> bool:
    """Decide HrDensity through the marginal-mass route.

    True iff Theta is certified S1+, the homogeneity degree is d + 1, and
    the d closed-form slab masses agree to relative ``tol``. Deliberately
    avoids ``mu_hr`` so that agreement with ``classify`` is a meaningful
    cross-check rather than a tautology.
    """
    if not p.theta.certified_plus:
        return False
    if abs(homogeneity_degree(p) - (p.d + 1)) > tol * p.d:
        return False
    try:
        masses = [marginal_integral_k(p, k) for k in range(p.d)]
    except NotIntegrableError:
        return False
    top = max(masses)
    return (top - min(masses)) <= tol * top
