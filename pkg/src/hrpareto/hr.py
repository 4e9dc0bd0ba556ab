"""Huesler-Reiss parameter spaces and closed-form tail quantities.

The objects here describe the generalized Huesler-Reiss family of
unnormalized densities on the exceedance region
``L = [0, inf)^d \\ [0, 1]^d``:

    f(y) = exp{ -mu' log(y) - log(y)' Theta log(y) },

with ``mu`` a real d-vector and ``Theta`` symmetric with zero row and
column sums. Logarithms are natural, and the quadratic form carries no 1/2
factor; every formula in this module is stated in that convention.

Parameter conversions:

* ``theta_to_gamma`` maps a precision matrix to its variogram via the
  pseudoinverse, ``Gamma_ij = Tpi_ii + Tpi_jj - 2 Tpi_ij`` (an effective
  resistance when Theta is a graph Laplacian).
* ``gamma_to_theta`` inverts it through double centering,
  ``Theta = (P (-Gamma/2) P)^+`` with ``P = I - J/d``.

Closed-form masses: for ``Theta`` in S1+ and ``mu' 1 > d``, the mass of the
slab ``{y : y_k > 1}`` under f is

    I_k = pi^((d-1)/2) det(Theta_k)^{-1/2} exp{Q_k} / (mu' 1 - d),

where ``Theta_k`` deletes row and column k, ``Sigma_k = Theta_k^{-1}`` and
``Q_k = (mu - 1)_k' Sigma_k (mu - 1)_k / 4`` (subscript k meaning the k-th
entry removed). The constant is pi, not 2*pi, because the quadratic form in
the exponent has no 1/2; this module's Monte Carlo companion re-derives the
same masses by importance sampling as an independent check.

The marginal parameter ``mu_hr(Theta)`` is the unique mu that makes f a
valid multivariate Pareto density: the solution of ``Gamma (mu - 1) = c 1``
normalized so ``(mu - 1)' 1 = 1``. A closed-form expression sometimes
quoted for this vector fails that normalization (its entries always sum to
d + 2 instead of d + 1), so it is exposed only as the diagnostic
``mu_hr_printed_formula`` and never used in computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InputError,
    NotIntegrableError,
    NotS1Error,
    NotS1PlusError,
    NotStrictlyCNDError,
    OutsideSupportError,
    SingularVariogramError,
)
from .linalg import (
    DEFAULT_TOL,
    S1Certificate,
    certify_s1_plus,
    pseudo_inverse,
    solve_partial_pivot,
    spectral_decompose,
    symmetrize,
)

# Relative pivot threshold for the variogram solve.
_SOLVE_REL_TOL = 1e-10


def _lock(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PrecisionMatrix:
    """Symmetric matrix with zero row/column sums, plus its certificate.

    Instances are immutable; the wrapped array is marked read-only. Use
    ``from_matrix`` to construct: it symmetrizes, certifies membership in
    S1 (raising ``NotS1Error`` otherwise) and records whether the matrix is
    additionally in S1+ (``certified_plus``).
    """

    theta: np.ndarray
    certificate: S1Certificate

    @property
    def d(self) -> int:
        return self.theta.shape[0]

    @property
    def certified_plus(self) -> bool:
        return self.certificate.in_s1_plus

    @classmethod
    def from_matrix(cls, m, tol: float = DEFAULT_TOL) -> "PrecisionMatrix":
        a = symmetrize(m)
        if a.shape[0] < 2:
            raise InputError("precision matrix needs dimension >= 2")
        cert = certify_s1_plus(a, tol)
        if not cert.in_s1:
            worst = float(np.max(np.abs(a.sum(axis=1))))
            raise NotS1Error(f"row sums must vanish, worst |row sum| = {worst:.3e}")
        return cls(_lock(a), cert)


@dataclass(frozen=True, eq=False)
class VariogramMatrix:
    """Symmetric matrix with zero diagonal, positive off-diagonal entries,
    strictly conditionally negative definite."""

    gamma: np.ndarray

    @property
    def d(self) -> int:
        return self.gamma.shape[0]

    @classmethod
    def from_matrix(cls, m, tol: float = DEFAULT_TOL) -> "VariogramMatrix":
        a = symmetrize(m)
        n = a.shape[0]
        if n < 2:
            raise InputError("variogram matrix needs dimension >= 2")
        scale = float(np.max(np.abs(a)))
        if scale == 0.0:
            raise NotStrictlyCNDError("zero matrix is not a valid variogram")
        if float(np.max(np.abs(np.diag(a)))) > tol * scale:
            raise InputError("variogram diagonal must be zero")
        off = a[~np.eye(n, dtype=bool)]
        if np.any(off <= 0.0):
            raise InputError("variogram off-diagonal entries must be strictly positive")
        _check_strictly_cnd(a, tol)
        np.fill_diagonal(a, 0.0)
        return cls(_lock(a))


def _check_strictly_cnd(gamma: np.ndarray, tol: float) -> np.ndarray:
    """Centered matrix P(-Gamma/2)P must be PD on the centered subspace.

    Returns the centered matrix; raises ``NotStrictlyCNDError`` when it has
    more than one (near-)zero eigenvalue or any negative one.
    """
    n = gamma.shape[0]
    proj = np.eye(n) - np.ones((n, n)) / n
    centered = symmetrize(proj @ (-0.5 * gamma) @ proj, rel_tol=1e-8)
    lam = spectral_decompose(centered).eigenvalues
    amax = float(np.max(np.abs(lam)))
    if amax == 0.0:
        raise NotStrictlyCNDError("centered variogram is the zero matrix")
    cutoff = tol * amax
    near_zero = int(np.count_nonzero(np.abs(lam) <= cutoff))
    if near_zero != 1 or np.any(lam < -cutoff):
        raise NotStrictlyCNDError(
            "centered variogram must be positive definite on the centered "
            f"subspace; eigenvalues {np.array2string(lam, precision=6)}"
        )
    return centered


@dataclass(frozen=True, eq=False)
class GhrParams:
    """Parameter pair (mu, Theta) indexing one generalized HR function."""

    mu: np.ndarray
    theta: PrecisionMatrix

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        if mu.shape[0] != self.theta.d:
            raise InputError(
                f"mu has length {mu.shape[0]} but theta has dimension {self.theta.d}"
            )
        if not np.all(np.isfinite(mu)):
            raise InputError("mu entries must be finite")
        object.__setattr__(self, "mu", _lock(mu.copy()))

    @property
    def d(self) -> int:
        return self.theta.d


def theta_to_gamma(theta: PrecisionMatrix, tol: float = DEFAULT_TOL) -> VariogramMatrix:
    """Variogram of a certified S1+ precision matrix."""
    if not theta.certified_plus:
        raise NotS1PlusError("theta_to_gamma requires a certified S1+ matrix")
    pinv = pseudo_inverse(theta.theta, tol)
    dg = np.diag(pinv)
    g = dg[:, None] + dg[None, :] - 2.0 * pinv
    np.fill_diagonal(g, 0.0)
    return VariogramMatrix.from_matrix(g, tol)


def gamma_to_theta(gamma: VariogramMatrix, tol: float = DEFAULT_TOL) -> PrecisionMatrix:
    """Precision matrix of a variogram, ``(P (-Gamma/2) P)^+``."""
    centered = _check_strictly_cnd(gamma.gamma, tol)
    theta = pseudo_inverse(centered, tol)
    return PrecisionMatrix.from_matrix(theta, tol)


def mu_hr(theta: PrecisionMatrix, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Marginally standardizing mu for a given S1+ precision matrix.

    Solves ``Gamma v = 1``, rescales v so its entries sum to one, and
    returns ``1 + v``. The result satisfies ``mu' 1 = d + 1``,
    ``Gamma (mu - 1) = c 1`` for a scalar c, and equalizes every
    ``marginal_integral_k``.
    """
    gamma = theta_to_gamma(theta, tol).gamma
    ones = np.ones(theta.d)
    try:
        x = solve_partial_pivot(gamma, ones, _SOLVE_REL_TOL)
    except ValueError as exc:
        raise SingularVariogramError(str(exc)) from exc
    total = float(x.sum())
    if abs(total) <= _SOLVE_REL_TOL * float(np.max(np.abs(x))) * theta.d:
        raise SingularVariogramError("solution of Gamma v = 1 has numerically zero sum")
    return ones + x / total


def mu_hr_printed_formula(theta: PrecisionMatrix, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Closed-form mu expression kept as a diagnostic.

    Computes ``(1 + 2/d) 1 - (1/d) Theta Gamma 1``. Because the rows of
    Theta sum to zero this vector always sums to d + 2, so it cannot equal
    ``mu_hr`` (which sums to d + 1); callers compare the two for reporting.
    """
    if not theta.certified_plus:
        raise NotS1PlusError("printed-formula mu requires a certified S1+ matrix")
    d = theta.d
    gamma = theta_to_gamma(theta, tol).gamma
    ones = np.ones(d)
    return (1.0 + 2.0 / d) * ones - (theta.theta @ (gamma @ ones)) / d


@dataclass(frozen=True, eq=False)
class MuDiagnostics:
    """Side-by-side view of the solved mu and the printed-formula mu."""

    mu: np.ndarray
    gamma_solved: float
    mu_printed: np.ndarray
    gamma_of_printed: np.ndarray
    claimed_gamma_scalar: float
    formulas_agree: bool


def mu_diagnostics(theta: PrecisionMatrix, tol: float = DEFAULT_TOL) -> MuDiagnostics:
    """Solved mu, the printed-formula mu, and the associated scalars.

    ``gamma_solved`` is the constant c with ``Gamma (mu - 1) = c 1`` for the
    solved mu. ``claimed_gamma_scalar`` evaluates the scalar expression
    ``d^-2 1' Gamma (Theta Gamma / 2 - I) 1`` that reportedly plays the same
    role for the printed formula; it is reported verbatim, not asserted,
    since numerically it matches neither constant on the worked examples.
    """
    d = theta.d
    ones = np.ones(d)
    gamma = theta_to_gamma(theta, tol).gamma
    mu = mu_hr(theta, tol)
    gamma_solved = float((gamma @ (mu - ones)).mean())
    printed = mu_hr_printed_formula(theta, tol)
    claimed = float(ones @ gamma @ (0.5 * theta.theta @ gamma - np.eye(d)) @ ones) / d**2
    agree = bool(np.max(np.abs(mu - printed)) < tol)
    return MuDiagnostics(
        mu=_lock(mu),
        gamma_solved=gamma_solved,
        mu_printed=_lock(printed),
        gamma_of_printed=_lock(gamma @ (printed - ones)),
        claimed_gamma_scalar=claimed,
        formulas_agree=agree,
    )


def _delete_k(m: np.ndarray, k: int) -> np.ndarray:
    return np.delete(np.delete(m, k, axis=0), k, axis=1)


def _check_index(d: int, k: int) -> None:
    if not (0 <= k < d):
        raise InputError(f"index {k} out of range for dimension {d} (0-based)")


def sigma_k(theta: PrecisionMatrix, k: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Inverse of Theta with row and column k deleted (0-based).

    Positive definite whenever theta is certified S1+.
    """
    if not theta.certified_plus:
        raise NotS1PlusError("sigma_k requires a certified S1+ matrix")
    _check_index(theta.d, k)
    sub = _delete_k(theta.theta, k)
    dec = spectral_decompose(sub)
    lam = dec.eigenvalues
    if float(lam[0]) <= tol * float(np.max(np.abs(lam))):
        raise NotS1PlusError(f"submatrix with index {k} removed is not positive definite")
    out = (dec.eigenvectors / lam) @ dec.eigenvectors.T
    return (out + out.T) / 2.0


def sigma_tilde_k(gamma: VariogramMatrix, k: int) -> np.ndarray:
    """Variogram-based d x d companion of ``sigma_k``.

    Entry (i, j) is ``(Gamma_ik + Gamma_jk - Gamma_ij) / 2``; row and
    column k vanish identically, and deleting them recovers ``sigma_k`` of
    the corresponding precision matrix.
    """
    _check_index(gamma.d, k)
    g = gamma.gamma
    col = g[:, k]
    return 0.5 * (col[:, None] + col[None, :] - g)


def det_theta_k(theta: PrecisionMatrix, k: int, tol: float = DEFAULT_TOL) -> float:
    """Determinant of Theta with row and column k deleted.

    For S1+ matrices this value does not depend on k; empirically it equals
    ``pseudo_determinant(theta) / d``, and the k-invariance is what the
    closed-form masses rely on.
    """
    if not theta.certified_plus:
        raise NotS1PlusError("det_theta_k requires a certified S1+ matrix")
    _check_index(theta.d, k)
    lam = spectral_decompose(_delete_k(theta.theta, k)).eigenvalues
    if float(lam[0]) <= tol * float(np.max(np.abs(lam))):
        raise NotS1PlusError(f"submatrix with index {k} removed is not positive definite")
    return float(np.prod(lam))


def log_density_unnormalized(p: GhrParams, y) -> float:
    """log f(y) without the normalizing constant.

    ``y`` must lie in the exceedance region with strictly positive
    coordinates: some coordinate strictly above 1, none at or below 0.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != p.d:
        raise InputError(f"point has length {y.shape[0]}, expected {p.d}")
    if not np.all(np.isfinite(y)) or np.any(y <= 0.0):
        raise OutsideSupportError("all coordinates must be strictly positive")
    if float(np.max(y)) <= 1.0:
        raise OutsideSupportError("point is inside the unit box: no coordinate exceeds 1")
    x = np.log(y)
    return float(-(p.mu @ x) - x @ p.theta.theta @ x)


def _integrability_reasons(p: GhrParams, tol: float) -> tuple:
    reasons = []
    if not p.theta.certified_plus:
        reasons.append("spectral")
    if float(p.mu.sum()) - p.d <= tol:
        reasons.append("linear")
    return tuple(reasons)


def _quarter_quad_form(p: GhrParams, k: int, tol: float) -> float:
    v = np.delete(p.mu - 1.0, k)
    return float(v @ sigma_k(p.theta, k, tol) @ v) / 4.0


def log_marginal_integral_k(p: GhrParams, k: int, tol: float = DEFAULT_TOL) -> float:
    """log of the unnormalized mass of ``{y in L : y_k > 1}`` (0-based k).

    Requires Theta in S1+ and ``mu' 1 > d``; otherwise the mass is infinite
    and ``NotIntegrableError`` reports which condition failed.
    """
    _check_index(p.d, k)
    reasons = _integrability_reasons(p, tol)
    if reasons:
        raise NotIntegrableError(
            f"marginal mass is infinite ({', '.join(reasons)} condition)", reasons
        )
    d = p.d
    s = float(p.mu.sum()) - d
    lam = spectral_decompose(_delete_k(p.theta.theta, k)).eigenvalues
    log_det = float(np.sum(np.log(lam)))
    q = _quarter_quad_form(p, k, tol)
    return 0.5 * (d - 1) * math.log(math.pi) - 0.5 * log_det + q - math.log(s)


def marginal_integral_k(p: GhrParams, k: int, tol: float = DEFAULT_TOL) -> float:
    """Unnormalized mass of ``{y in L : y_k > 1}`` in closed form."""
    return math.exp(log_marginal_integral_k(p, k, tol))


def exceedance_ratio(p: GhrParams, k: int, el: int, tol: float = DEFAULT_TOL) -> float:
    """Ratio ``I_k / I_l`` of two marginal masses, ``exp{Q_k - Q_l}``.

    Equals 1 for every pair exactly when mu marginally standardizes the
    density. When ``(mu - 1)' 1 = 1`` the exponent also equals
    ``(Gamma_k. - Gamma_l.)(mu - 1) / 4``.
    """
    _check_index(p.d, k)
    _check_index(p.d, el)
    reasons = _integrability_reasons(p, tol)
    if reasons:
        raise NotIntegrableError(
            f"marginal masses are infinite ({', '.join(reasons)} condition)", reasons
        )
    if k == el:
        return 1.0
    return math.exp(_quarter_quad_form(p, k, tol) - _quarter_quad_form(p, el, tol))
