"""Dense symmetric linear algebra on small matrices.

All routines operate on plain ``numpy`` arrays and are pure functions of
their inputs. The eigensolver is a cyclic Jacobi iteration: for the
dimensions this package targets (d well below 50) it is simple, accurate to
a few ulps, and fully deterministic, which the downstream Monte Carlo
machinery relies on.

Conventions used throughout the package:

* "S1" is the space of symmetric matrices whose rows and columns sum to
  zero, i.e. matrices with the constant vector in their kernel.
* "S1+" is the subset of S1 that is positive semi-definite of rank d-1,
  so the kernel is exactly the span of the constant vector.
* Rank and definiteness decisions use a relative eigenvalue threshold,
  ``tol * max(|eigenvalue|)``, with ``DEFAULT_TOL`` as default.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError, NonSymmetricError

DEFAULT_TOL = 1e-9

# Relative asymmetry accepted before an input is rejected instead of symmetrized.
SYMMETRY_REL_TOL = 1e-9

# Jacobi sweep control: converged when the off-diagonal Frobenius norm drops
# below this fraction of the full Frobenius norm.
_JACOBI_REL_TOL = 1e-12
_MAX_SWEEPS = 100


def symmetrize(m, rel_tol: float = SYMMETRY_REL_TOL) -> np.ndarray:
    """Validate and return ``(m + m.T) / 2`` as a float array.

    Small asymmetries (relative magnitude below ``rel_tol``) are treated as
    I/O round-off and averaged away; anything larger raises
    ``NonSymmetricError`` since it signals a genuinely wrong input.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise NonSymmetricError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix entries must be finite")
    scale = float(np.max(np.abs(a)))
    asym = float(np.max(np.abs(a - a.T)))
    if asym > rel_tol * max(scale, 1e-300):
        raise NonSymmetricError(
            f"matrix asymmetry {asym:.3e} exceeds {rel_tol:.1e} * scale ({scale:.3e})"
        )
    return (a + a.T) / 2.0


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues (ascending) and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Return ``V diag(lambda) V.T``."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]


def _lock(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def spectral_decompose(m) -> SpectralDecomposition:
    """Diagonalize a symmetric matrix with cyclic Jacobi rotations.

    Deterministic for identical input: fixed sweep order, stable eigenvalue
    sort, and a fixed sign convention (the largest-magnitude component of
    each eigenvector is made positive).

    Raises ``NonSymmetricError`` for asymmetric input and
    ``ConvergenceError`` if the sweep budget is exhausted, which for
    symmetric input does not happen in practice.
    """
    a = symmetrize(m)
    n = a.shape[0]
    v = np.eye(n)
    fro = float(np.linalg.norm(a))
    if fro == 0.0:
        return SpectralDecomposition(_lock(np.zeros(n)), _lock(v))

    indices = np.arange(n)
    converged = False
    for _ in range(_MAX_SWEEPS):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= _JACOBI_REL_TOL * fro:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # Symmetric Schur rotation annihilating a[p, q].
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                app, aqq = a[p, p], a[q, q]
                mask = (indices != p) & (indices != q)
                aip = a[mask, p].copy()
                aiq = a[mask, q].copy()
                a[mask, p] = c * aip - s * aiq
                a[p, mask] = a[mask, p]
                a[mask, q] = s * aip + c * aiq
                a[q, mask] = a[mask, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    if not converged:
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge in {_MAX_SWEEPS} sweeps"
        )

    lam = np.diag(a).copy()
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    v = v[:, order]
    # Sign convention: flip each column so its largest-|.| entry is positive.
    for j in range(n):
        col = v[:, j]
        pivot = int(np.argmax(np.abs(col)))
        if col[pivot] < 0.0:
            v[:, j] = -col
    return SpectralDecomposition(_lock(lam), _lock(v))


def pseudo_inverse(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric matrix.

    Eigenvalues with ``|lambda| <= tol * max|lambda|`` are treated as zero
    and excluded from inversion.
    """
    dec = spectral_decompose(m)
    lam = dec.eigenvalues
    amax = float(np.max(np.abs(lam))) if lam.size else 0.0
    if amax == 0.0:
        return np.zeros_like(np.asarray(m, dtype=float))
    inv = np.where(np.abs(lam) > tol * amax, 1.0, 0.0)
    with np.errstate(divide="ignore"):
        inv = np.where(inv > 0.0, 1.0 / np.where(lam == 0.0, 1.0, lam), 0.0)
    out = (dec.eigenvectors * inv) @ dec.eigenvectors.T
    return (out + out.T) / 2.0


def pseudo_determinant(m, tol: float = DEFAULT_TOL) -> float:
    """Product of the eigenvalues exceeding ``tol * max|lambda|`` in magnitude.

    Returns 1.0 for the all-zero matrix (empty product).
    """
    lam = spectral_decompose(m).eigenvalues
    amax = float(np.max(np.abs(lam))) if lam.size else 0.0
    if amax == 0.0:
        return 1.0
    kept = lam[np.abs(lam) > tol * amax]
    return float(np.prod(kept)) if kept.size else 1.0


@dataclass(frozen=True, eq=False)
class S1Certificate:
    """Outcome of the zero-row-sum / PSD-rank-(d-1) certification.

    ``eigenvalues`` is the ascending spectrum used for the decision, kept so
    downstream consumers (the classifier, the CLI) can derive failure
    reasons without re-decomposing. ``tol`` is the relative threshold the
    certificate was computed with.
    """

    in_s1: bool
    in_s1_plus: bool
    rank: int
    eigenvalues: np.ndarray
    tol: float


def certify_s1_plus(m, tol: float = DEFAULT_TOL) -> S1Certificate:
    """Certify membership in S1 and S1+.

    ``in_s1`` holds when every row sum is within ``tol * d * max|entry|`` of
    zero. ``in_s1_plus`` additionally requires exactly one eigenvalue within
    ``tol * max|lambda|`` of zero, with eigenvector along the constant
    vector, and all remaining eigenvalues strictly above the threshold.
    """
    a = symmetrize(m)
    n = a.shape[0]
    scale = float(np.max(np.abs(a)))
    row_sums = a.sum(axis=1)
    in_s1 = bool(np.max(np.abs(row_sums)) <= tol * n * scale)

    dec = spectral_decompose(a)
    lam = dec.eigenvalues
    amax = float(np.max(np.abs(lam)))
    if amax == 0.0:
        return S1Certificate(in_s1, False, 0, lam, tol)

    cutoff = tol * amax
    near_zero = np.abs(lam) <= cutoff
    rank = int(n - np.count_nonzero(near_zero))

    ones_unit = np.full(n, 1.0 / np.sqrt(n))
    alignment = np.abs(dec.eigenvectors.T @ ones_unit)
    kernel_idx = int(np.argmax(alignment))
    in_plus = bool(
        in_s1
        and np.count_nonzero(near_zero) == 1
        and near_zero[kernel_idx]
        and alignment[kernel_idx] >= 0.999
        and np.all(lam[~near_zero] > cutoff)
    )
    return S1Certificate(in_s1, in_plus, rank, lam, tol)


def solve_partial_pivot(a, b, rel_tol: float = 1e-10) -> np.ndarray:
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting.

    Raises ``ValueError`` when a pivot falls below ``rel_tol`` times the
    largest initial entry; callers wrap this in their own semantic error.
    Intended for the small dense systems this package deals with.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n,):
        raise InputError(f"incompatible solve shapes {a.shape}, {b.shape}")
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        raise ValueError("singular system: zero matrix")
    threshold = rel_tol * scale
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[pivot_row, col]) <= threshold:
            raise ValueError(f"singular system: pivot {a[pivot_row, col]:.3e} at column {col}")
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            b[[col, pivot_row]] = b[[pivot_row, col]]
        factors = a[col + 1 :, col] / a[col, col]
        a[col + 1 :, col:] -= np.outer(factors, a[col, col:])
        b[col + 1 :] -= factors * b[col]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1 :] @ x[row + 1 :]) / a[row, row]
    return x
