"""Pairwise-interaction families with pluggable sufficient statistics.

A family member has unnormalized log density

    log f(y) = - sum_i mu_i' S_i(y_i) - sum_i sum_j theta_ij T_i(y_i) T_j(y_j)

with per-coordinate marginal statistics S_i (vector valued, dimension q)
and scalar interaction statistics T_i, drawn from a fixed enumeration of
transforms. With logarithmic statistics this reduces to the generalized
Huesler-Reiss form; the point of the module is to probe what happens with
the other choices. Scaling a point by t > 1 must shift the log density by
exactly -(d+1) log t for a multivariate Pareto density, and
``homogeneity_residual`` measures the violation of that identity. For
non-logarithmic statistics on a connected interaction support no parameter
choice removes the violation, and the scan makes that observable.

``cross_difference`` is the four-point alternating sum that isolates one
interaction term: it equals ``-2 theta_ij dT_i dT_j`` and vanishes for all
probe points exactly when the density factorizes across the pair (i, j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError
from .linalg import symmetrize
from .rng import derive_stream, uniforms

STAT_KINDS = ("log", "identity", "power", "squared_log")

_PURPOSE_GRID = 0x4752


@dataclass(frozen=True)
class StatFn:
    """One transform from the statistic enumeration.

    ``power`` carries an exponent alpha != 0; the enumeration contains only
    non-constant functions on (0, inf).
    """

    kind: str
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in STAT_KINDS:
            raise InputError(f"unknown statistic kind {self.kind!r}; choose from {STAT_KINDS}")
        if self.kind == "power" and (self.alpha == 0.0 or not math.isfinite(self.alpha)):
            raise InputError("power statistic needs a finite nonzero exponent")

    def __call__(self, y):
        if self.kind == "log":
            return np.log(y)
        if self.kind == "identity":
            return np.asarray(y, dtype=float)
        if self.kind == "power":
            return np.asarray(y, dtype=float) ** self.alpha
        return np.log(y) ** 2

    @classmethod
    def parse(cls, text: str) -> "StatFn":
        """Parse "log", "identity", "squared_log" or "power:ALPHA"."""
        name, _, arg = text.partition(":")
        if name == "power":
            if not arg:
                raise InputError("power statistic needs an exponent, e.g. power:0.5")
            return cls("power", float(arg))
        if arg:
            raise InputError(f"statistic {name!r} takes no argument")
        return cls(name)


LOG = StatFn("log")
IDENTITY = StatFn("identity")
SQUARED_LOG = StatFn("squared_log")


def _support_connected(theta: np.ndarray) -> bool:
    d = theta.shape[0]
    seen = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(d):
            if j != i and j not in seen and theta[i, j] != 0.0:
                seen.add(j)
                frontier.append(j)
    return len(seen) == d


@dataclass(frozen=True, eq=False)
class PairwiseFamilySpec:
    """A concrete family member: statistics, marginal parameters, theta.

    ``mu`` has shape (d, q) matching the per-coordinate marginal statistic
    tuples. ``support_connected`` records whether the off-diagonal nonzero
    pattern of theta forms a connected graph; the falsification scans are
    only meaningful when it does, so the flag is kept rather than enforced.
    """

    d: int
    q: int
    marginal_stats: tuple
    interaction_stats: tuple
    mu: np.ndarray
    theta: np.ndarray
    support_connected: bool = field(init=False)

    def __post_init__(self):
        if self.d < 2:
            raise InputError("need dimension >= 2")
        if self.q < 1:
            raise InputError("marginal statistic dimension q must be >= 1")
        if len(self.marginal_stats) != self.d or len(self.interaction_stats) != self.d:
            raise InputError("need one statistic tuple per coordinate")
        for stats in self.marginal_stats:
            if len(stats) != self.q:
                raise InputError(f"each marginal statistic tuple must have length q = {self.q}")
        mu = np.asarray(self.mu, dtype=float)
        if mu.shape != (self.d, self.q):
            raise InputError(f"mu must have shape ({self.d}, {self.q}), got {mu.shape}")
        theta = symmetrize(self.theta)
        if theta.shape[0] != self.d:
            raise InputError("theta dimension does not match d")
        mu.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "support_connected", _support_connected(theta))

    @classmethod
    def uniform(cls, stat: StatFn, mu, theta) -> "PairwiseFamilySpec":
        """Same scalar statistic everywhere, for both S and T (q = 1)."""
        mu = np.asarray(mu, dtype=float).reshape(-1, 1)
        d = mu.shape[0]
        return cls(d, 1, ((stat,),) * d, (stat,) * d, mu, theta)

    @classmethod
    def log_family(cls, mu, theta) -> "PairwiseFamilySpec":
        """Logarithmic statistics: coincides with the generalized HR form."""
        return cls.uniform(LOG, mu, theta)


def _check_positive(y: np.ndarray, what: str) -> np.ndarray:
    y = np.asarray(y, dtype=float).reshape(-1)
    if not np.all(np.isfinite(y)) or np.any(y <= 0.0):
        raise DomainError(f"{what} must have strictly positive finite coordinates")
    return y


def log_pairwise_density(f: PairwiseFamilySpec, y) -> float:
    """Unnormalized log density of the family member at y (y > 0)."""
    y = _check_positive(y, "evaluation point")
    if y.shape[0] != f.d:
        raise InputError(f"point has length {y.shape[0]}, expected {f.d}")
    marginal = 0.0
    for i in range(f.d):
        for a, stat in enumerate(f.marginal_stats[i]):
            marginal += f.mu[i, a] * float(stat(y[i]))
    t = np.array([float(f.interaction_stats[i](y[i])) for i in range(f.d)])
    return float(-marginal - t @ f.theta @ t)


def homogeneity_residual(f: PairwiseFamilySpec, y, t: float) -> float:
    """|log f(t y) - log f(y) + (d + 1) log t| at one probe point.

    Zero (to round-off) everywhere is necessary for the family member to
    scale like a multivariate Pareto density. Accepts any t > 0.
    """
    if not (math.isfinite(t) and t > 0.0):
        raise DomainError("scaling factor t must be positive and finite")
    y = _check_positive(y, "probe point")
    return abs(
        log_pairwise_density(f, t * y)
        - log_pairwise_density(f, y)
        + (f.d + 1) * math.log(t)
    )


def residual_grid(d: int, n_points: int = 100, seed: int = 0) -> np.ndarray:
    """Deterministic probe grid inside the exceedance region.

    Log coordinates are uniform on [-2, 2]^d, rejecting draws whose maximum
    is not positive, so points cover both near-boundary and tail territory.
    Returns the points in y space, shape (n_points, d).
    """
    stream = derive_stream(seed, _PURPOSE_GRID, d)
    points = np.empty((n_points, d))
    found = 0
    attempt = 0
    while found < n_points:
        base = np.uint64(attempt * d)
        x = -2.0 + 4.0 * uniforms(stream, base + np.arange(d, dtype=np.uint64))
        attempt += 1
        if x.max() > 0.0:
            points[found] = np.exp(x)
            found += 1
    return points


@dataclass(frozen=True, eq=False)
class ResidualScan:
    """Worst homogeneity violation over a grid of (point, scale) probes."""

    max_residual: float
    worst_point: np.ndarray
    worst_t: float
    n_points: int
    t_values: tuple


def homogeneity_residual_scan(
    f: PairwiseFamilySpec,
    t_values=(1.5, 2.0, 10.0),
    n_points: int = 100,
    seed: int = 0,
) -> ResidualScan:
    """Scan ``homogeneity_residual`` over the deterministic grid.

    For the falsification reading (non-logarithmic statistics must violate
    homogeneity somewhere) the interaction support should be connected;
    check ``f.support_connected``.
    """
    grid = residual_grid(f.d, n_points, seed)
    worst = -1.0
    worst_point = grid[0]
    worst_t = float(t_values[0])
    for y in grid:
        for t in t_values:
            r = homogeneity_residual(f, y, float(t))
            if r > worst:
                worst, worst_point, worst_t = r, y, float(t)
    return ResidualScan(worst, worst_point.copy(), worst_t, n_points, tuple(t_values))


def cross_difference(f: PairwiseFamilySpec, i: int, j: int, yi, yj, base) -> float:
    """Four-point alternating sum isolating the (i, j) interaction.

    With ``yi = (yi1, yi2)`` and ``yj = (yj1, yj2)``, evaluates log f at the
    four points obtained from ``base`` by setting coordinates (i, j) to
    each combination, and returns ``f11 - f12 - f21 + f22``. Equals
    ``-2 theta_ij (T_i(yi1) - T_i(yi2)) (T_j(yj1) - T_j(yj2))``, so it
    vanishes for every probe choice exactly when the density factorizes
    across the pair.
    """
    if i == j or not (0 <= i < f.d and 0 <= j < f.d):
        raise InputError(f"need two distinct coordinate indices in [0, {f.d}), got {i}, {j}")
    yi1, yi2 = (float(v) for v in yi)
    yj1, yj2 = (float(v) for v in yj)
    base = _check_positive(base, "base point")
    if base.shape[0] != f.d:
        raise InputError(f"base point has length {base.shape[0]}, expected {f.d}")
    total = 0.0
    for sign, vi, vj in ((1.0, yi1, yj1), (-1.0, yi1, yj2), (-1.0, yi2, yj1), (1.0, yi2, yj2)):
        y = base.copy()
        y[i] = vi
        y[j] = vj
        total += sign * log_pairwise_density(f, y)
    return total
