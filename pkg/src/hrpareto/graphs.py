"""Conditional-independence structure read off the precision matrix.

For the generalized HR family, coordinates i and j are conditionally
independent (the density factorizes into parts not depending on i and not
depending on j) exactly when theta_ij = 0, so the dependence structure is
the off-diagonal nonzero pattern. ``extremal_graph`` extracts it,
``check_pi2`` reports the connectivity conditions the pairwise-interaction
characterization needs, and ``factorization_residual`` measures the
factorization failure directly on the density.

Vertex indices are 0-based throughout, like everything else in the
package; the CLI relabels to 1-based for its JSON output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InputError
from .hr import GhrParams, PrecisionMatrix
from .linalg import DEFAULT_TOL
from .probe import PairwiseFamilySpec, cross_difference

# Canonical probe values for the factorization residual: coordinates move
# through {1/e, 1, e}, so log-differences reach magnitude 2.
CANONICAL_GRID_VALUES = (math.exp(-1.0), 1.0, math.e)


@dataclass(frozen=True)
class ExtremalGraph:
    """Undirected simple graph on 0-based vertices 0..d-1."""

    d: int
    edges: frozenset

    def __post_init__(self):
        for i, j in self.edges:
            if not (0 <= i < j < self.d):
                raise InputError(f"invalid edge ({i}, {j}) for {self.d} vertices")

    def neighbors(self, i: int) -> set:
        out = set()
        for a, b in self.edges:
            if a == i:
                out.add(b)
            elif b == i:
                out.add(a)
        return out


def extremal_graph(theta: PrecisionMatrix, tol: float = DEFAULT_TOL) -> ExtremalGraph:
    """Edges {i, j} where |theta_ij| exceeds tol * max|theta| (scale-free)."""
    m = theta.theta
    threshold = tol * float(np.max(np.abs(m)))
    edges = set()
    for i in range(theta.d):
        for j in range(i + 1, theta.d):
            if abs(m[i, j]) > threshold:
                edges.add((i, j))
    return ExtremalGraph(theta.d, frozenset(edges))


class Pi2Flags(NamedTuple):
    connected: bool
    every_edge_on_odd_cycle: bool


def check_pi2(graph: ExtremalGraph) -> Pi2Flags:
    """Connectivity plus the weaker every-edge-on-an-odd-cycle condition.

    The second flag is the relaxed sufficient condition for the
    pairwise-interaction characterization; it is False for an empty edge
    set (nothing interacts, so the relaxation buys nothing).
    """
    d = graph.d
    seen = {0}
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for w in graph.neighbors(v):
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    connected = len(seen) == d

    odd = bool(graph.edges) and all(
        _edge_on_odd_cycle(graph, u, v) for u, v in graph.edges
    )
    return Pi2Flags(connected, odd)


def _edge_on_odd_cycle(graph: ExtremalGraph, u: int, v: int) -> bool:
    """True when edge (u, v) lies on a simple cycle of odd length.

    Equivalent to a simple u-v path of even length >= 2 avoiding the edge
    itself. Exhaustive DFS over simple paths; exact, and cheap at the
    dimensions this package works with.
    """
    def dfs(node: int, parity: int, visited: set) -> bool:
        for w in graph.neighbors(node):
            if node == v and w == u:
                continue  # the probed edge itself
            if w == u:
                if parity == 1 and node != v:
                    return True
                continue
            if w in visited:
                continue
            if dfs(w, 1 - parity, visited | {w}):
                return True
        return False

    return dfs(v, 0, {v})


def factorization_residual(p: GhrParams, i: int, j: int) -> float:
    """Worst |cross_difference| for the pair (i, j) on the canonical grid.

    Uses logarithmic statistics, so the value is
    ``2 |theta_ij| max|dlog dlog| = 8 |theta_ij|`` analytically: zero
    exactly when theta_ij = 0.
    """
    if i == j or not (0 <= i < p.d and 0 <= j < p.d):
        raise InputError(f"need two distinct coordinate indices in [0, {p.d}), got {i}, {j}")
    family = PairwiseFamilySpec.log_family(p.mu, p.theta.theta)
    base = np.full(p.d, math.e)
    worst = 0.0
    values = CANONICAL_GRID_VALUES
    for a in values:
        for b in values:
            if a == b:
                continue
            for c in values:
                for e in values:
                    if c == e:
                        continue
                    worst = max(
                        worst, abs(cross_difference(family, i, j, (a, b), (c, e), base))
                    )
    return worst
