import numpy as np
import pytest

from hrpareto import GhrParams, PrecisionMatrix, mu_hr

PROJ_3 = np.eye(3) - np.ones((3, 3)) / 3.0
PATH_3 = np.array([[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
PATH_GAMMA = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])


def random_laplacian(rng, d, extra_edge_prob=0.5, w_lo=0.5, w_hi=2.0):
    """Weighted Laplacian of a random connected graph: always in S1+."""
    order = rng.permutation(d)
    edges = {tuple(sorted((order[i], order[i + 1]))) for i in range(d - 1)}
    for i in range(d):
        for j in range(i + 1, d):
            if (i, j) not in edges and rng.random() < extra_edge_prob:
                edges.add((i, j))
    lap = np.zeros((d, d))
    for i, j in edges:
        w = rng.uniform(w_lo, w_hi)
        lap[i, i] += w
        lap[j, j] += w
        lap[i, j] -= w
        lap[j, i] -= w
    return lap


def random_disconnected_laplacian(rng, d):
    """Laplacian of a two-component graph: S1 but rank below d - 1."""
    split = d // 2
    lap = np.zeros((d, d))
    for block in (range(split), range(split, d)):
        block = list(block)
        for a, b in zip(block, block[1:]):
            w = rng.uniform(0.5, 2.0)
            lap[a, a] += w
            lap[b, b] += w
            lap[a, b] -= w
            lap[b, a] -= w
    return lap


def random_params(rng, d, kind):
    """A GhrParams instance of a requested classification kind."""
    if kind == "spectral_fail":
        theta = PrecisionMatrix.from_matrix(-random_laplacian(rng, d))
        return GhrParams(1.0 + rng.uniform(0.2, 1.0, d), theta)
    if kind == "rank_fail":
        theta = PrecisionMatrix.from_matrix(random_disconnected_laplacian(rng, d))
        return GhrParams(1.0 + rng.uniform(0.2, 1.0, d), theta)
    theta = PrecisionMatrix.from_matrix(random_laplacian(rng, d))
    if kind == "hr":
        return GhrParams(mu_hr(theta), theta)
    if kind == "integrable":
        v = rng.uniform(-0.5, 0.8, d)
        v = v - v.mean() + rng.uniform(0.6, 1.8) / d
        return GhrParams(1.0 + v, theta)
    if kind == "linear_fail":
        v = rng.uniform(-0.6, 0.6, d)
        v = v - v.mean() - rng.uniform(0.0, 1.0) / d
        return GhrParams(1.0 + v, theta)
    raise ValueError(kind)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
