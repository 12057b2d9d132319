from typing import List

import numpy as np
import pytest

from otmap.basis import build_multi_index_set
from otmap.map import TransportMap


def cubic_kr_map(structure: str = "kr") -> TransportMap:
    """Monotone 2-D map S(x) = (x0 + 0.2 x0^3, 0.5 x0 + 0.3 x0^2 + x1 + 0.1 x1^3)."""
    basis = build_multi_index_set(structure, 2, 3)
    weights = np.zeros((2, basis.size))
    weights[0, basis.position((1, 0))] = 1.0
    weights[0, basis.position((3, 0))] = 0.2
    weights[1, basis.position((1, 0))] = 0.5
    weights[1, basis.position((2, 0))] = 0.3
    weights[1, basis.position((0, 1))] = 1.0
    weights[1, basis.position((0, 3))] = 0.1
    return TransportMap(basis, weights, "monomial")


@pytest.fixture
def kr_map() -> TransportMap:
    return cubic_kr_map("kr")


@pytest.fixture
def dense_map() -> TransportMap:
    return cubic_kr_map("dense")


@pytest.fixture
def points() -> np.ndarray:
    return np.random.default_rng(7).standard_normal((25, 2))


def random_monotone_kr_map(rng: np.random.Generator, dim: int, order: int) -> TransportMap:
    """Random KR map whose row d is g(x_<d) + a x_d + b x_d^3 with a > 0 and b >= 0."""
    basis = build_multi_index_set("kr", dim, order)
    weights = np.where(basis.structural_mask() & (basis.indices.T == 0), 0.2, 0.0)
    weights = weights * rng.standard_normal(weights.shape)
    for d in range(dim):
        pure = np.zeros(dim, dtype=int)
        pure[d] = 1
        weights[d, basis.position(pure)] = rng.uniform(0.5, 2.0)
        if order >= 3:
            pure[d] = 3
            weights[d, basis.position(pure)] = rng.uniform(0.0, 0.3)
    return TransportMap(basis, weights, "monomial")


@pytest.fixture
def random_kr_maps() -> List[TransportMap]:
    rng = np.random.default_rng(2024)
    return [random_monotone_kr_map(rng, int(rng.integers(1, 6)), int(rng.integers(1, 5))) for _ in range(100)]
