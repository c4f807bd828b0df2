"""
Shared fixtures: seeded generators and small paired datasets.
"""
import numpy as np
import pytest

from operators.kernels import diffusion_from_points


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def circle_points(n: int, radius: float = 1.0) -> np.ndarray:
    theta = 2 * np.pi * np.arange(n) / n
    return radius * np.column_stack([np.cos(theta), np.sin(theta)])


def random_antisymmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.standard_normal((n, n))
    return x - x.T


@pytest.fixture
def small_pair(rng):
    """30 points in the plane and a smoothly warped copy."""
    view1 = rng.uniform(-1.0, 1.0, size=(30, 2))
    view2 = view1 + 0.3 * np.column_stack([np.sin(2 * view1[:, 1]), view1[:, 0] ** 2])
    return view1, view2


@pytest.fixture
def small_diffusion_pairs(small_pair):
    view1, view2 = small_pair
    return diffusion_from_points(view1, 2.0), diffusion_from_points(view2, 2.0)
