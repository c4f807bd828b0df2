"""
Pairwise distances, median bandwidths, Gaussian affinities and the
Markov normalizations P = D^-1 W and Q = W D^-1.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from config.settings import settings
from utils.errors import DegenerateData, InvalidData, InvalidParameter, ShapeError

logger = logging.getLogger(__name__)

METRICS = ("euclidean",)


def _as_finite_matrix(values, name: str) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if array.ndim == 1:
        array = array[:, None]
    if array.ndim != 2:
        raise ShapeError(f"{name} must be a 2-D array, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InvalidData(f"{name} contains non-finite values")
    return array


def _check_square(matrix: np.ndarray, name: str) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {matrix.shape}")


@dataclass(frozen=True)
class PairedDataset:
    """Two corresponded sample sets: row i of view1 matches row i of view2."""

    view1: np.ndarray
    view2: np.ndarray

    def __post_init__(self):
        view1 = _as_finite_matrix(self.view1, "view1")
        view2 = _as_finite_matrix(self.view2, "view2")
        if view1.shape[0] != view2.shape[0]:
            raise ShapeError(
                f"Views must have the same number of rows: {view1.shape[0]} != {view2.shape[0]}"
            )
        if view1.shape[0] < 2:
            raise InvalidData("A paired dataset needs at least 2 samples")
        object.__setattr__(self, "view1", view1)
        object.__setattr__(self, "view2", view2)

    @property
    def n(self) -> int:
        return self.view1.shape[0]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric N x N distances with a zero diagonal."""

    d: np.ndarray

    @property
    def n(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class AffinityMatrix:
    """Gaussian affinities w_ij = exp(-d_ij^2 / eps^2) and their bandwidth."""

    w: np.ndarray
    epsilon: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        _check_square(w, "affinity")
        if self.epsilon <= 0:
            raise InvalidParameter(f"epsilon must be positive, got {self.epsilon}")
        if np.any(w < 0) or np.any(w > 1):
            raise InvalidData("affinity entries must lie in [0, 1]")
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.w.shape[0]


@dataclass(frozen=True)
class DiffusionPair:
    """Row-stochastic p, column-stochastic q = p^T and the degrees of one view."""

    p: np.ndarray
    q: np.ndarray
    degrees: np.ndarray

    @property
    def n(self) -> int:
        return self.p.shape[0]


def pairwise_distances(points, metric: str = "euclidean") -> DistanceMatrix:
    """
    Compute the dense distance matrix of a point cloud.

    Args:
        points: N x D coordinates
        metric: Distance name (only 'euclidean')

    Returns:
        DistanceMatrix with an exactly symmetric, zero-diagonal matrix
    """
    if metric not in METRICS:
        raise InvalidParameter(f"Unknown metric: {metric}. Available metrics: {list(METRICS)}")

    points = _as_finite_matrix(points, "points")
    n = points.shape[0]
    if n < 2:
        raise InvalidData("At least 2 points are required")
    if n > settings.KERNEL_MAX_SAMPLES:
        raise InvalidParameter(
            f"{n} samples exceed KERNEL_MAX_SAMPLES={settings.KERNEL_MAX_SAMPLES} (dense storage)"
        )

    return DistanceMatrix(d=squareform(pdist(points, metric=metric)))


def median_bandwidth(d: DistanceMatrix, divisor: float = 1.0) -> float:
    """
    Median of the strictly upper-triangular distances, divided by `divisor`.

    An even count of distances uses the mean of the two central values.
    """
    if divisor <= 0:
        raise InvalidParameter(f"divisor must be positive, got {divisor}")

    upper = d.d[np.triu_indices(d.n, k=1)]
    if not np.any(upper > 0):
        raise DegenerateData("All pairwise distances are zero")

    median = float(np.median(upper))
    if median <= 0:
        raise DegenerateData("Median pairwise distance is zero (too many duplicate points)")

    return median / divisor


def gaussian_affinity(d: DistanceMatrix, epsilon: float) -> AffinityMatrix:
    """Gaussian kernel exp(-d^2 / eps^2), floored at the smallest normal float."""
    if epsilon <= 0:
        raise InvalidParameter(f"epsilon must be positive, got {epsilon}")

    # Entries stay in (0, 1] even where exp underflows
    w = np.maximum(np.exp(-np.square(d.d) / epsilon ** 2), np.finfo(float).tiny)
    return AffinityMatrix(w=w, epsilon=float(epsilon))


def normalize(w: AffinityMatrix) -> DiffusionPair:
    """
    Markov-normalize an affinity matrix.

    Returns:
        DiffusionPair with p = D^-1 W, q = W D^-1 (= p^T) and degrees D_ii
    """
    degrees = w.w.sum(axis=1)
    p = w.w / degrees[:, None]
    # w is symmetric, so w_ij / d_j is exactly p_ji
    q = np.ascontiguousarray(p.T)
    return DiffusionPair(p=p, q=q, degrees=degrees)


def affinity_from_points(points, divisor: float = 1.0) -> AffinityMatrix:
    """Distances -> median bandwidth / divisor -> Gaussian affinity."""
    d = pairwise_distances(points)
    epsilon = median_bandwidth(d, divisor)
    logger.debug("median bandwidth %.6g (divisor %g, n=%d)", epsilon, divisor, d.n)
    return gaussian_affinity(d, epsilon)


def diffusion_from_points(points, divisor: float = 1.0) -> DiffusionPair:
    """Full kernel path for one view."""
    return normalize(affinity_from_points(points, divisor))
