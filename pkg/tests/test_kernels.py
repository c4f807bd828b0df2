"""
Distances, bandwidths, affinities and Markov normalization.
"""
import numpy as np
import pytest

from operators.kernels import (
    AffinityMatrix,
    DistanceMatrix,
    PairedDataset,
    diffusion_from_points,
    gaussian_affinity,
    median_bandwidth,
    normalize,
    pairwise_distances,
)
from tests.conftest import circle_points
from utils.errors import DegenerateData, InvalidData, InvalidParameter, ShapeError


class TestPairwiseDistances:

    def test_pythagorean(self):
        d = pairwise_distances(np.array([[0.0, 0.0], [3.0, 4.0]]))
        assert d.d[0, 1] == 5.0
        assert d.d[1, 0] == 5.0

    def test_identical_rows_give_zero_matrix(self):
        d = pairwise_distances(np.ones((4, 3)))
        np.testing.assert_array_equal(d.d, np.zeros((4, 4)))

    def test_matches_double_loop(self, rng):
        points = rng.standard_normal((4, 3))
        d = pairwise_distances(points)
        for i in range(4):
            for j in range(4):
                assert abs(d.d[i, j] - np.sqrt(np.sum((points[i] - points[j]) ** 2))) <= 1e-12

    def test_symmetric_zero_diagonal(self, rng):
        d = pairwise_distances(rng.standard_normal((25, 2)))
        np.testing.assert_array_equal(d.d, d.d.T)
        np.testing.assert_array_equal(np.diag(d.d), 0.0)

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidData):
            pairwise_distances(np.array([[0.0, np.nan], [1.0, 1.0]]))

    def test_single_point_rejected(self):
        with pytest.raises(InvalidData):
            pairwise_distances(np.zeros((1, 2)))

    def test_unknown_metric(self):
        with pytest.raises(InvalidParameter):
            pairwise_distances(np.zeros((3, 2)), metric="cosine")


class TestMedianBandwidth:

    def _three_point_distances(self):
        # upper triangle {1, 2, 3}
        return DistanceMatrix(d=np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]]))

    def test_odd_count(self):
        assert median_bandwidth(self._three_point_distances(), 1.0) == 2.0

    def test_divisor(self):
        assert median_bandwidth(self._three_point_distances(), 2.0) == 1.0

    def test_matches_sort_oracle(self, rng):
        d = pairwise_distances(rng.standard_normal((10, 2)))
        values = np.sort(d.d[np.triu_indices(10, k=1)])
        # 45 values: the middle one
        assert median_bandwidth(d) == values[22]

    def test_even_count_averages_central_values(self, rng):
        d = pairwise_distances(rng.standard_normal((4, 2)))
        values = np.sort(d.d[np.triu_indices(4, k=1)])
        assert median_bandwidth(d) == pytest.approx(0.5 * (values[2] + values[3]), abs=1e-15)

    def test_all_zero_is_degenerate(self):
        with pytest.raises(DegenerateData):
            median_bandwidth(DistanceMatrix(d=np.zeros((3, 3))))

    @pytest.mark.parametrize("divisor", [0.0, -1.0])
    def test_bad_divisor(self, divisor):
        with pytest.raises(InvalidParameter):
            median_bandwidth(self._three_point_distances(), divisor)


class TestGaussianAffinity:

    def test_zero_distance_is_one(self, rng):
        w = gaussian_affinity(pairwise_distances(rng.standard_normal((5, 2))), 0.7)
        np.testing.assert_array_equal(np.diag(w.w), 1.0)

    def test_distance_equal_to_bandwidth(self):
        d = DistanceMatrix(d=np.array([[0.0, 0.4], [0.4, 0.0]]))
        w = gaussian_affinity(d, 0.4)
        assert w.w[0, 1] == pytest.approx(np.exp(-1.0), abs=1e-15)

    def test_elementwise_oracle(self):
        d = np.array([[0.0, 0.3, 1.2], [0.3, 0.0, 0.5], [1.2, 0.5, 0.0]])
        w = gaussian_affinity(DistanceMatrix(d=d), 0.8)
        np.testing.assert_allclose(w.w, np.exp(-(d ** 2) / 0.64), rtol=0, atol=1e-15)
        np.testing.assert_array_equal(w.w, w.w.T)

    def test_non_positive_epsilon(self):
        with pytest.raises(InvalidParameter):
            gaussian_affinity(DistanceMatrix(d=np.zeros((2, 2))), 0.0)

    def test_far_points_stay_positive(self):
        # exp(-900) underflows to exactly 0
        d = DistanceMatrix(d=np.array([[0.0, 30.0], [30.0, 0.0]]))
        w = gaussian_affinity(d, 1.0)
        assert w.w[0, 1] == np.finfo(float).tiny
        assert np.all(w.w > 0)
        assert np.all(w.w <= 1)


class TestNormalize:

    def test_all_ones(self):
        pair = normalize(AffinityMatrix(w=np.ones((2, 2)), epsilon=1.0))
        np.testing.assert_array_equal(pair.p, np.full((2, 2), 0.5))
        np.testing.assert_array_equal(pair.q, np.full((2, 2), 0.5))

    def test_identity(self):
        pair = normalize(AffinityMatrix(w=np.eye(3), epsilon=1.0))
        np.testing.assert_array_equal(pair.p, np.eye(3))
        np.testing.assert_array_equal(pair.q, np.eye(3))

    def test_random_stochastic(self, rng):
        x = rng.uniform(size=(5, 5))
        w = 0.5 * (x + x.T)
        np.fill_diagonal(w, 1.0)
        pair = normalize(AffinityMatrix(w=w, epsilon=1.0))
        np.testing.assert_array_equal(pair.q, pair.p.T)
        np.testing.assert_allclose(pair.p.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(pair.q.sum(axis=0), 1.0, atol=1e-12)
        np.testing.assert_allclose(pair.degrees, w.sum(axis=1))

    def test_affinity_range_checked(self):
        with pytest.raises(InvalidData):
            AffinityMatrix(w=np.array([[1.0, 1.5], [1.5, 1.0]]), epsilon=1.0)


class TestPairedDataset:

    def test_row_mismatch(self):
        with pytest.raises(ShapeError):
            PairedDataset(view1=np.zeros((4, 2)), view2=np.zeros((5, 2)))

    def test_views_may_differ_in_dimension(self, rng):
        data = PairedDataset(view1=rng.standard_normal((6, 2)), view2=rng.standard_normal((6, 5)))
        assert data.n == 6


class TestScaleInvariance:

    @pytest.mark.parametrize("gamma", [0.5, 2.0, 10.0])
    def test_median_bandwidth_absorbs_scale(self, rng, gamma):
        points = rng.standard_normal((40, 3))
        base = diffusion_from_points(points, 2.0)
        scaled = diffusion_from_points(gamma * points, 2.0)
        np.testing.assert_allclose(scaled.p, base.p, rtol=0, atol=1e-12)
        np.testing.assert_allclose(scaled.q, base.q, rtol=0, atol=1e-12)


def _laplacian_error(n: int, epsilon: float) -> float:
    points = circle_points(n)
    theta = 2 * np.pi * np.arange(n) / n
    f = np.cos(theta)
    pair = normalize(gaussian_affinity(pairwise_distances(points), epsilon))
    estimate = 4.0 * (f - pair.p @ f) / epsilon ** 2
    return float(np.linalg.norm(estimate - f) / np.linalg.norm(f))


class TestLaplacianConsistency:

    def test_error_decreases_along_schedule(self):
        errors = [_laplacian_error(n, eps) for n, eps in [(500, 0.30), (1000, 0.15), (2000, 0.075)]]
        assert errors[0] > errors[1] > errors[2]
        assert errors[-1] < 0.01

    @pytest.mark.slow
    def test_full_schedule(self):
        errors = [_laplacian_error(n, eps) for n, eps in [(500, 0.30), (2000, 0.15), (8000, 0.075)]]
        assert errors[0] > errors[1] > errors[2]
