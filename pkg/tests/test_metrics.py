"""
Beat matching scores and replicate statistics.
"""
import numpy as np
import pytest

from evaluation.metrics import BeatEvaluation, f1_score, summarize_evaluations, summarize_methods
from utils.errors import InvalidParameter


class TestF1Score:

    def test_perfect_match(self):
        truth = np.arange(1000, 10000, 500)
        result = f1_score(truth, truth, fs=250.0, n_samples=12000)
        assert (result.se, result.ppv, result.f1) == (1.0, 1.0, 1.0)

    def test_no_estimates(self):
        result = f1_score([], np.arange(1000, 10000, 500), fs=250.0, n_samples=12000)
        assert result.tp == 0
        assert result.f1 == 0.0
        assert result.ppv == 0.0

    def test_worked_example(self):
        # 102 matches 100 (8 ms); 250 is 200 ms from 200
        result = f1_score([102, 250], [100, 200], fs=250.0, tol_ms=50.0, guard_s=0.0)
        assert (result.tp, result.fp, result.fn) == (1, 1, 1)
        assert result.se == pytest.approx(0.5)
        assert result.ppv == pytest.approx(0.5)
        assert result.f1 == pytest.approx(0.5)

    def test_each_estimate_matches_once(self):
        result = f1_score([105], [100, 110], fs=1000.0, tol_ms=10.0, guard_s=0.0)
        assert (result.tp, result.fp, result.fn) == (1, 0, 1)

    def test_nearest_estimate_wins(self):
        result = f1_score([95, 101], [100], fs=1000.0, tol_ms=10.0, guard_s=0.0)
        assert (result.tp, result.fp) == (1, 1)

    def test_guard_drops_edge_beats(self):
        result = f1_score([100, 500, 850], [500, 890], fs=100.0, tol_ms=50.0, guard_s=2.0, n_samples=1000)
        assert (result.tp, result.fp, result.fn) == (1, 0, 0)

    def test_counts_bounded(self, rng):
        for _ in range(50):
            est = np.unique(rng.integers(0, 5000, size=rng.integers(0, 40)))
            truth = np.unique(rng.integers(0, 5000, size=rng.integers(1, 40)))
            result = f1_score(est, truth, fs=250.0, guard_s=0.0)
            assert result.tp <= min(est.size, truth.size)
            assert 0.0 <= result.f1 <= 1.0

    def test_bad_sampling_rate(self):
        with pytest.raises(InvalidParameter):
            f1_score([1], [1], fs=0.0)


class TestSummaries:

    def test_from_counts_zero_denominators(self):
        evaluation = BeatEvaluation.from_counts(0, 0, 0)
        assert (evaluation.se, evaluation.ppv, evaluation.f1) == (0.0, 0.0, 0.0)

    def test_summary_text(self):
        text = BeatEvaluation.from_counts(9, 1, 1).summary()
        assert "F1: 90.00%" in text
        assert "True Positives: 9" in text

    def test_statistics(self):
        evaluations = [BeatEvaluation.from_counts(10, 0, 0), BeatEvaluation.from_counts(1, 1, 1)]
        per_replicate, statistics = summarize_evaluations(evaluations, labels=[3, 4])
        assert list(per_replicate.index) == [3, 4]
        assert per_replicate.index.name == "replicate"
        assert statistics.loc["f1", "mean"] == pytest.approx(0.75)
        assert statistics.loc["f1", "std"] == pytest.approx(0.25)
        assert statistics.loc["f1", "median"] == pytest.approx(0.75)
        assert statistics.loc["f1", "iqr"] == pytest.approx(0.25)
        assert list(statistics.index) == ["se", "ppv", "f1"]

    def test_empty(self):
        with pytest.raises(InvalidParameter):
            summarize_evaluations([])

    def test_label_count(self):
        with pytest.raises(InvalidParameter):
            summarize_evaluations([BeatEvaluation.from_counts(1, 0, 0)], labels=[1, 2])


class TestSummarizeMethods:

    def test_one_block_per_method(self):
        perfect = [BeatEvaluation.from_counts(10, 0, 0)] * 2
        half = [BeatEvaluation.from_counts(1, 1, 1)] * 2
        statistics = summarize_methods({"difference": perfect, "common": half}, labels=[0, 1])
        assert list(statistics.index.names) == ["method", "metric"]
        assert statistics.loc[("difference", "f1"), "mean"] == pytest.approx(1.0)
        assert statistics.loc[("common", "f1"), "mean"] == pytest.approx(0.5)
        assert statistics.loc[("common", "f1"), "iqr"] == pytest.approx(0.0)

    def test_empty(self):
        with pytest.raises(InvalidParameter):
            summarize_methods({})
