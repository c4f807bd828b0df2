"""
Full-size checks on the default experiments (run with `pytest -m slow`).
"""
import numpy as np
import pytest

from config.experiment import FecgConfig, ShapesConfig
from data.generators import generate_signal_pair
from ecg.pipeline import run_pipeline
from experiments.shapes import run_shapes

pytestmark = pytest.mark.slow


def test_sphere_bump_localization(tmp_path):
    summary = run_shapes(ShapesConfig(out=str(tmp_path)))
    assert summary["difference_status"] == "ok"
    assert min(summary["mask_energy_fraction"][:4]) >= 0.9
    assert abs(summary["point_biserial_first"]) >= 0.8
    assert summary["alternating_norm_ratio"] is not None


@pytest.fixture(scope="module")
def fecg_results():
    config = FecgConfig()
    return [run_pipeline(generate_signal_pair(morphology_seed=seed), config) for seed in range(10)]


def test_fetal_beats_f1(fecg_results):
    f1 = np.array([result.evaluation.f1 for result in fecg_results])
    assert f1.mean() >= 0.9


def test_maternal_curve_removed(fecg_results):
    for result in fecg_results:
        assert result.diagnostics["maternal_residual_ratio"] <= 0.01


def test_difference_favours_fetal_rate(fecg_results):
    for result in fecg_results:
        assert result.diagnostics["difference_fetal_to_maternal"] >= 5.0


def test_common_favours_maternal_rate(fecg_results):
    for result in fecg_results:
        assert result.diagnostics["common_maternal_to_fetal"] > 1.0


def test_rates_tracked(fecg_results):
    for result in fecg_results:
        assert result.diagnostics["maternal_hz_median"] == pytest.approx(1.0, abs=0.1)
        assert result.diagnostics["fetal_hz_median"] == pytest.approx(2.4, abs=0.15)
