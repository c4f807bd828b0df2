"""
End-to-end runs of the command-line subcommands.
"""
import json

import numpy as np
import pandas as pd
import pytest

from data.generators import generate_signal_pair
from data.io import read_json, write_matrix_csv, write_signal_csv
from evaluation.report import CONFIG_NAME, MANIFEST_NAME, RunManifest
from experiments.embeddings import DEGENERATE_STATUS
from experiments.fecg import FECG_REPLICATE_OUTPUTS
from experiments.planted import PLANTED_OUTPUTS
from experiments.shapes import SHAPES_OUTPUTS
from main import main


def _config(tmp_path, text, name="run.env"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _manifest(out) -> RunManifest:
    return RunManifest.from_dict(read_json(out / MANIFEST_NAME))


class TestShapesCommand:

    def test_outputs_and_manifest(self, tmp_path):
        out = tmp_path / "shapes"
        code = main(["shapes", "--config", _config(tmp_path, "N=200\n"), "--out", str(out)])
        assert code == 0
        assert set(SHAPES_OUTPUTS) <= {p.name for p in out.iterdir()}
        manifest = _manifest(out)
        assert set(manifest.files) == set(SHAPES_OUTPUTS)
        assert manifest.verify(out) == []
        assert manifest.config["n"] == 200
        assert read_json(out / "embedding_difference.json")["alternating_norm_ratio"] > 0
        # column 1 of S is the Perron vector
        assert read_json(out / "embedding_common.json")["point_biserial_column"] == 2

    def test_repeat_runs_are_identical(self, tmp_path):
        config = _config(tmp_path, "N=200\n")
        main(["shapes", "--config", config, "--out", str(tmp_path / "a"), "--seed", "3"])
        main(["shapes", "--config", config, "--out", str(tmp_path / "b"), "--seed", "3"])
        assert _manifest(tmp_path / "a").files == _manifest(tmp_path / "b").files

    def test_flat_bump_is_degenerate(self, tmp_path):
        out = tmp_path / "flat"
        code = main(["shapes", "--config", _config(tmp_path, "N=200\nBUMP_HEIGHT=0.0\n"), "--out", str(out)])
        assert code == 0
        assert read_json(out / "embedding_difference.json")["status"] == DEGENERATE_STATUS
        assert (out / "embedding_difference.csv").read_text().startswith("#")

    @pytest.mark.parametrize("variant", ["tilde", "hat"])
    def test_operator_flag(self, tmp_path, variant):
        out = tmp_path / variant
        code = main(["shapes", "--config", _config(tmp_path, "N=100\n"), "--out", str(out), "--operator", variant])
        assert code == 0
        assert _manifest(out).config["operator"] == variant

    def test_emit_config(self, tmp_path):
        out = tmp_path / "emit"
        main(["shapes", "--config", _config(tmp_path, "N=100\n"), "--out", str(out), "--emit-config"])
        text = (out / CONFIG_NAME).read_text()
        assert "N=100" in text
        manifest = _manifest(out)
        assert CONFIG_NAME in manifest.files
        assert manifest.verify(out) == []
        code = main(["shapes", "--config", str(out / "config.env"), "--out", str(tmp_path / "again")])
        assert code == 0

    def test_bad_config_exit_code(self, tmp_path, capsys):
        code = main(["shapes", "--config", _config(tmp_path, "N=200\nCOLOR=red\n"), "--out", str(tmp_path / "x")])
        assert code == 2
        assert "line 2" in capsys.readouterr().err


class TestPlantedCommand:

    def test_default_run_passes(self, tmp_path):
        out = tmp_path / "planted"
        assert main(["planted", "--out", str(out)]) == 0
        payload = read_json(out / "planted.json")
        assert payload["result"] == "PASS"
        assert payload["numerical_rank"] <= 2 * payload["m"]
        assert payload["off_block_max"] <= 1e-12
        assert set(PLANTED_OUTPUTS) <= set(_manifest(out).files)

    def test_no_planted_differences(self, tmp_path):
        out = tmp_path / "zero"
        assert main(["planted", "--config", _config(tmp_path, "M=0\n"), "--out", str(out)]) == 0
        payload = read_json(out / "planted.json")
        assert payload["numerical_rank"] == 0
        assert payload["result"] == "PASS"

    def test_half_of_n_accepted(self, tmp_path):
        config = _config(tmp_path, "N=20\nM=10\n")
        assert main(["planted", "--config", config, "--out", str(tmp_path / "half")]) == 0

    def test_more_than_half_rejected(self, tmp_path):
        config = _config(tmp_path, "N=20\nM=11\n")
        assert main(["planted", "--config", config, "--out", str(tmp_path / "over")]) == 2


class TestEmbedCommand:

    def test_embeds_csv_views(self, tmp_path, rng):
        view1 = rng.standard_normal((80, 3))
        view2 = view1 + 0.3 * np.sin(3 * view1)
        path1 = write_matrix_csv(tmp_path / "v1.csv", view1)
        path2 = write_matrix_csv(tmp_path / "v2.csv", view2)
        out = tmp_path / "embed"
        config = _config(tmp_path, f"VIEW1_PATH={path1}\nVIEW2_PATH={path2}\nEMBEDDING_DIM=2\n")

        assert main(["embed", "--config", config, "--out", str(out)]) == 0
        common = np.loadtxt(out / "embedding_common.csv", delimiter=",", skiprows=1)
        assert common.shape == (80, 3)
        assert read_json(out / "embedding_difference.json")["status"] == "ok"

    def test_row_mismatch_exit_code(self, tmp_path, rng):
        path1 = write_matrix_csv(tmp_path / "v1.csv", rng.standard_normal((10, 2)))
        path2 = write_matrix_csv(tmp_path / "v2.csv", rng.standard_normal((11, 2)))
        config = _config(tmp_path, f"VIEW1_PATH={path1}\nVIEW2_PATH={path2}\nEMBEDDING_DIM=2\n")
        assert main(["embed", "--config", config, "--out", str(tmp_path / "x")]) == 3

    def test_missing_paths(self, tmp_path):
        assert main(["embed", "--out", str(tmp_path / "x")]) == 2


class TestFecgCommand:

    def test_synthetic_replicate(self, tmp_path):
        out = tmp_path / "fecg"
        config = _config(tmp_path, "DURATION_S=20\n")
        assert main(["fecg", "--config", config, "--out", str(out)]) == 0

        files = set(_manifest(out).files)
        assert set(FECG_REPLICATE_OUTPUTS) <= files
        assert {"signals.csv", "truth.json", "evaluation.csv", "evaluation_summary.csv"} <= files

        beats = read_json(out / "beats.json")
        assert beats["count"] == len(beats["fetal_beats"])
        assert np.all(np.diff(beats["fetal_beats"]) > 0)

        diagnostics = read_json(out / "diagnostics.json")
        assert 0.6 <= diagnostics["maternal_hz_median"] <= 1.8
        assert 1.6 <= diagnostics["fetal_hz_median"] <= 3.6

    def test_external_recording_without_truth(self, tmp_path):
        pair = generate_signal_pair(duration_s=20.0, morphology_seed=4)
        signal = write_signal_csv(tmp_path / "rec.csv", pair.s1, pair.s2)
        out = tmp_path / "external"
        config = _config(tmp_path, f"SIGNAL_PATH={signal}\nFS=250\n")

        assert main(["fecg", "--config", config, "--out", str(out)]) == 0
        names = {p.name for p in out.iterdir()}
        assert "evaluation.csv" not in names
        assert "signals.csv" not in names
        assert "beats.json" in names
        assert any("evaluation skipped" in note for note in _manifest(out).notes)

    def test_malformed_recording(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("0.1,0.2\n0.3\n")
        config = _config(tmp_path, f"SIGNAL_PATH={bad}\n")
        assert main(["fecg", "--config", config, "--out", str(tmp_path / "x")]) == 3

    def test_multiple_replicates_are_prefixed(self, tmp_path):
        out = tmp_path / "reps"
        config = _config(tmp_path, "DURATION_S=12\nREPLICATES=2\nSEED=5\n")
        assert main(["fecg", "--config", config, "--out", str(out)]) == 0
        files = set(_manifest(out).files)
        assert {"rep5_beats.json", "rep6_beats.json"} <= files
        summary = (out / "evaluation.csv").read_text().splitlines()
        assert summary[0].startswith("replicate")
        assert len(summary) == 3

    def test_baselines_scored_on_each_replicate(self, tmp_path):
        out = tmp_path / "methods"
        config = _config(tmp_path, "DURATION_S=12\nMETHOD=single_lead\nBASELINES=true\n")
        assert main(["fecg", "--config", config, "--out", str(out)]) == 0

        assert "evaluation_methods.csv" in set(_manifest(out).files)
        methods = pd.read_csv(out / "evaluation_methods.csv", index_col=["method", "metric"])
        assert set(methods.index.get_level_values("method")) == {"difference", "common", "single_lead"}
        assert list(methods.columns) == ["mean", "std", "median", "iqr"]
        assert methods.shape[0] == 9
        assert read_json(out / "diagnostics.json")["method"] == "single_lead"

        primary = pd.read_csv(out / "evaluation_summary.csv", index_col="metric")
        assert methods.loc[("single_lead", "f1"), "mean"] == pytest.approx(primary.loc["f1", "mean"])

    def test_single_method_writes_no_method_table(self, tmp_path):
        out = tmp_path / "plain"
        assert main(["fecg", "--config", _config(tmp_path, "DURATION_S=12\n"), "--out", str(out)]) == 0
        assert not (out / "evaluation_methods.csv").exists()


def test_manifest_is_json(tmp_path):
    out = tmp_path / "planted"
    main(["planted", "--out", str(out)])
    payload = json.loads((out / MANIFEST_NAME).read_text())
    assert payload["command"] == "planted"
    assert payload["version"]
