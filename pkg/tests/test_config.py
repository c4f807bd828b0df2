"""
Experiment configuration files, validation and overrides.
"""
import pytest

from config.experiment import (
    EmbedConfig,
    FecgConfig,
    PlantedConfig,
    ShapesConfig,
    apply_overrides,
    default_config,
    emit_config,
    load_config,
    parse_config_file,
)
from config.settings import settings
from utils.errors import ConfigError


def _write(tmp_path, text):
    path = tmp_path / "run.env"
    path.write_text(text)
    return path


class TestParse:

    def test_values_and_types(self, tmp_path):
        path = _write(tmp_path, "# shapes\nN=200\nALPHA=2\nbump_height = 0.0\nOPERATOR=tilde\n")
        config = parse_config_file(path, ShapesConfig)
        assert config.n == 200
        assert config.alpha == 2.0
        assert isinstance(config.alpha, float)
        assert config.bump_height == 0.0
        assert config.operator == "tilde"
        assert config.seed == 7

    def test_booleans(self, tmp_path):
        assert parse_config_file(_write(tmp_path, "DESHAPE=false\n"), FecgConfig).deshape is False
        assert parse_config_file(_write(tmp_path, "DESHAPE=Yes\n"), FecgConfig).deshape is True

    def test_unknown_key_names_line(self, tmp_path):
        path = _write(tmp_path, "N=40\n\nBOGUS=1\n")
        with pytest.raises(ConfigError) as excinfo:
            parse_config_file(path, PlantedConfig)
        assert excinfo.value.line == 3
        assert excinfo.value.field == "bogus"

    def test_malformed_line(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            parse_config_file(_write(tmp_path, "N=40\nthis is not a pair\n"), PlantedConfig)
        assert excinfo.value.line == 2

    def test_duplicate_key(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            parse_config_file(_write(tmp_path, "N=40\nn=50\n"), PlantedConfig)
        assert excinfo.value.line == 2

    def test_bad_number(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            parse_config_file(_write(tmp_path, "M=two\n"), PlantedConfig)
        assert excinfo.value.field == "m"
        assert excinfo.value.line == 1

    @pytest.mark.parametrize("line", ["N=1", "MAGNITUDE=-0.5", "SUPPORT_THRESHOLD=0"])
    def test_out_of_range(self, tmp_path, line):
        with pytest.raises(ConfigError):
            parse_config_file(_write(tmp_path, line + "\n"), PlantedConfig)

    def test_operator_choices(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            parse_config_file(_write(tmp_path, "OPERATOR=fancy\n"), PlantedConfig)
        assert excinfo.value.field == "operator"

    def test_method_choices(self, tmp_path):
        assert parse_config_file(_write(tmp_path, "METHOD=single_lead\nBASELINES=on\n"), FecgConfig).baselines is True
        with pytest.raises(ConfigError) as excinfo:
            parse_config_file(_write(tmp_path, "METHOD=pca\n"), FecgConfig)
        assert excinfo.value.field == "method"

    def test_cross_field_rule_names_line(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            parse_config_file(_write(tmp_path, "FS=250\nDETREND_WINDOW=100\n"), FecgConfig)
        assert excinfo.value.field == "detrend_window"
        assert excinfo.value.line == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config_file(tmp_path / "absent.env", PlantedConfig)


class TestEmit:

    @pytest.mark.parametrize("config", [ShapesConfig(), PlantedConfig(m=3), FecgConfig(deshape=False, window_s=2.5)])
    def test_round_trip(self, tmp_path, config):
        path = tmp_path / "config.env"
        path.write_text(emit_config(config))
        assert parse_config_file(path, type(config)) == config

    def test_format(self):
        text = emit_config(EmbedConfig(view1_path="a.csv", view2_path="b.csv"))
        assert "VIEW1_PATH='a.csv'" in text
        assert "EMBEDDING_DIM=4" in text
        assert "OUT=''" in text

    def test_boolean_spelling(self):
        assert "DESHAPE=true" in emit_config(FecgConfig())


class TestLoadAndOverride:

    def test_defaults_follow_settings(self):
        config = load_config("fecg")
        assert config.a_divisor == settings.ECG_A_BANDWIDTH_DIVISOR
        assert config.s_divisor == settings.ECG_S_BANDWIDTH_DIVISOR
        assert config.method == settings.DEFAULT_ECG_METHOD == "difference"
        assert config.baselines is False
        assert config.maternal_range == settings.MATERNAL_RANGE_HZ
        assert config.output_dir().name == "fecg"

    def test_unknown_command(self):
        with pytest.raises(ConfigError):
            default_config("train")

    def test_embed_requires_paths(self):
        with pytest.raises(ConfigError) as excinfo:
            load_config("embed")
        assert excinfo.value.field == "view1_path"

    def test_overrides_skip_none(self):
        config = apply_overrides(PlantedConfig(), seed=5, operator=None, out="x")
        assert config.seed == 5
        assert config.operator == settings.DEFAULT_OPERATOR_VARIANT
        assert str(config.output_dir()) == "x"

    def test_overrides_validated(self):
        with pytest.raises(ConfigError):
            apply_overrides(PlantedConfig(), operator="fancy")

    def test_unknown_override(self):
        with pytest.raises(ConfigError):
            apply_overrides(PlantedConfig(), alpha=2.0)

    def test_odd_embedding_dimension(self):
        with pytest.raises(ConfigError):
            apply_overrides(ShapesConfig(), embedding_dim=3)
