"""
Per-subcommand experiment configuration.

Config files hold KEY=VALUE lines (python-dotenv syntax, '#' comments).
Keys are the dataclass field names, matched case-insensitively.
"""
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type

from dotenv import dotenv_values

from config.settings import settings
from data.io import PathLike
from utils.errors import ConfigError

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _param(default, low=None, high=None, strict: bool = False, choices=None):
    """Field with an allowed range (inclusive unless strict) or a set of choices."""
    metadata = {"range": (low, high), "strict": strict}
    if choices is not None:
        metadata["choices"] = tuple(choices)
    return field(default=default, metadata=metadata)


@dataclass
class BaseConfig:
    """Fields shared by every subcommand."""

    seed: int = _param(0, low=0)
    operator: str = _param(settings.DEFAULT_OPERATOR_VARIANT, choices=settings.OPERATOR_VARIANTS)
    out: str = ""

    command = ""

    def output_dir(self) -> Path:
        return Path(self.out) if self.out else Path(settings.RESULTS_DIR) / self.command

    def cross_checks(self) -> List[Tuple[str, str]]:
        """(field, problem) pairs that involve more than one field."""
        return []

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ShapesConfig(BaseConfig):
    seed: int = _param(7, low=0)
    n: int = _param(2000, low=50, high=settings.KERNEL_MAX_SAMPLES)
    alpha: float = _param(1.5, low=0.0, strict=True)
    bump_center_x: float = 0.0
    bump_center_y: float = 0.0
    bump_center_z: float = 1.0
    bump_radius: float = _param(1.5, low=0.0, high=math.pi / 2, strict=True)
    bump_height: float = _param(0.5, low=-1.0, strict=True)
    embedding_dim: int = _param(4, low=1)
    s_divisor: float = _param(settings.S_BANDWIDTH_DIVISOR, low=0.0, strict=True)
    a_divisor: float = _param(settings.A_BANDWIDTH_DIVISOR, low=0.0, strict=True)
    degenerate_tol: float = _param(1e-10, low=0.0, strict=True)

    command = "shapes"

    def cross_checks(self) -> List[Tuple[str, str]]:
        problems = []
        if self.embedding_dim > self.n:
            problems.append(("embedding_dim", f"must not exceed n = {self.n}"))
        if self.embedding_dim % 2:
            problems.append(("embedding_dim", "must be even (conjugate pairs)"))
        if self.bump_center_x == self.bump_center_y == self.bump_center_z == 0.0:
            problems.append(("bump_center_z", "bump center must be a nonzero vector"))
        return problems

    @property
    def bump_center(self) -> Tuple[float, float, float]:
        return (self.bump_center_x, self.bump_center_y, self.bump_center_z)


@dataclass
class PlantedConfig(BaseConfig):
    n: int = _param(30, low=2, high=settings.KERNEL_MAX_SAMPLES)
    m: int = _param(2, low=0)
    magnitude: float = _param(0.5, low=0.0)
    support_threshold: float = _param(1e-10, low=0.0, strict=True)

    command = "planted"


@dataclass
class FecgConfig(BaseConfig):
    duration_s: float = _param(60.0, low=10.0)
    fs: float = _param(250.0, low=0.0, strict=True)
    maternal_hr: float = _param(1.0, low=0.0, strict=True)
    fetal_hr: float = _param(2.4, low=0.0, strict=True)
    noise_std: float = _param(0.015, low=0.0)
    fetal_amplitude: float = _param(0.3, low=0.0)
    replicates: int = _param(1, low=1)

    signal_path: str = ""
    truth_path: str = ""

    lowpass_hz: float = _param(settings.ECG_LOWPASS_HZ, low=0.0, strict=True)
    detrend_window: int = _param(settings.ECG_DETREND_WINDOW, low=1)
    lag_window: int = _param(settings.ECG_LAG_WINDOW, low=1)
    lag_hop: int = _param(settings.ECG_LAG_HOP, low=1)
    s_divisor: float = _param(settings.ECG_S_BANDWIDTH_DIVISOR, low=0.0, strict=True)
    a_divisor: float = _param(settings.ECG_A_BANDWIDTH_DIVISOR, low=0.0, strict=True)
    eigen_pairs: int = _param(settings.ECG_EIGEN_PAIRS, low=1)
    method: str = _param(settings.DEFAULT_ECG_METHOD, choices=settings.ECG_METHODS)
    # also score the other methods on every replicate
    baselines: bool = False

    window_s: float = _param(settings.STFT_WINDOW_S, low=0.0, strict=True)
    hop_s: float = _param(settings.STFT_HOP_S, low=0.0, strict=True)
    freq_step_hz: float = _param(settings.STFT_FREQ_STEP_HZ, low=0.0, strict=True)
    deshape: bool = True

    maternal_min_hz: float = _param(settings.MATERNAL_RANGE_HZ[0], low=0.0)
    maternal_max_hz: float = _param(settings.MATERNAL_RANGE_HZ[1], low=0.0, strict=True)
    fetal_min_hz: float = _param(settings.FETAL_RANGE_HZ[0], low=0.0)
    fetal_max_hz: float = _param(settings.FETAL_RANGE_HZ[1], low=0.0, strict=True)
    halfband_hz: float = _param(settings.MATERNAL_HALFBAND_HZ, low=0.0, strict=True)
    jump_penalty: float = _param(settings.RIDGE_JUMP_PENALTY, low=0.0)
    snap_ms: float = _param(settings.BEAT_SNAP_MS, low=0.0)

    tol_ms: float = _param(settings.F1_TOLERANCE_MS, low=0.0)
    guard_s: float = _param(settings.F1_GUARD_S, low=0.0)

    command = "fecg"

    def cross_checks(self) -> List[Tuple[str, str]]:
        problems = []
        if self.detrend_window % 2 == 0:
            problems.append(("detrend_window", "must be odd"))
        if self.lag_hop > self.lag_window:
            problems.append(("lag_hop", "must not exceed lag_window"))
        if self.fs <= 2 * self.lowpass_hz:
            problems.append(("lowpass_hz", f"must be below fs/2 = {self.fs / 2}"))
        if self.maternal_min_hz >= self.maternal_max_hz:
            problems.append(("maternal_max_hz", "must exceed maternal_min_hz"))
        if self.fetal_min_hz >= self.fetal_max_hz:
            problems.append(("fetal_max_hz", "must exceed fetal_min_hz"))
        if self.truth_path and not self.signal_path:
            problems.append(("truth_path", "only applies together with signal_path"))
        return problems

    @property
    def maternal_range(self) -> Tuple[float, float]:
        return (self.maternal_min_hz, self.maternal_max_hz)

    @property
    def fetal_range(self) -> Tuple[float, float]:
        return (self.fetal_min_hz, self.fetal_max_hz)


@dataclass
class EmbedConfig(BaseConfig):
    view1_path: str = ""
    view2_path: str = ""
    embedding_dim: int = _param(4, low=1)
    s_divisor: float = _param(settings.S_BANDWIDTH_DIVISOR, low=0.0, strict=True)
    a_divisor: float = _param(settings.A_BANDWIDTH_DIVISOR, low=0.0, strict=True)

    command = "embed"

    def cross_checks(self) -> List[Tuple[str, str]]:
        problems = []
        for name in ("view1_path", "view2_path"):
            if not getattr(self, name):
                problems.append((name, "is required"))
        if self.embedding_dim % 2:
            problems.append(("embedding_dim", "must be even (conjugate pairs)"))
        return problems


CONFIG_CLASSES: Dict[str, Type[BaseConfig]] = {
    cls.command: cls for cls in (ShapesConfig, PlantedConfig, FecgConfig, EmbedConfig)
}


# ==================== Parsing ====================

def _convert(raw: Optional[str], kind: type, name: str, line: Optional[int]) -> Any:
    if raw is None:
        raise ConfigError("missing value", line=line, field=name)
    text = raw.strip()
    try:
        if kind is bool:
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError(f"expected a boolean, got {raw!r}")
        if kind is int:
            return int(text)
        if kind is float:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError("must be finite")
            return value
    except ValueError as e:
        raise ConfigError(f"bad value {raw!r}: {e}", line=line, field=name) from e
    return raw


def _scan_lines(path: Path) -> Dict[str, int]:
    """Map lowercased keys to their line numbers; reject lines without '='."""
    key_lines: Dict[str, int] = {}
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("export "):
            stripped = stripped[len("export "):].lstrip()
        if "=" not in stripped:
            raise ConfigError(f"expected KEY=VALUE, got {stripped!r}", line=number)
        key = stripped.split("=", 1)[0].strip().lower()
        if not key:
            raise ConfigError("empty key", line=number)
        if key in key_lines:
            raise ConfigError(f"duplicate key (first on line {key_lines[key]})", line=number, field=key)
        key_lines[key] = number
    return key_lines


def parse_config_file(path: PathLike, config_cls: Type[BaseConfig]) -> BaseConfig:
    """
    Read a KEY=VALUE file into `config_cls`.

    Raises:
        ConfigError: naming the line and field of the first problem
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")

    key_lines = _scan_lines(path)
    known = {f.name: f for f in fields(config_cls)}

    values: Dict[str, Any] = {}
    for key, raw in dotenv_values(path).items():
        name = key.strip().lower()
        line = key_lines.get(name)
        if name not in known:
            raise ConfigError(f"unknown key for '{config_cls.command}'", line=line, field=name)
        values[name] = _convert(raw, known[name].type, name, line)

    config = config_cls(**values)
    validate_config(config, key_lines)
    return config


def validate_config(config: BaseConfig, key_lines: Dict[str, int] = None) -> BaseConfig:
    """Check declared ranges, choices and cross-field rules."""
    key_lines = key_lines or {}

    for f in fields(config):
        value = getattr(config, f.name)
        line = key_lines.get(f.name)
        choices = f.metadata.get("choices")
        if choices is not None and value not in choices:
            raise ConfigError(f"{value!r} is not one of {list(choices)}", line=line, field=f.name)

        low, high = f.metadata.get("range", (None, None))
        strict = f.metadata.get("strict", False)
        if low is not None and (value <= low if strict else value < low):
            raise ConfigError(f"{value!r} must be {'>' if strict else '>='} {low}", line=line, field=f.name)
        if high is not None and (value >= high if strict else value > high):
            raise ConfigError(f"{value!r} must be {'<' if strict else '<='} {high}", line=line, field=f.name)

    for name, problem in config.cross_checks():
        raise ConfigError(problem, line=key_lines.get(name), field=name)

    return config


def default_config(command: str) -> BaseConfig:
    if command not in CONFIG_CLASSES:
        raise ConfigError(f"unknown command '{command}'; available: {sorted(CONFIG_CLASSES)}")
    return CONFIG_CLASSES[command]()


def load_config(command: str, path: PathLike = None) -> BaseConfig:
    """Defaults for `command`, replaced by the file at `path` when given."""
    config = default_config(command)
    if path is None:
        return validate_config(config)
    return parse_config_file(path, type(config))


def apply_overrides(config: BaseConfig, **overrides) -> BaseConfig:
    """Replace fields with the non-None overrides (command-line flags)."""
    known = {f.name for f in fields(config)}
    changes = {}
    for name, value in overrides.items():
        if value is None:
            continue
        if name not in known:
            raise ConfigError("unknown override", field=name)
        changes[name] = value
    return validate_config(replace(config, **changes))


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    text = str(value)
    if "'" in text:
        raise ConfigError("string values may not contain single quotes", field=None)
    return f"'{text}'"


def emit_config(config: BaseConfig) -> str:
    """KEY=VALUE text that parses back to an equal config."""
    lines = [f"# {config.command} configuration"]
    for f in fields(config):
        lines.append(f"{f.name.upper()}={_format_value(getattr(config, f.name))}")
    return "\n".join(lines) + "\n"
