"""
Synthetic inputs: sphere/bump shape pairs, planted-difference kernel pairs,
two-channel quasi-periodic ECG-like mixtures and lag-map embeddings.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from data.io import PathLike, read_beats_json, read_json, read_signal_csv, write_json, write_matrix_csv, write_signal_csv
from operators.kernels import AffinityMatrix, PairedDataset, gaussian_affinity, median_bandwidth, pairwise_distances
from utils.errors import InvalidParameter

logger = logging.getLogger(__name__)

# (offset s, width s, amplitude) for the P, QRS and T components
MATERNAL_TEMPLATE = ((-0.20, 0.025, 0.12), (0.0, 0.012, 1.0), (0.28, 0.045, 0.30))
FETAL_TEMPLATE_A = ((-0.09, 0.012, 0.10), (0.0, 0.008, 1.0), (0.14, 0.022, 0.25))
FETAL_TEMPLATE_B = ((-0.08, 0.014, -0.05), (0.006, 0.011, -0.80), (0.15, 0.028, 0.35))

MORPHOLOGY_JITTER = 0.05
HR_MODULATION = 0.02
HR_MODULATION_PERIOD_S = 20.0


@dataclass(frozen=True)
class ShapePair:
    """Unit-sphere samples, their scaled and bumped image, and the bump mask."""

    data: PairedDataset
    bump_mask: np.ndarray
    scale: float
    params: Dict = field(default_factory=dict)

    @property
    def view1(self) -> np.ndarray:
        return self.data.view1

    @property
    def view2(self) -> np.ndarray:
        return self.data.view2


@dataclass(frozen=True)
class SignalPair:
    """Two mixed channels, ground-truth beats and the noise-free sources."""

    s1: np.ndarray
    s2: np.ndarray
    fs: float
    maternal_beats: np.ndarray
    fetal_beats: np.ndarray
    sources: Dict[str, np.ndarray] = field(default_factory=dict)
    noise: Tuple[np.ndarray, np.ndarray] = None
    params: Dict = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return self.s1.size

    @property
    def duration_s(self) -> float:
        return self.s1.size / self.fs


@dataclass(frozen=True)
class LagEmbedding:
    """Delay windows of a scalar signal, one window per row."""

    rows: np.ndarray
    window: int
    hop: int
    origin_index: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]


# ==================== Shapes ====================

def generate_sphere_pair(
    n: int = 2000,
    alpha: float = 1.5,
    bump_center: Sequence[float] = (0.0, 0.0, 1.0),
    bump_radius: float = 1.5,
    bump_height: float = 0.5,
    seed: int = 7,
) -> ShapePair:
    """
    Sample the unit sphere and build its scaled, bumped counterpart.

    view2_i = alpha * x_i * (1 + bump_height * g(theta_i)), with
    g(theta) = cos^2(pi * theta / (2 * bump_radius)) inside the cap and 0 outside.
    """
    if n < 50:
        raise InvalidParameter(f"n must be at least 50, got {n}")
    if not 0 < bump_radius < np.pi / 2:
        raise InvalidParameter(f"bump_radius must lie in (0, pi/2), got {bump_radius}")
    if alpha <= 0:
        raise InvalidParameter(f"alpha must be positive, got {alpha}")
    if bump_height <= -1:
        raise InvalidParameter(f"bump_height must exceed -1, got {bump_height}")

    center = np.asarray(bump_center, dtype=float)
    if center.shape != (3,) or not np.linalg.norm(center) > 0:
        raise InvalidParameter("bump_center must be a nonzero 3-vector")
    center = center / np.linalg.norm(center)

    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)

    theta = np.arccos(np.clip(x @ center, -1.0, 1.0))
    mask = theta < bump_radius
    profile = np.where(mask, np.cos(np.pi * theta / (2 * bump_radius)) ** 2, 0.0)

    y = alpha * x * (1.0 + bump_height * profile)[:, None]

    logger.info("sphere pair: n=%d, %d points in bump", n, int(mask.sum()))
    return ShapePair(
        data=PairedDataset(view1=x, view2=y),
        bump_mask=mask,
        scale=float(alpha),
        params={
            "n": n,
            "alpha": alpha,
            "bump_center": center.tolist(),
            "bump_radius": bump_radius,
            "bump_height": bump_height,
            "seed": seed,
        },
    )


def export_shape_pair(pair: ShapePair, output_dir: PathLike, prefix: str = "") -> Dict[str, Path]:
    """Write both point lists as CSV and the bump mask as JSON."""
    output_path = Path(output_dir)
    return {
        "view1": write_matrix_csv(output_path / f"{prefix}view1.csv", pair.view1),
        "view2": write_matrix_csv(output_path / f"{prefix}view2.csv", pair.view2),
        "mask": write_json(
            output_path / f"{prefix}shape_pair.json",
            {
                "bump_indices": np.flatnonzero(pair.bump_mask).tolist(),
                "n": int(pair.bump_mask.size),
                "params": pair.params,
            },
        ),
    }


# ==================== Planted differences ====================

def generate_planted_pair(
    n: int,
    diff_indices: Sequence[int],
    magnitude: float = 0.5,
    seed: int = 0,
) -> Tuple[AffinityMatrix, AffinityMatrix]:
    """
    Affinity pair with W2 proportional to W1 + B^T B, B nonzero only on the
    columns in `diff_indices`.

    W1 comes from a seeded uniform cloud in the unit cube.  B has entries in
    [magnitude/2, magnitude], so even a single planted index changes its own
    self-affinity.  W1 + B^T B is divided by its largest entry to stay in
    [0, 1]; a global scale leaves D^-1 W unchanged, so P2 is exactly the one
    built from W1 + B^T B.
    """
    diff = np.unique(np.asarray(list(diff_indices), dtype=int))
    if n < 2:
        raise InvalidParameter(f"n must be at least 2, got {n}")
    if diff.size != len(diff_indices):
        raise InvalidParameter("diff_indices must be distinct")
    if diff.size and (diff.min() < 0 or diff.max() >= n):
        raise InvalidParameter(f"diff_indices must lie in [0, {n})")
    if 2 * diff.size > n:
        raise InvalidParameter(f"|diff_indices| = {diff.size} exceeds n/2 = {n / 2}")
    if magnitude < 0:
        raise InvalidParameter(f"magnitude must be nonnegative, got {magnitude}")

    rng = np.random.default_rng(seed)
    points = rng.uniform(size=(n, 3))
    d = pairwise_distances(points)
    epsilon = median_bandwidth(d, 1.0)
    w1 = gaussian_affinity(d, epsilon)

    m = diff.size
    b = np.zeros((max(m, 1), n))
    if m:
        b[:, diff] = magnitude * rng.uniform(0.5, 1.0, size=(m, m))
    bump = b.T @ b
    bump = 0.5 * (bump + bump.T)

    w2 = w1.w + bump
    w2 = np.minimum(w2 / w2.max(), 1.0)
    return w1, AffinityMatrix(w=w2, epsilon=epsilon)


# ==================== Signals ====================

def _beat_indices(n_samples: int, fs: float, hr: float, rng: np.random.Generator) -> np.ndarray:
    """Beats at integer crossings of a slowly modulated cycle count."""
    t = np.arange(n_samples) / fs
    start = rng.uniform(0.0, 1.0)
    modulation_phase = rng.uniform(0.0, 2 * np.pi)
    rate = hr * (1.0 + HR_MODULATION * np.sin(2 * np.pi * t / HR_MODULATION_PERIOD_S + modulation_phase))
    cycles = start + np.concatenate([[0.0], np.cumsum(rate[:-1])]) / fs
    return np.flatnonzero(np.diff(np.floor(cycles)) > 0) + 1


def _highest_template_hz(templates) -> float:
    # Gaussian spectra fall by e^-4.5 at three spectral widths
    narrowest = min(width for template in templates for _, width, _ in template)
    return 3.0 / (2 * np.pi * narrowest)


def synthesize_train(
    beats: np.ndarray,
    template,
    n_samples: int,
    fs: float,
    rng: np.random.Generator,
    amplitude: float = 1.0,
) -> np.ndarray:
    """Sum of jittered Gaussian components placed at every beat."""
    t = np.arange(n_samples) / fs
    train = np.zeros(n_samples)
    for beat in beats:
        beat_time = beat / fs
        for offset, width, component_amp in template:
            w = width * (1.0 + MORPHOLOGY_JITTER * rng.standard_normal())
            amp = amplitude * component_amp * (1.0 + MORPHOLOGY_JITTER * rng.standard_normal())
            center = beat_time + offset
            lo = max(0, int(np.floor((center - 6 * w) * fs)))
            hi = min(n_samples, int(np.ceil((center + 6 * w) * fs)) + 1)
            if lo >= hi:
                continue
            train[lo:hi] += amp * np.exp(-0.5 * ((t[lo:hi] - center) / w) ** 2)
    return train


def generate_signal_pair(
    duration_s: float = 60.0,
    fs: float = 250.0,
    maternal_hr: float = 1.0,
    fetal_hr: float = 2.4,
    morphology_seed: int = 0,
    noise_std: float = 0.015,
    fetal_amplitude: float = 0.3,
) -> SignalPair:
    """
    Two-channel maternal/fetal mixture.

    s1 = 2*z1 - z2 + n1 and s2 = z1 - 0.5*z3 + n2, where z1 is the maternal
    train and z2, z3 are fetal trains with different morphology sharing the
    same beat times.
    """
    if duration_s < 10:
        raise InvalidParameter(f"duration_s must be at least 10, got {duration_s}")
    if maternal_hr <= 0 or fetal_hr <= 0:
        raise InvalidParameter("heart rates must be positive")
    if noise_std < 0 or fetal_amplitude < 0:
        raise InvalidParameter("noise_std and fetal_amplitude must be nonnegative")

    highest = _highest_template_hz((MATERNAL_TEMPLATE, FETAL_TEMPLATE_A, FETAL_TEMPLATE_B))
    if fs < 4 * highest:
        raise InvalidParameter(f"fs = {fs} Hz is below 4x the highest template harmonic ({highest:.1f} Hz)")

    n_samples = int(round(duration_s * fs))
    rng = np.random.default_rng(morphology_seed)

    maternal_beats = _beat_indices(n_samples, fs, maternal_hr, rng)
    fetal_beats = _beat_indices(n_samples, fs, fetal_hr, rng)

    z1 = synthesize_train(maternal_beats, MATERNAL_TEMPLATE, n_samples, fs, rng)
    z2 = synthesize_train(fetal_beats, FETAL_TEMPLATE_A, n_samples, fs, rng, amplitude=fetal_amplitude)
    z3 = synthesize_train(fetal_beats, FETAL_TEMPLATE_B, n_samples, fs, rng, amplitude=fetal_amplitude)

    n1 = noise_std * rng.standard_normal(n_samples)
    n2 = noise_std * rng.standard_normal(n_samples)

    s1 = (2.0 * z1 - z2) + n1
    s2 = (z1 - 0.5 * z3) + n2

    logger.info(
        "signal pair: %.1f s at %g Hz, %d maternal / %d fetal beats",
        duration_s, fs, maternal_beats.size, fetal_beats.size,
    )
    return SignalPair(
        s1=s1,
        s2=s2,
        fs=float(fs),
        maternal_beats=maternal_beats,
        fetal_beats=fetal_beats,
        sources={"maternal": z1, "fetal_a": z2, "fetal_b": z3},
        noise=(n1, n2),
        params={
            "duration_s": duration_s,
            "fs": fs,
            "maternal_hr": maternal_hr,
            "fetal_hr": fetal_hr,
            "morphology_seed": morphology_seed,
            "noise_std": noise_std,
            "fetal_amplitude": fetal_amplitude,
        },
    )


def export_signal_pair(pair: SignalPair, output_dir: PathLike, prefix: str = "") -> Dict[str, Path]:
    """Write the channels as two-column CSV and the ground truth as JSON."""
    output_path = Path(output_dir)
    return {
        "signals": write_signal_csv(output_path / f"{prefix}signals.csv", pair.s1, pair.s2),
        "truth": write_json(
            output_path / f"{prefix}truth.json",
            {
                "fs": pair.fs,
                "maternal_beats": pair.maternal_beats.tolist(),
                "fetal_beats": pair.fetal_beats.tolist(),
                "params": pair.params,
            },
        ),
    }


def read_signal_pair(signal_path: PathLike, fs: float, truth_path: PathLike = None) -> SignalPair:
    """Load a two-column CSV (and optional truth JSON) as a SignalPair."""
    channels = read_signal_csv(signal_path)
    fetal = np.empty(0, dtype=int)
    maternal = np.empty(0, dtype=int)
    if truth_path:
        fetal = read_beats_json(truth_path)
        payload = read_json(truth_path)
        if isinstance(payload, dict) and "maternal_beats" in payload:
            maternal = np.asarray(payload["maternal_beats"], dtype=int)
    return SignalPair(s1=channels[0], s2=channels[1], fs=float(fs), maternal_beats=maternal, fetal_beats=fetal)


# ==================== Lag maps ====================

def lag_embed(signal, window: int, hop: int = 1) -> LagEmbedding:
    """
    Delay windows signal[r*hop : r*hop + window], one per row.
    """
    signal = np.asarray(signal, dtype=float)
    if signal.ndim != 1:
        raise InvalidParameter(f"signal must be 1-D, got shape {signal.shape}")
    if window < 1:
        raise InvalidParameter(f"window must be at least 1, got {window}")
    if not 1 <= hop <= window:
        raise InvalidParameter(f"hop must lie in [1, window], got {hop}")
    if signal.size < window:
        raise InvalidParameter(f"signal length {signal.size} is shorter than window {window}")

    rows = sliding_window_view(signal, window)[::hop].copy()
    origin = np.arange(rows.shape[0]) * hop
    return LagEmbedding(rows=rows, window=int(window), hop=int(hop), origin_index=origin)
