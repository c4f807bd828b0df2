"""
Fetal beat extraction from two abdominal channels via the difference operator.

Steps: condition both channels, lag-embed them, build the operators, take
spectrograms of the leading difference eigenvectors, median them, remove
the maternal rate curve, track the fetal rate, and place beats on the
difference-energy envelope.  The same steps run on the common operator or
on diffusion maps of lead 1 alone when `method` asks for a baseline.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.experiment import FecgConfig
from data.generators import LagEmbedding, SignalPair, lag_embed
from ecg.beats import beats_from_curve, difference_energy_envelope
from ecg.preprocessing import preprocess
from ecg.ridge import FrequencyCurve, curve_energy, extract_ridge, remove_curve
from ecg.spectrogram import (
    Spectrogram,
    band_energy,
    eigenvector_spectrograms,
    embedding_spectrograms,
    median_spectrogram,
    stft,
)
from evaluation.metrics import BeatEvaluation, f1_score
from operators.composite import OperatorSet, build_operators
from operators.kernels import diffusion_from_points
from operators.spectral import (
    Embedding,
    antisymmetric_spectrum,
    difference_embedding,
    diffusion_map_embedding,
    nontrivial_common_embedding,
    symmetric_difference_embedding,
    symmetric_eig,
)

logger = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    """Everything one pipeline run produces."""

    median_spectrogram: Spectrogram
    maternal_spectrogram: Spectrogram
    cleaned_spectrogram: Spectrogram
    maternal_curve: FrequencyCurve
    fetal_curve: FrequencyCurve
    beats: np.ndarray
    proxy: np.ndarray
    embedding: Embedding
    evaluation: Optional[BeatEvaluation] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def beats_payload(self, fs: float) -> Dict[str, Any]:
        return {
            "fs": fs,
            "fetal_beats": self.beats.tolist(),
            "count": int(self.beats.size),
        }


def band_series(embedding: Embedding) -> List[np.ndarray]:
    """
    Series whose band energy is reported for an embedding.

    A conjugate pair is only defined up to a rotation of its plane, so each
    pair contributes u^2 + u'^2; symmetric eigenvectors contribute their
    columns as they are.
    """
    parts = [part for _, part in embedding.eigen_labels]
    if parts[:2] != ["real", "imag"]:
        return list(embedding.coords.T)
    coords = embedding.coords
    return [coords[:, k] ** 2 + coords[:, k + 1] ** 2 for k in range(0, embedding.dimension - 1, 2)]


def _energy_ratio(embedding: Embedding, fs_rows: float, numerator_hz: float, denominator_hz: float) -> Optional[float]:
    series = band_series(embedding)
    numerator = sum(band_energy(values, fs_rows, numerator_hz) for values in series)
    denominator = sum(band_energy(values, fs_rows, denominator_hz) for values in series)
    return float(numerator / denominator) if denominator > 0 else None


def _method_embedding(
    config: FecgConfig,
    ops: OperatorSet,
    lag1: LagEmbedding,
    fs_rows: float,
    stft_params: Dict[str, Any],
    progress: bool,
) -> Tuple[Embedding, List[Spectrogram], np.ndarray]:
    """Embedding, its spectrograms and the row matrix behind the beat proxy."""
    m = 2 * config.eigen_pairs

    if config.method == "difference":
        if ops.difference_is_symmetric:
            embedding = symmetric_difference_embedding(symmetric_eig(ops.difference), m)
            specs = embedding_spectrograms(
                embedding, fs_rows, deshape=config.deshape, progress=progress, **stft_params
            )
            return embedding, specs, ops.difference

        spectrum = antisymmetric_spectrum(ops.difference)
        pairs = min(config.eigen_pairs, max(spectrum.num_pairs, 1))
        if pairs < config.eigen_pairs:
            logger.warning("only %d of %d requested pairs available", spectrum.num_pairs, config.eigen_pairs)
        specs = eigenvector_spectrograms(
            ops.difference, pairs, fs_rows, deshape=config.deshape, spectrum=spectrum, progress=progress, **stft_params
        )
        return difference_embedding(spectrum, 2 * pairs), specs, ops.difference

    if config.method == "common":
        embedding = nontrivial_common_embedding(symmetric_eig(ops.symmetric), m)
    else:
        embedding = diffusion_map_embedding(diffusion_from_points(lag1.rows, config.s_divisor), m)

    specs = embedding_spectrograms(embedding, fs_rows, deshape=config.deshape, progress=progress, **stft_params)
    # eigenvalue-weighted coordinates play the role of operator rows
    return embedding, specs, embedding.coords * np.abs(embedding.eigenvalues)


def run_pipeline(pair: SignalPair, config: FecgConfig, progress: bool = False) -> PipelineResult:
    """
    Run fetal beat extraction on one signal pair.

    Args:
        pair: Two channels (ground truth optional)
        config: Pipeline parameters; `method` picks the eigenvectors
        progress: Show a progress bar over eigenvector spectrograms

    Returns:
        PipelineResult; `evaluation` is None when the pair has no fetal truth
    """
    fs = pair.fs
    stft_params = {"window_s": config.window_s, "hop_s": config.hop_s, "freq_step_hz": config.freq_step_hz}

    # Conditioning and lag maps
    x1 = preprocess(pair.s1, fs, config.lowpass_hz, config.detrend_window)
    x2 = preprocess(pair.s2, fs, config.lowpass_hz, config.detrend_window)
    lag1 = lag_embed(x1, config.lag_window, config.lag_hop)
    lag2 = lag_embed(x2, config.lag_window, config.lag_hop)
    fs_rows = fs / config.lag_hop

    ops = build_operators(lag1.rows, lag2.rows, config.operator, config.s_divisor, config.a_divisor)
    embedding, specs, proxy_rows = _method_embedding(config, ops, lag1, fs_rows, stft_params, progress)
    median = median_spectrogram(specs)

    # Maternal rate from the conditioned channels themselves
    maternal_spec = median_spectrogram([
        stft(x1, fs, deshape=config.deshape, **stft_params),
        stft(x2, fs, deshape=config.deshape, **stft_params),
    ])
    maternal_curve = extract_ridge(maternal_spec, config.maternal_range, config.jump_penalty)

    cleaned = remove_curve(median, maternal_curve, config.halfband_hz)
    fetal_curve = extract_ridge(cleaned, config.fetal_range, config.jump_penalty)
    logger.info(
        "[%s] maternal rate ~%.2f Hz, fetal rate ~%.2f Hz",
        config.method, maternal_curve.median_hz, fetal_curve.median_hz,
    )

    proxy = difference_energy_envelope(proxy_rows, lag1.origin_index, lag1.window, pair.n_samples, fs)
    beats = beats_from_curve(fetal_curve, proxy, fs, config.snap_ms)

    evaluation = None
    if pair.fetal_beats.size:
        evaluation = f1_score(beats, pair.fetal_beats, fs, config.tol_ms, config.guard_s, pair.n_samples)
        logger.info("F1 %.3f (SE %.3f, PPV %.3f)", evaluation.f1, evaluation.se, evaluation.ppv)

    # Diagnostics
    before = curve_energy(median, maternal_curve, config.halfband_hz)
    after = curve_energy(cleaned, maternal_curve, config.halfband_hz)
    if config.method == "common":
        common = embedding
    else:
        common = nontrivial_common_embedding(symmetric_eig(ops.symmetric), embedding.dimension)
    fetal_hz, maternal_hz = fetal_curve.median_hz, maternal_curve.median_hz
    fetal_to_maternal = _energy_ratio(embedding, fs_rows, fetal_hz, maternal_hz)

    diagnostics = {
        "method": config.method,
        "operator": ops.variant,
        "n_rows": int(lag1.n_rows),
        "fs_rows": fs_rows,
        "n_spectrograms": len(specs),
        "maternal_hz_median": maternal_hz,
        "fetal_hz_median": fetal_hz,
        "maternal_residual_ratio": after / before if before > 0 else 0.0,
        "fetal_to_maternal": fetal_to_maternal,
        "difference_fetal_to_maternal": fetal_to_maternal if config.method == "difference" else None,
        "common_maternal_to_fetal": _energy_ratio(common, fs_rows, maternal_hz, fetal_hz),
        "n_beats": int(beats.size),
    }

    return PipelineResult(
        median_spectrogram=median,
        maternal_spectrogram=maternal_spec,
        cleaned_spectrogram=cleaned,
        maternal_curve=maternal_curve,
        fetal_curve=fetal_curve,
        beats=beats,
        proxy=proxy,
        embedding=embedding,
        evaluation=evaluation,
        diagnostics=diagnostics,
    )
