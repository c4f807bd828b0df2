"""
Magnitude spectrograms, the cepstral de-shaping mask, eigenvector
spectrograms and their pixel-wise median.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence

import numpy as np
import scipy.signal
from tqdm import tqdm

from config.settings import settings
from operators.spectral import Embedding, antisymmetric_spectrum, difference_embedding
from utils.errors import InvalidParameter, MinLength, NumericalFailure, ShapeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Spectrogram:
    """Magnitude grid mag[F, Tw] with its frequency and time axes."""

    mag: np.ndarray
    freqs_hz: np.ndarray
    times_s: np.ndarray
    window_s: float
    hop_s: float
    deshape: bool

    def axes(self) -> Dict[str, Any]:
        """JSON-ready axes and parameters."""
        return {
            "freqs_hz": self.freqs_hz.tolist(),
            "times_s": self.times_s.tolist(),
            "window_s": self.window_s,
            "hop_s": self.hop_s,
            "deshape": self.deshape,
            "shape": list(self.mag.shape),
        }

    def replace_mag(self, mag: np.ndarray) -> "Spectrogram":
        return Spectrogram(mag, self.freqs_hz, self.times_s, self.window_s, self.hop_s, self.deshape)


def deshape_mask(mag: np.ndarray, freqs_hz: np.ndarray, fs: float, nfft: int) -> np.ndarray:
    """
    Inverse-cepstral mask in [0, 1].

    Each column's real cepstrum of log(mag + delta) is soft-thresholded at its
    median and read back at quefrency 1/f, so only frequencies whose period
    shows up in the cepstrum survive.
    """
    column_max = mag.max(axis=0)
    delta = np.maximum(column_max, np.finfo(float).tiny) * 1e-8
    cepstrum = np.fft.irfft(np.log(mag + delta), n=nfft, axis=0)

    half = nfft // 2 + 1
    cepstrum = cepstrum[:half]
    cepstrum = np.maximum(cepstrum - np.median(cepstrum, axis=0), 0.0)

    mask = np.zeros_like(mag)
    positive = freqs_hz > 0
    index = np.zeros_like(freqs_hz)
    index[positive] = fs / freqs_hz[positive]
    usable = positive & (index <= half - 1)

    lower = np.floor(index[usable]).astype(int)
    upper = np.minimum(lower + 1, half - 1)
    frac = (index[usable] - lower)[:, None]
    mask[usable] = (1.0 - frac) * cepstrum[lower] + frac * cepstrum[upper]

    peak = mask.max(axis=0)
    mask = np.divide(mask, peak, out=np.zeros_like(mask), where=peak > 0)
    return np.clip(mask, 0.0, 1.0)


def stft(
    signal,
    fs: float,
    window_s: float = None,
    hop_s: float = None,
    deshape: bool = False,
    freq_step_hz: float = None,
) -> Spectrogram:
    """
    Hann-window magnitude STFT, optionally de-shaped.

    Args:
        signal: 1-D samples
        fs: Sampling rate (Hz)
        window_s: Window length (s)
        hop_s: Hop between columns (s)
        deshape: Multiply by the inverse-cepstral mask
        freq_step_hz: Target frequency grid step; the FFT is zero-padded to reach it

    Returns:
        Spectrogram
    """
    window_s = settings.STFT_WINDOW_S if window_s is None else window_s
    hop_s = settings.STFT_HOP_S if hop_s is None else hop_s
    freq_step_hz = settings.STFT_FREQ_STEP_HZ if freq_step_hz is None else freq_step_hz

    if fs <= 0 or hop_s <= 0 or freq_step_hz <= 0:
        raise InvalidParameter("fs, hop_s and freq_step_hz must be positive")

    signal = np.asarray(signal, dtype=float)
    if signal.ndim != 1:
        raise InvalidParameter(f"signal must be 1-D, got shape {signal.shape}")

    nperseg = int(round(window_s * fs))
    if signal.size < nperseg:
        raise MinLength(f"series of {signal.size} samples is shorter than the {nperseg}-sample window")
    if nperseg < settings.STFT_MIN_WINDOW_SAMPLES:
        raise InvalidParameter(
            f"window of {nperseg} samples is below the minimum of {settings.STFT_MIN_WINDOW_SAMPLES}"
        )

    hop = min(max(1, int(round(hop_s * fs))), nperseg)
    nfft = max(nperseg, int(math.ceil(fs / freq_step_hz)))

    freqs, times, z = scipy.signal.stft(
        signal,
        fs=fs,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg - hop,
        nfft=nfft,
        boundary="even",
        padded=True,
    )
    mag = np.abs(z)
    if deshape:
        mag = mag * deshape_mask(mag, freqs, fs, nfft)

    return Spectrogram(
        mag=mag,
        freqs_hz=freqs,
        times_s=times,
        window_s=nperseg / fs,
        hop_s=hop / fs,
        deshape=bool(deshape),
    )


def embedding_spectrograms(
    embedding: Embedding,
    fs_rows: float,
    window_s: float = None,
    hop_s: float = None,
    deshape: bool = True,
    freq_step_hz: float = None,
    progress: bool = False,
) -> List[Spectrogram]:
    """One spectrogram per embedding column, read as a series in row order."""
    columns = range(embedding.dimension)
    return [
        stft(embedding.coords[:, column], fs_rows, window_s, hop_s, deshape, freq_step_hz)
        for column in tqdm(columns, desc="eigenvector spectrograms", disable=not progress)
    ]


def eigenvector_spectrograms(
    a,
    k: int = None,
    fs_rows: float = 1.0,
    window_s: float = None,
    hop_s: float = None,
    deshape: bool = True,
    freq_step_hz: float = None,
    spectrum=None,
    progress: bool = False,
) -> List[Spectrogram]:
    """
    Spectrograms of the real and imaginary parts of the first k conjugate
    pairs of the antisymmetric matrix `a`.

    Returns:
        2k spectrograms sharing axes
    """
    k = settings.ECG_EIGEN_PAIRS if k is None else k
    if k < 1:
        raise InvalidParameter(f"k must be at least 1, got {k}")

    spectrum = antisymmetric_spectrum(a) if spectrum is None else spectrum
    if spectrum.num_pairs == 0:
        raise NumericalFailure("no nonzero pairs: the difference operator vanishes")
    if k > spectrum.num_pairs:
        raise InvalidParameter(f"k = {k} exceeds the {spectrum.num_pairs} available pairs")

    embedding = difference_embedding(spectrum, 2 * k)
    return embedding_spectrograms(embedding, fs_rows, window_s, hop_s, deshape, freq_step_hz, progress)


def median_spectrogram(specs: Sequence[Spectrogram]) -> Spectrogram:
    """Pixel-wise median over spectrograms with identical axes."""
    specs = list(specs)
    if not specs:
        raise InvalidParameter("median_spectrogram needs at least one spectrogram")

    first = specs[0]
    for spec in specs[1:]:
        if (
            spec.mag.shape != first.mag.shape
            or not np.array_equal(spec.freqs_hz, first.freqs_hz)
            or not np.array_equal(spec.times_s, first.times_s)
        ):
            raise ShapeError("spectrogram axes differ")

    stack = np.stack([spec.mag for spec in specs])
    return first.replace_mag(np.median(stack, axis=0))


def band_energy(series, fs: float, center_hz: float, halfwidth_hz: float = 0.1) -> float:
    """Periodogram energy of `series` within center +- halfwidth."""
    freqs, power = scipy.signal.periodogram(np.asarray(series, dtype=float), fs=fs, window="hann")
    band = np.abs(freqs - center_hz) <= halfwidth_hz
    return float(power[band].sum())
