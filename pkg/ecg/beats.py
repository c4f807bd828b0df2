"""
Beat times from an instantaneous heart-rate curve and a beat proxy.
"""
import logging

import numpy as np
import scipy.ndimage
import scipy.signal

from config.settings import settings
from ecg.ridge import FrequencyCurve
from utils.errors import InvalidParameter, ShapeError

logger = logging.getLogger(__name__)


def difference_energy_envelope(
    matrix,
    origin_index,
    window: int,
    n_samples: int,
    fs: float,
    smooth_ms: float = 20.0,
) -> np.ndarray:
    """
    Per-sample beat proxy from the difference operator.

    Each lag-window row contributes its row norm to the samples it covers;
    overlapping contributions are averaged and then box-smoothed.

    Args:
        matrix: Difference operator, one row per lag window
        origin_index: First signal sample of each window
        window: Lag window length (samples)
        n_samples: Length of the original signal
        fs: Sampling rate (Hz)
        smooth_ms: Smoothing width (ms)

    Returns:
        Envelope of length n_samples
    """
    matrix = np.asarray(matrix, dtype=float)
    origin_index = np.asarray(origin_index, dtype=int)
    if matrix.ndim != 2 or matrix.shape[0] != origin_index.size:
        raise ShapeError(f"{origin_index.size} window origins for a matrix of shape {matrix.shape}")
    if window < 1 or n_samples < 1:
        raise InvalidParameter("window and n_samples must be positive")

    energy = np.linalg.norm(matrix, axis=1)
    covered = origin_index[:, None] + np.arange(window)[None, :]
    inside = covered < n_samples

    total = np.zeros(n_samples)
    coverage = np.zeros(n_samples)
    np.add.at(total, covered[inside], np.broadcast_to(energy[:, None], covered.shape)[inside])
    np.add.at(coverage, covered[inside], 1.0)

    envelope = np.divide(total, coverage, out=np.zeros(n_samples), where=coverage > 0)
    size = max(1, int(round(smooth_ms * fs / 1000.0)))
    smoothed = scipy.ndimage.uniform_filter1d(envelope, size=size, mode="nearest")
    # The running sum leaves rounding residue below zero next to uncovered samples
    return np.maximum(smoothed, 0.0)


def _snap(position: int, peaks: np.ndarray, radius: int) -> int:
    if peaks.size == 0:
        return position
    i = int(np.searchsorted(peaks, position))
    candidates = peaks[max(i - 1, 0):i + 1]
    nearest = int(candidates[np.argmin(np.abs(candidates - position))])
    return nearest if abs(nearest - position) <= radius else position


def beats_from_curve(
    curve: FrequencyCurve,
    signal_proxy,
    fs: float,
    snap_ms: float = None,
    n_offsets: int = 64,
) -> np.ndarray:
    """
    Integrate the curve to a cycle count and emit a beat per whole cycle.

    The starting phase is the one of `n_offsets` candidates whose beats
    collect the most proxy mass.  From each emitted beat the next one is
    placed a full cycle later and snapped to the nearest proxy peak within
    +-snap_ms.

    Args:
        curve: Heart-rate curve (Hz) with column times
        signal_proxy: Per-sample envelope peaking at beats
        fs: Sampling rate of the proxy (Hz)
        snap_ms: Snap radius (ms)
        n_offsets: Number of starting phases tried

    Returns:
        Strictly increasing sample indices
    """
    snap_ms = settings.BEAT_SNAP_MS if snap_ms is None else snap_ms
    if fs <= 0:
        raise InvalidParameter(f"fs must be positive, got {fs}")
    if n_offsets < 1 or snap_ms < 0:
        raise InvalidParameter("n_offsets must be positive and snap_ms nonnegative")

    hz = np.asarray(curve.hz, dtype=float)
    if hz.size == 0 or not np.all(np.isfinite(hz)) or np.any(hz <= 0):
        raise InvalidParameter("heart-rate curve must be finite and positive")

    proxy = np.asarray(signal_proxy, dtype=float)
    if proxy.ndim != 1 or proxy.size < 2:
        raise InvalidParameter("signal_proxy must be a 1-D series of at least two samples")

    n = proxy.size
    rate = curve.at(np.arange(n) / fs)
    cycles = np.concatenate([[0.0], np.cumsum(rate[:-1])]) / fs

    best_offset, best_score = 0.0, -np.inf
    for j in range(n_offsets):
        offset = j / n_offsets
        crossings = np.flatnonzero(np.diff(np.floor(cycles + offset)) > 0) + 1
        score = float(proxy[crossings].sum())
        if score > best_score:
            best_offset, best_score = offset, score

    crossings = np.flatnonzero(np.diff(np.floor(cycles + best_offset)) > 0) + 1
    if crossings.size == 0:
        return np.empty(0, dtype=int)

    peaks, _ = scipy.signal.find_peaks(proxy)
    radius = int(round(snap_ms * fs / 1000.0))

    beats = []
    position = int(crossings[0])
    while position < n:
        beat = _snap(position, peaks, radius)
        if beats and beat <= beats[-1]:
            beat = max(position, beats[-1] + 1)
        if beat >= n:
            break
        beats.append(beat)
        position = int(np.searchsorted(cycles, cycles[beat] + 1.0))

    logger.debug("emitted %d beats (offset %.3f cycles)", len(beats), best_offset)
    return np.asarray(beats, dtype=int)
