"""
Dominant-frequency curves through spectrograms and their removal.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np

from ecg.spectrogram import Spectrogram
from utils.errors import InvalidParameter, ShapeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrequencyCurve:
    """One frequency per spectrogram column, with a [0, 1] confidence."""

    hz: np.ndarray
    confidence: np.ndarray
    times_s: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hz": self.hz.tolist(),
            "confidence": self.confidence.tolist(),
            "times_s": self.times_s.tolist(),
        }

    @property
    def median_hz(self) -> float:
        return float(np.median(self.hz)) if self.hz.size else 0.0

    def at(self, times_s) -> np.ndarray:
        """Curve linearly interpolated at `times_s` (held constant past the ends)."""
        return np.interp(np.asarray(times_s, dtype=float), self.times_s, self.hz)


def _band(freqs_hz: np.ndarray, f_range: Tuple[float, float]) -> np.ndarray:
    lo, hi = f_range
    if not lo < hi:
        raise InvalidParameter(f"f_range must be increasing, got {f_range}")
    rows = np.flatnonzero((freqs_hz >= lo) & (freqs_hz <= hi))
    if rows.size == 0:
        raise InvalidParameter(
            f"no frequency bins in {f_range} Hz (grid {freqs_hz[0]:.3g}..{freqs_hz[-1]:.3g} Hz)"
        )
    return rows


def ridge_objective(score: np.ndarray, path: np.ndarray, jump_penalty: float) -> float:
    """Sum of score along `path` minus the jump penalty on its bin steps."""
    columns = np.arange(score.shape[1])
    return float(score[path, columns].sum() - jump_penalty * np.abs(np.diff(path)).sum())


def _viterbi(score: np.ndarray, jump_penalty: float) -> np.ndarray:
    n_bins, n_cols = score.shape
    bins = np.arange(n_bins)
    transition = jump_penalty * np.abs(bins[:, None] - bins[None, :])

    value = score[:, 0].copy()
    back = np.zeros((n_bins, n_cols), dtype=int)
    for t in range(1, n_cols):
        # candidates[to, from]
        candidates = value[None, :] - transition
        back[:, t] = np.argmax(candidates, axis=1)
        value = score[:, t] + candidates[bins, back[:, t]]

    path = np.empty(n_cols, dtype=int)
    path[-1] = int(np.argmax(value))
    for t in range(n_cols - 1, 0, -1):
        path[t - 1] = back[path[t], t]
    return path


def extract_ridge(
    spec: Spectrogram,
    f_range: Tuple[float, float],
    jump_penalty: float = 2.0,
    delta: float = None,
) -> FrequencyCurve:
    """
    Globally optimal ridge inside `f_range`.

    Maximizes sum(log(mag + delta)) - jump_penalty * sum(|bin step|) over all
    paths with one bin per column.  Ties go to the lower bin.

    Args:
        spec: Spectrogram to search
        f_range: (low, high) in Hz, inclusive
        jump_penalty: Cost per bin of frequency change between columns
        delta: Log floor; defaults to 1e-9 * max(mag)

    Returns:
        FrequencyCurve on the spectrogram's time grid
    """
    if jump_penalty < 0:
        raise InvalidParameter(f"jump_penalty must be nonnegative, got {jump_penalty}")
    if spec.mag.shape[1] == 0:
        raise InvalidParameter("spectrogram has no columns")

    rows = _band(spec.freqs_hz, f_range)
    band = spec.mag[rows]

    if delta is None:
        peak = float(spec.mag.max())
        delta = 1e-9 * peak if peak > 0 else 1e-300
    if delta <= 0:
        raise InvalidParameter(f"delta must be positive, got {delta}")

    path = _viterbi(np.log(band + delta), jump_penalty)

    columns = np.arange(band.shape[1])
    column_max = band.max(axis=0)
    picked = band[path, columns]
    confidence = np.divide(picked, column_max, out=np.zeros_like(picked), where=column_max > 0)

    return FrequencyCurve(
        hz=spec.freqs_hz[rows][path].astype(float),
        confidence=confidence,
        times_s=spec.times_s.astype(float),
    )


def remove_curve(spec: Spectrogram, curve: FrequencyCurve, halfband_hz: float = 0.15) -> Spectrogram:
    """
    Zero the spectrogram within +-halfband of the curve and of each of its
    integer harmonics.

    The curve is interpolated onto the spectrogram's time grid.
    """
    if halfband_hz <= 0:
        raise InvalidParameter(f"halfband_hz must be positive, got {halfband_hz}")
    if curve.hz.size == 0 or curve.hz.shape != curve.times_s.shape:
        raise ShapeError("curve needs matching, nonempty hz and times_s")

    f0 = curve.at(spec.times_s)
    if not np.all(np.isfinite(f0)) or np.any(f0 <= 0):
        raise InvalidParameter("curve frequencies must be positive")

    freqs = spec.freqs_hz[:, None]
    harmonic = np.rint(freqs / f0[None, :])
    near = (harmonic >= 1) & (np.abs(freqs - harmonic * f0[None, :]) <= halfband_hz + 1e-9)

    logger.debug("removing %d of %d pixels around curve", int(near.sum()), near.size)
    return spec.replace_mag(np.where(near, 0.0, spec.mag))


def curve_energy(spec: Spectrogram, curve: FrequencyCurve, halfband_hz: float) -> float:
    """Squared magnitude within +-halfband of the curve fundamental."""
    f0 = curve.at(spec.times_s)
    near = np.abs(spec.freqs_hz[:, None] - f0[None, :]) <= halfband_hz + 1e-9
    return float(np.square(spec.mag[near]).sum())
