"""
Signal conditioning: zero-phase lowpass followed by running-median detrend.
"""
import numpy as np
from scipy.ndimage import median_filter
from scipy.signal import filtfilt, firwin

from config.settings import settings
from utils.errors import InvalidData, InvalidParameter, MinLength


def lowpass(signal, fs: float, cutoff_hz: float, taps: int = None) -> np.ndarray:
    """Windowed-sinc FIR applied forward and backward with even (reflecting) padding."""
    taps = taps or settings.ECG_FIR_TAPS
    signal = np.asarray(signal, dtype=float)
    if fs <= 2 * cutoff_hz:
        raise InvalidParameter(f"fs = {fs} Hz must exceed twice the cutoff ({cutoff_hz} Hz)")
    if cutoff_hz <= 0:
        raise InvalidParameter(f"cutoff must be positive, got {cutoff_hz}")

    padlen = 3 * taps
    if signal.size <= padlen:
        raise MinLength(f"signal of {signal.size} samples is too short for a {taps}-tap filter")

    coefficients = firwin(taps, cutoff_hz, fs=fs)
    return filtfilt(coefficients, [1.0], signal, padtype="even", padlen=padlen)


def preprocess(
    signal,
    fs: float,
    lowpass_hz: float = None,
    detrend_window: int = None,
) -> np.ndarray:
    """
    Lowpass the signal and subtract its running median.

    Args:
        signal: 1-D samples
        fs: Sampling rate (Hz)
        lowpass_hz: Cutoff (defaults to settings.ECG_LOWPASS_HZ)
        detrend_window: Odd running-median length in samples

    Returns:
        Conditioned signal of the same length
    """
    lowpass_hz = settings.ECG_LOWPASS_HZ if lowpass_hz is None else lowpass_hz
    detrend_window = settings.ECG_DETREND_WINDOW if detrend_window is None else detrend_window

    signal = np.asarray(signal, dtype=float)
    if signal.ndim != 1:
        raise InvalidParameter(f"signal must be 1-D, got shape {signal.shape}")
    if not np.all(np.isfinite(signal)):
        raise InvalidData("signal contains non-finite samples")
    if detrend_window < 1 or detrend_window % 2 == 0:
        raise InvalidParameter(f"detrend_window must be a positive odd integer, got {detrend_window}")

    filtered = lowpass(signal, fs, lowpass_hz)
    trend = median_filter(filtered, size=detrend_window, mode="reflect")
    return filtered - trend
