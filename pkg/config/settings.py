"""
Configuration settings for the composite diffusion toolkit.
"""
import os
from typing import Dict, Any, List
from dotenv import load_dotenv

from utils.errors import InvalidParameter

# Load environment variables from .env file
load_dotenv()


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, default))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


class Settings:
    """Central configuration class for composite diffusion experiments."""

    VERSION: str = "0.1.0"

    # ==================== Kernels ====================
    # Dense N x N storage; larger inputs are rejected
    KERNEL_MAX_SAMPLES: int = _env_int("KERNEL_MAX_SAMPLES", 20000)

    # Median-distance divisors: smaller kernel scale for the difference operator
    S_BANDWIDTH_DIVISOR: float = _env_float("S_BANDWIDTH_DIVISOR", 2.0)
    A_BANDWIDTH_DIVISOR: float = _env_float("A_BANDWIDTH_DIVISOR", 5.0)

    # ==================== Spectral ====================
    # Singular values below RANK_TOL_RATIO * sigma_max do not count toward rank
    RANK_TOL_RATIO: float = _env_float("RANK_TOL_RATIO", 1e-8)

    # Conjugate pairs with lambda below this fraction of lambda_max go to the kernel
    SPECTRUM_KERNEL_RATIO: float = 1e-10

    # Input symmetry tolerance for the eigensolvers
    SYMMETRY_TOL: float = 1e-10

    # ==================== Operator Variants ====================
    OPERATOR_VARIANTS: Dict[str, Dict[str, Any]] = {
        "plain": {
            "description": "S = G + H and A = G - H",
            "symmetric": "s",
            "difference": "a",
        },
        "tilde": {
            "description": "Density-corrected Q1 S P1 and Q1 A P1",
            "symmetric": "s_tilde",
            "difference": "a_tilde",
        },
        "hat": {
            "description": "S with the PSD alternative (P1 - P2)(P1 - P2)^T",
            "symmetric": "s",
            "difference": "a_hat",
        },
    }

    DEFAULT_OPERATOR_VARIANT: str = "plain"

    # ==================== STFT ====================
    STFT_WINDOW_S: float = 4.0
    STFT_HOP_S: float = 0.1
    STFT_FREQ_STEP_HZ: float = 0.05
    STFT_MIN_WINDOW_SAMPLES: int = 16

    # ==================== ECG Pipeline ====================
    ECG_LOWPASS_HZ: float = 100.0
    ECG_FIR_TAPS: int = 64
    ECG_DETREND_WINDOW: int = 101

    # Lag map used on the preprocessed channels
    ECG_LAG_WINDOW: int = 12
    ECG_LAG_HOP: int = 6

    # Median-distance divisors on lag windows.  At median/5 the lag-window
    # noise distance of the weaker lead is comparable to the bandwidth.
    ECG_S_BANDWIDTH_DIVISOR: float = _env_float("ECG_S_BANDWIDTH_DIVISOR", 2.0)
    ECG_A_BANDWIDTH_DIVISOR: float = _env_float("ECG_A_BANDWIDTH_DIVISOR", 2.0)

    # Which eigenvectors feed the spectrograms and the beat proxy
    ECG_METHODS: Dict[str, Dict[str, Any]] = {
        "difference": {
            "description": "conjugate pairs of the difference operator",
        },
        "common": {
            "description": "non-trivial eigenvectors of the symmetric operator",
        },
        "single_lead": {
            "description": "diffusion maps of lead 1 alone",
        },
    }
    DEFAULT_ECG_METHOD: str = "difference"

    # Number of conjugate pairs of A turned into spectrograms
    ECG_EIGEN_PAIRS: int = 20

    MATERNAL_RANGE_HZ: tuple = (0.6, 1.8)
    FETAL_RANGE_HZ: tuple = (1.6, 3.6)
    MATERNAL_HALFBAND_HZ: float = 0.15
    RIDGE_JUMP_PENALTY: float = 2.0

    BEAT_SNAP_MS: float = 40.0

    # ==================== Evaluation ====================
    F1_TOLERANCE_MS: float = 50.0
    F1_GUARD_S: float = 2.0

    # ==================== Data Storage ====================
    RESULTS_DIR: str = os.getenv("RESULTS_DIR", "./results")

    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # ==================== Validation ====================
    @classmethod
    def validate(cls) -> List[str]:
        """Return a list of problems with the current settings (empty if fine)."""
        problems = []

        if cls.KERNEL_MAX_SAMPLES < 2:
            problems.append("KERNEL_MAX_SAMPLES must be at least 2")

        for name in (
            "S_BANDWIDTH_DIVISOR",
            "A_BANDWIDTH_DIVISOR",
            "ECG_S_BANDWIDTH_DIVISOR",
            "ECG_A_BANDWIDTH_DIVISOR",
            "RANK_TOL_RATIO",
        ):
            if getattr(cls, name) <= 0:
                problems.append(f"{name} must be positive")

        if cls.ECG_DETREND_WINDOW % 2 == 0:
            problems.append("ECG_DETREND_WINDOW must be odd")

        if cls.DEFAULT_OPERATOR_VARIANT not in cls.OPERATOR_VARIANTS:
            problems.append(f"Unknown DEFAULT_OPERATOR_VARIANT: {cls.DEFAULT_OPERATOR_VARIANT}")

        if cls.DEFAULT_ECG_METHOD not in cls.ECG_METHODS:
            problems.append(f"Unknown DEFAULT_ECG_METHOD: {cls.DEFAULT_ECG_METHOD}")

        return problems

    @classmethod
    def get_operator_variant(cls, variant_name: str = None) -> Dict[str, Any]:
        """Get operator variant configuration."""
        if variant_name is None:
            variant_name = cls.DEFAULT_OPERATOR_VARIANT

        if variant_name not in cls.OPERATOR_VARIANTS:
            raise InvalidParameter(
                f"Unknown operator variant: {variant_name}. "
                f"Available variants: {list(cls.OPERATOR_VARIANTS.keys())}"
            )

        return cls.OPERATOR_VARIANTS[variant_name]


# Singleton instance
settings = Settings()
