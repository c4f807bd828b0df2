"""
Composite operators built from the diffusion pairs of two views.

G = P2 Q1, H = P1 Q2 = G^T, S = G + H (common structure), A = G - H
(differences).  The 1/2 factor of the continuous definitions is not applied.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import scipy.linalg

from config.settings import settings
from operators.kernels import DiffusionPair, PairedDataset, diffusion_from_points
from utils.errors import InvalidParameter, NumericalFailure, ShapeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompositeOperators:
    """Dense G, H = G^T, S = G + H and A = G - H."""

    g: np.ndarray
    h: np.ndarray
    s: np.ndarray
    a: np.ndarray

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def symmetry_defects(self) -> Dict[str, float]:
        """Max-norm defects of the structural identities."""
        return {
            "s_symmetry": float(np.max(np.abs(self.s - self.s.T))),
            "a_antisymmetry": float(np.max(np.abs(self.a + self.a.T))),
            "h_transpose": float(np.max(np.abs(self.h - self.g.T))),
        }


@dataclass(frozen=True)
class SupportMask:
    """Sample indices whose row or column of A exceeds `threshold`."""

    indices: tuple
    threshold: float

    def to_dict(self) -> Dict[str, Any]:
        return {"indices": [int(i) for i in self.indices], "threshold": self.threshold}


@dataclass(frozen=True)
class RankReport:
    """Singular values, numerical rank and (optionally) the planted 2m bound."""

    singular_values: np.ndarray
    numerical_rank: int
    bound: Optional[int] = None
    tol_ratio: float = 1e-8

    @property
    def within_bound(self) -> Optional[bool]:
        if self.bound is None:
            return None
        return self.numerical_rank <= self.bound

    def to_dict(self, max_values: int = 50) -> Dict[str, Any]:
        return {
            "numerical_rank": self.numerical_rank,
            "bound": self.bound,
            "within_bound": self.within_bound,
            "tol_ratio": self.tol_ratio,
            "singular_values": [float(v) for v in self.singular_values[:max_values]],
        }


@dataclass
class OperatorSet:
    """Operators for one paired dataset under a chosen variant."""

    variant: str
    symmetric: np.ndarray
    difference: np.ndarray
    common_scale: CompositeOperators
    difference_scale: CompositeOperators

    @property
    def difference_is_symmetric(self) -> bool:
        return self.variant == "hat"


def _check_pairs(view1: DiffusionPair, view2: DiffusionPair) -> None:
    if view1.p.shape != view2.p.shape:
        raise ShapeError(f"Diffusion pairs differ in size: {view1.p.shape} != {view2.p.shape}")


def build_composite(view1: DiffusionPair, view2: DiffusionPair) -> CompositeOperators:
    """
    Build G, H, S and A from the two views.

    Args:
        view1: Diffusion pair of the first view
        view2: Diffusion pair of the second view

    Returns:
        CompositeOperators with exact H = G^T, exact symmetry of S and
        exact antisymmetry of A
    """
    _check_pairs(view1, view2)

    g = view2.p @ view1.q
    # (P2 Q1)^T = Q1^T P2^T = P1 Q2
    h = np.ascontiguousarray(g.T)
    return CompositeOperators(g=g, h=h, s=g + h, a=g - h)


def build_density_corrected(ops: CompositeOperators, view1: DiffusionPair):
    """
    Density-corrected operators Q1 S P1 and Q1 A P1.

    Returns:
        (s_tilde, a_tilde)
    """
    if ops.s.shape != view1.p.shape:
        raise ShapeError(f"Operator shape {ops.s.shape} does not match view shape {view1.p.shape}")

    s_tilde = view1.q @ ops.s @ view1.p
    a_tilde = view1.q @ ops.a @ view1.p
    return 0.5 * (s_tilde + s_tilde.T), 0.5 * (a_tilde - a_tilde.T)


def build_alternative_difference(view1: DiffusionPair, view2: DiffusionPair) -> np.ndarray:
    """PSD alternative difference operator (P1 - P2)(P1 - P2)^T."""
    _check_pairs(view1, view2)

    delta = view1.p - view2.p
    a_hat = delta @ delta.T
    return 0.5 * (a_hat + a_hat.T)


def build_alternating_difference(view1: DiffusionPair, view2: DiffusionPair) -> np.ndarray:
    """
    Half the difference of the two alternating-diffusion orders,
    (P2 P1 - P1 P2) / 2.
    """
    _check_pairs(view1, view2)
    return 0.5 * (view2.p @ view1.p - view1.p @ view2.p)


def support_mask(a, threshold: float) -> SupportMask:
    """
    Flag samples whose row or column of `a` has an entry above `threshold`.
    """
    if threshold <= 0:
        raise InvalidParameter(f"threshold must be positive, got {threshold}")

    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"support_mask needs a square matrix, got shape {a.shape}")

    magnitude = np.abs(a)
    statistic = np.maximum(magnitude.max(axis=1), magnitude.max(axis=0))
    indices = tuple(int(i) for i in np.flatnonzero(statistic > threshold))
    return SupportMask(indices=indices, threshold=float(threshold))


def rank_report(
    a,
    planted_m: Optional[int] = None,
    tol_ratio: float = None,
    atol: float = None,
) -> RankReport:
    """
    Numerical rank of `a` from its singular values.

    Args:
        a: Square matrix
        planted_m: Size of the planted difference set; sets bound = 2m
        tol_ratio: Relative tolerance against sigma_max (defaults to settings)
        atol: Absolute floor for the singular value cutoff; defaults to
            N * machine epsilon, the rounding level of products of Markov
            matrices, so an exactly cancelling A reports rank 0

    Returns:
        RankReport
    """
    if tol_ratio is None:
        tol_ratio = settings.RANK_TOL_RATIO

    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"rank_report needs a square matrix, got shape {a.shape}")
    if atol is None:
        atol = a.shape[0] * np.finfo(float).eps

    try:
        singular_values = scipy.linalg.svdvals(a)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise NumericalFailure(f"SVD did not converge: {e}") from e

    sigma_max = float(singular_values[0]) if singular_values.size else 0.0
    if sigma_max > 0:
        cutoff = max(tol_ratio * sigma_max, atol)
        numerical_rank = int(np.count_nonzero(singular_values > cutoff))
    else:
        numerical_rank = 0

    bound = None if planted_m is None else 2 * int(planted_m)
    return RankReport(
        singular_values=singular_values,
        numerical_rank=numerical_rank,
        bound=bound,
        tol_ratio=tol_ratio,
    )


def build_operators(
    view1_points,
    view2_points,
    variant: str = None,
    s_divisor: float = None,
    a_divisor: float = None,
) -> OperatorSet:
    """
    Kernel path for both views followed by the requested operator variant.

    The symmetric operator uses bandwidth median/s_divisor, the difference
    operator median/a_divisor.
    """
    variant_config = settings.get_operator_variant(variant)
    variant = variant or settings.DEFAULT_OPERATOR_VARIANT
    s_divisor = settings.S_BANDWIDTH_DIVISOR if s_divisor is None else s_divisor
    a_divisor = settings.A_BANDWIDTH_DIVISOR if a_divisor is None else a_divisor

    data = PairedDataset(view1=view1_points, view2=view2_points)
    logger.info("Building %s operators for %d samples", variant, data.n)

    s_pairs = (diffusion_from_points(data.view1, s_divisor), diffusion_from_points(data.view2, s_divisor))
    if a_divisor == s_divisor:
        a_pairs = s_pairs
    else:
        a_pairs = (diffusion_from_points(data.view1, a_divisor), diffusion_from_points(data.view2, a_divisor))

    common_scale = build_composite(*s_pairs)
    difference_scale = common_scale if a_pairs is s_pairs else build_composite(*a_pairs)

    operators = {"s": common_scale.s, "a": difference_scale.a}
    if variant_config["symmetric"] == "s_tilde" or variant_config["difference"] == "a_tilde":
        operators["s_tilde"], _ = build_density_corrected(common_scale, s_pairs[0])
        _, operators["a_tilde"] = build_density_corrected(difference_scale, a_pairs[0])
    if variant_config["difference"] == "a_hat":
        operators["a_hat"] = build_alternative_difference(*a_pairs)

    return OperatorSet(
        variant=variant,
        symmetric=operators[variant_config["symmetric"]],
        difference=operators[variant_config["difference"]],
        common_scale=common_scale,
        difference_scale=difference_scale,
    )
