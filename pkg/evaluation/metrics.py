"""
Beat-detection scores and replicate summaries.
"""
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from config.settings import settings
from utils.errors import InvalidParameter


@dataclass(frozen=True)
class BeatEvaluation:
    """Matched counts and the derived sensitivity, PPV and F1."""

    tp: int
    fp: int
    fn: int
    se: float
    ppv: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "BeatEvaluation":
        se = tp / (tp + fn) if tp + fn else 0.0
        ppv = tp / (tp + fp) if tp + fp else 0.0
        f1 = 2 * se * ppv / (se + ppv) if se + ppv else 0.0
        return cls(tp=int(tp), fp=int(fp), fn=int(fn), se=se, ppv=ppv, f1=f1)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def summary(self) -> str:
        """
        Get a formatted summary of the beat scores.

        Returns:
            Formatted summary string
        """
        return f"""
Beat Detection Summary
{'=' * 70}

COUNTS:
  True Positives: {self.tp}
  False Positives: {self.fp}
  False Negatives: {self.fn}

SCORES:
  Sensitivity (SE): {self.se * 100:.2f}%
  Positive Predictive Value (PPV): {self.ppv * 100:.2f}%
  F1: {self.f1 * 100:.2f}%
{'=' * 70}
"""


def f1_score(
    est,
    truth,
    fs: float,
    tol_ms: float = None,
    guard_s: float = None,
    n_samples: int = None,
) -> BeatEvaluation:
    """
    Score estimated beats against ground truth.

    Beats within guard_s of either end are dropped from both lists.  Each
    truth beat, in time order, takes the nearest unmatched estimate within
    +-tol_ms.

    Args:
        est: Estimated beat sample indices
        truth: Reference beat sample indices
        fs: Sampling rate (Hz)
        tol_ms: Matching tolerance (ms)
        guard_s: Margin excluded at both ends (s)
        n_samples: Recording length; defaults to one past the last beat seen

    Returns:
        BeatEvaluation
    """
    tol_ms = settings.F1_TOLERANCE_MS if tol_ms is None else tol_ms
    guard_s = settings.F1_GUARD_S if guard_s is None else guard_s
    if fs <= 0 or tol_ms < 0 or guard_s < 0:
        raise InvalidParameter("fs must be positive and tol_ms, guard_s nonnegative")

    est = np.sort(np.asarray(est, dtype=int).ravel())
    truth = np.sort(np.asarray(truth, dtype=int).ravel())

    if n_samples is None:
        last = max(est.max() if est.size else 0, truth.max() if truth.size else 0)
        n_samples = int(last) + 1

    guard = guard_s * fs
    est = est[(est >= guard) & (est <= n_samples - 1 - guard)]
    truth = truth[(truth >= guard) & (truth <= n_samples - 1 - guard)]

    tolerance = tol_ms * fs / 1000.0
    matched = np.zeros(est.size, dtype=bool)
    tp = 0
    for beat in truth:
        distance = np.abs(est - beat).astype(float)
        distance[matched] = np.inf
        if distance.size == 0:
            break
        nearest = int(np.argmin(distance))
        if distance[nearest] <= tolerance:
            matched[nearest] = True
            tp += 1

    return BeatEvaluation.from_counts(tp=tp, fp=est.size - tp, fn=truth.size - tp)


def summarize_evaluations(evaluations: Sequence[BeatEvaluation], labels: Sequence[Any] = None):
    """
    Per-replicate table plus mean, STD, median and IQR of SE, PPV and F1.

    Args:
        evaluations: One BeatEvaluation per replicate
        labels: Replicate labels (seeds); defaults to 0..n-1

    Returns:
        (per_replicate DataFrame, statistics DataFrame indexed by metric)
    """
    evaluations = list(evaluations)
    if not evaluations:
        raise InvalidParameter("no evaluations to summarize")
    labels = list(range(len(evaluations))) if labels is None else list(labels)
    if len(labels) != len(evaluations):
        raise InvalidParameter("labels and evaluations differ in length")

    rows: List[Dict[str, Any]] = []
    for label, evaluation in zip(labels, evaluations):
        rows.append({"replicate": label, **evaluation.to_dict()})
    per_replicate = pd.DataFrame(rows).set_index("replicate")

    scores = per_replicate[["se", "ppv", "f1"]]
    statistics = pd.DataFrame({
        "mean": scores.mean(),
        "std": scores.std(ddof=0),
        "median": scores.median(),
        "iqr": scores.quantile(0.75) - scores.quantile(0.25),
    })
    statistics.index.name = "metric"
    return per_replicate, statistics


def summarize_methods(evaluations: Dict[str, Sequence[BeatEvaluation]], labels: Sequence[Any] = None) -> pd.DataFrame:
    """
    Replicate statistics for several methods scored on the same replicates.

    Returns:
        DataFrame indexed by (method, metric) with mean, std, median and iqr
    """
    if not evaluations:
        raise InvalidParameter("no methods to summarize")
    frames = {method: summarize_evaluations(scores, labels)[1] for method, scores in evaluations.items()}
    return pd.concat(frames, names=["method"])
