"""
Rank and support of A for a planted difference set.
"""
import logging
from typing import Any, Dict

import numpy as np
import scipy.linalg

from config.experiment import PlantedConfig
from data.generators import generate_planted_pair
from evaluation.report import ArtifactWriter
from operators.composite import build_composite, rank_report, support_mask
from operators.kernels import normalize

logger = logging.getLogger(__name__)

PLANTED_OUTPUTS = ("rank_report.json", "support_mask.json", "planted.json")

# Rounding residue of an exactly-zero A, relative to ||G||_2
RANK_ATOL_RATIO = 1e-12


def planted_indices(n: int, m: int, seed: int) -> np.ndarray:
    return np.sort(np.random.default_rng(seed).permutation(n)[:m])


def run_planted(config: PlantedConfig, emit: bool = False) -> Dict[str, Any]:
    """
    Build A for a planted pair and check rank(A) <= 2m.

    Returns:
        Summary dictionary (includes the RunManifest)
    """
    writer = ArtifactWriter.for_config(config, emit)

    diff = planted_indices(config.n, config.m, config.seed)
    w1, w2 = generate_planted_pair(config.n, diff, config.magnitude, config.seed)
    ops = build_composite(normalize(w1), normalize(w2))

    atol = RANK_ATOL_RATIO * float(scipy.linalg.norm(ops.g, 2))
    report = rank_report(ops.a, planted_m=config.m, atol=atol)
    mask = support_mask(ops.a, config.support_threshold)

    outside = np.setdiff1d(np.arange(config.n), diff)
    off_block = float(np.max(np.abs(ops.a[np.ix_(outside, outside)]))) if outside.size else 0.0
    passed = bool(report.within_bound)

    writer.json("rank_report.json", {**report.to_dict(), "atol": atol})
    writer.json("support_mask.json", {**mask.to_dict(), "contains_planted": set(diff.tolist()) <= set(mask.indices)})
    writer.json(
        "planted.json",
        {
            "n": config.n,
            "m": config.m,
            "diff_indices": diff.tolist(),
            "numerical_rank": report.numerical_rank,
            "bound": report.bound,
            "off_block_max": off_block,
            "result": "PASS" if passed else "FAIL",
        },
    )

    manifest = writer.finish()
    return {
        "output_dir": str(writer.output_dir),
        "diff_indices": diff.tolist(),
        "numerical_rank": report.numerical_rank,
        "bound": report.bound,
        "off_block_max": off_block,
        "passed": passed,
        "files": writer.written,
        "manifest": manifest,
    }
