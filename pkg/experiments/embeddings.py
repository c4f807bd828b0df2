"""
Common and difference embeddings of an OperatorSet, and their artifacts.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from evaluation.report import ArtifactWriter
from operators.composite import OperatorSet
from operators.spectral import (
    Embedding,
    antisymmetric_spectrum,
    common_embedding,
    difference_embedding,
    symmetric_difference_embedding,
    symmetric_eig,
)

logger = logging.getLogger(__name__)

DEGENERATE_STATUS = "degenerate: A ≈ 0"

# Eigenvalues echoed into spectrum.json
SPECTRUM_HEAD = 50


@dataclass
class EmbeddingPair:
    common: Embedding
    difference: Optional[Embedding]
    symmetric_eigenvalues: np.ndarray
    difference_eigenvalues: np.ndarray
    difference_max_abs: float

    @property
    def status(self) -> str:
        return "ok" if self.difference is not None else DEGENERATE_STATUS


def embed_operators(ops: OperatorSet, m: int, degenerate_tol: float = 1e-10) -> EmbeddingPair:
    """
    Leading m-column embeddings of the symmetric and difference operators.

    The difference embedding is None when the difference operator is below
    `degenerate_tol` everywhere or has fewer than m/2 conjugate pairs.
    """
    s_spec = symmetric_eig(ops.symmetric)
    common = common_embedding(s_spec, m)

    max_abs = float(np.max(np.abs(ops.difference))) if ops.difference.size else 0.0
    difference = None
    difference_eigenvalues = np.empty(0)

    if max_abs > degenerate_tol:
        if ops.difference_is_symmetric:
            d_spec = symmetric_eig(ops.difference)
            difference_eigenvalues = d_spec.eigenvalues
            difference = symmetric_difference_embedding(d_spec, m)
        else:
            a_spec = antisymmetric_spectrum(ops.difference)
            difference_eigenvalues = a_spec.lambdas
            if a_spec.num_pairs >= m // 2:
                difference = difference_embedding(a_spec, m)
            else:
                logger.warning("difference operator has %d pairs, %d needed", a_spec.num_pairs, m // 2)

    if difference is None:
        logger.warning("difference embedding is degenerate (max |A| = %.3e)", max_abs)

    return EmbeddingPair(
        common=common,
        difference=difference,
        symmetric_eigenvalues=s_spec.eigenvalues,
        difference_eigenvalues=difference_eigenvalues,
        difference_max_abs=max_abs,
    )


def embedding_frame(embedding: Embedding) -> pd.DataFrame:
    frame = pd.DataFrame(embedding.coords, columns=embedding.column_names())
    frame.index.name = "point"
    return frame


def write_embeddings(
    writer: ArtifactWriter,
    pair: EmbeddingPair,
    common_extra: Dict[str, Any] = None,
    difference_extra: Dict[str, Any] = None,
) -> None:
    """embedding_common.{csv,json}, embedding_difference.{csv,json} and spectrum.json."""
    writer.dataframe("embedding_common.csv", embedding_frame(pair.common))
    writer.json("embedding_common.json", {**pair.common.sidecar(), **(common_extra or {})})

    if pair.difference is not None:
        writer.dataframe("embedding_difference.csv", embedding_frame(pair.difference))
        sidecar = {**pair.difference.sidecar(), "status": pair.status, **(difference_extra or {})}
    else:
        writer.text("embedding_difference.csv", f"# {DEGENERATE_STATUS}\n")
        sidecar = {"source": "difference", "status": DEGENERATE_STATUS, "max_abs": pair.difference_max_abs}
    writer.json("embedding_difference.json", sidecar)

    writer.json(
        "spectrum.json",
        {
            "symmetric_eigenvalues": pair.symmetric_eigenvalues[:SPECTRUM_HEAD].tolist(),
            "difference_eigenvalues": pair.difference_eigenvalues[:SPECTRUM_HEAD].tolist(),
            "difference_max_abs": pair.difference_max_abs,
            "difference_status": pair.status,
        },
    )
