"""
Embeddings of two user-supplied point clouds.
"""
from typing import Any, Dict

from config.experiment import EmbedConfig
from data.io import read_matrix_csv
from evaluation.report import ArtifactWriter
from experiments.embeddings import embed_operators, write_embeddings
from operators.composite import build_operators

EMBED_OUTPUTS = (
    "embedding_common.csv",
    "embedding_common.json",
    "embedding_difference.csv",
    "embedding_difference.json",
    "spectrum.json",
)


def run_embed(config: EmbedConfig, emit: bool = False) -> Dict[str, Any]:
    writer = ArtifactWriter.for_config(config, emit)

    view1 = read_matrix_csv(config.view1_path)
    view2 = read_matrix_csv(config.view2_path)
    ops = build_operators(view1, view2, config.operator, config.s_divisor, config.a_divisor)

    embeddings = embed_operators(ops, config.embedding_dim)
    write_embeddings(writer, embeddings, common_extra={"symmetry_defects": ops.common_scale.symmetry_defects()})

    manifest = writer.finish()
    return {
        "output_dir": str(writer.output_dir),
        "n": int(view1.shape[0]),
        "difference_status": embeddings.status,
        "files": writer.written,
        "manifest": manifest,
    }
