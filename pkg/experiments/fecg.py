"""
Fetal beat extraction on synthetic replicates or an external recording.
"""
import logging
from dataclasses import replace
from typing import Any, Dict, List, Tuple

from tqdm import tqdm

from config.experiment import FecgConfig
from config.settings import settings
from data.generators import SignalPair, export_signal_pair, generate_signal_pair, read_signal_pair
from ecg.pipeline import PipelineResult, run_pipeline
from evaluation.metrics import summarize_evaluations, summarize_methods
from evaluation.report import ArtifactWriter

logger = logging.getLogger(__name__)

# Written once per replicate (prefixed "rep<seed>_" when replicates > 1)
FECG_REPLICATE_OUTPUTS = (
    "median_spectrogram.cdif",
    "median_spectrogram.json",
    "maternal_curve.json",
    "fetal_curve.json",
    "beats.json",
    "diagnostics.json",
)

NO_TRUTH_NOTICE = "ground truth unavailable: evaluation skipped"
METHODS_SUMMARY = "evaluation_methods.csv"


def _signal_pairs(config: FecgConfig) -> List[Tuple[str, SignalPair]]:
    if config.signal_path:
        pair = read_signal_pair(config.signal_path, config.fs, config.truth_path or None)
        return [("external", pair)]

    pairs = []
    for seed in range(config.seed, config.seed + config.replicates):
        pair = generate_signal_pair(
            duration_s=config.duration_s,
            fs=config.fs,
            maternal_hr=config.maternal_hr,
            fetal_hr=config.fetal_hr,
            morphology_seed=seed,
            noise_std=config.noise_std,
            fetal_amplitude=config.fetal_amplitude,
        )
        pairs.append((str(seed), pair))
    return pairs


def _write_replicate(writer: ArtifactWriter, prefix: str, pair: SignalPair, result: PipelineResult) -> None:
    writer.matrix_binary(f"{prefix}median_spectrogram.cdif", result.median_spectrogram.mag)
    writer.json(f"{prefix}median_spectrogram.json", result.median_spectrogram.axes())
    writer.json(f"{prefix}maternal_curve.json", result.maternal_curve.to_dict())
    writer.json(f"{prefix}fetal_curve.json", result.fetal_curve.to_dict())
    writer.json(f"{prefix}beats.json", result.beats_payload(pair.fs))
    writer.json(f"{prefix}diagnostics.json", result.diagnostics)
    if result.evaluation is not None:
        writer.json(f"{prefix}evaluation.json", result.evaluation.to_dict())


def run_fecg(config: FecgConfig, progress: bool = False, emit: bool = False) -> Dict[str, Any]:
    """
    Run the pipeline on every replicate and write curves, beats and scores.

    Returns:
        Summary dictionary (includes the RunManifest)
    """
    writer = ArtifactWriter.for_config(config, emit)
    pairs = _signal_pairs(config)
    if config.signal_path and config.replicates > 1:
        writer.note("external input: replicates ignored")

    multiple = len(pairs) > 1
    labels, evaluations, results = [], [], {}
    by_method: Dict[str, list] = {method: [] for method in settings.ECG_METHODS} if config.baselines else {}

    for label, pair in tqdm(pairs, desc="replicates", disable=not (progress and multiple)):
        prefix = f"rep{label}_" if multiple else ""
        if label != "external":
            for path in export_signal_pair(pair, writer.output_dir, prefix).values():
                writer.record(path)

        result = run_pipeline(pair, config, progress=progress and not multiple)
        _write_replicate(writer, prefix, pair, result)
        results[label] = result

        if result.evaluation is not None:
            labels.append(label)
            evaluations.append(result.evaluation)
            for method in by_method:
                if method == config.method:
                    by_method[method].append(result.evaluation)
                else:
                    by_method[method].append(run_pipeline(pair, replace(config, method=method)).evaluation)

    statistics = method_statistics = None
    if evaluations:
        per_replicate, statistics = summarize_evaluations(evaluations, labels)
        writer.dataframe("evaluation.csv", per_replicate)
        writer.dataframe("evaluation_summary.csv", statistics)
        if by_method:
            method_statistics = summarize_methods(by_method, labels)
            writer.dataframe(METHODS_SUMMARY, method_statistics)
    else:
        writer.note(NO_TRUTH_NOTICE)

    manifest = writer.finish()
    return {
        "output_dir": str(writer.output_dir),
        "replicates": len(pairs),
        "evaluations": {label: e.to_dict() for label, e in zip(labels, evaluations)},
        "statistics": statistics,
        "method_statistics": method_statistics,
        "results": results,
        "files": writer.written,
        "manifest": manifest,
    }
