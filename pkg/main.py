"""
Composite diffusion experiments: common and difference structure of two
corresponded views.

This is the main entry point for the command-line experiments.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from config.experiment import BaseConfig, apply_overrides, load_config
from config.settings import settings
from experiments.embed import run_embed
from experiments.fecg import run_fecg
from experiments.planted import run_planted
from experiments.shapes import run_shapes
from utils.errors import CompositeDiffusionError
from utils.log import configure_logging

logger = logging.getLogger(__name__)


def banner(title: str) -> None:
    print("\n" + "=" * 70)
    print(title)
    print("=" * 70 + "\n")


def validate_environment() -> bool:
    """Report problems with the environment-driven settings."""
    problems = settings.validate()
    if problems:
        print("\nERROR: Invalid settings!")
        for problem in problems:
            print(f"  - {problem}")
        print("\nCheck the values in your .env file.")
        return False
    return True


def cmd_shapes(config: BaseConfig, progress: bool, emit: bool) -> Dict[str, Any]:
    banner("SHAPES: sphere vs. scaled sphere with a bump")
    print(f"Samples: {config.n}  Scale: {config.alpha}  Bump height: {config.bump_height}")
    print(f"Operator variant: {config.operator}\n")

    summary = run_shapes(config, emit)

    print(f"Points in bump: {summary['bump_points']}")
    print(f"Difference embedding: {summary['difference_status']}")
    if summary["mask_energy_fraction"] is not None:
        fractions = ", ".join(f"{f:.3f}" for f in summary["mask_energy_fraction"])
        print(f"Bump energy per difference column: {fractions}")
    if summary["point_biserial_first"] is not None:
        print(
            f"Common column {summary['point_biserial_column']} vs. bump (point-biserial): "
            f"{summary['point_biserial_first']:+.3f}"
        )
    if summary["alternating_norm_ratio"] is not None:
        print(f"Alternating-diffusion difference / A (spectral norm): {summary['alternating_norm_ratio']:.3f}")
    return summary


def cmd_planted(config: BaseConfig, progress: bool, emit: bool) -> Dict[str, Any]:
    banner("PLANTED: rank of A against the 2m bound")
    print(f"Samples: {config.n}  Planted differences: {config.m}\n")

    summary = run_planted(config, emit)

    print(f"Difference indices: {summary['diff_indices']}")
    print(f"Numerical rank: {summary['numerical_rank']}  Bound: {summary['bound']}")
    print(f"Max |A| off the difference rows/columns: {summary['off_block_max']:.3e}")
    print(f"Result: {'PASS' if summary['passed'] else 'FAIL'}")
    return summary


def cmd_fecg(config: BaseConfig, progress: bool, emit: bool) -> Dict[str, Any]:
    banner("FECG: fetal beats from the difference operator")
    if config.signal_path:
        print(f"Input: {config.signal_path} at {config.fs} Hz")
    else:
        print(f"Synthetic replicates: {config.replicates} ({config.duration_s} s at {config.fs} Hz)")
    print(f"Operator variant: {config.operator}")
    print(f"Method: {config.method} ({settings.ECG_METHODS[config.method]['description']})\n")

    summary = run_fecg(config, progress=progress, emit=emit)

    for label, result in summary["results"].items():
        diagnostics = result.diagnostics
        print(
            f"[{label}] maternal ~{diagnostics['maternal_hz_median']:.2f} Hz, "
            f"fetal ~{diagnostics['fetal_hz_median']:.2f} Hz, {diagnostics['n_beats']} beats"
        )

    if summary["statistics"] is not None:
        print("\nBEAT DETECTION:")
        print("=" * 70)
        print(summary["statistics"].to_string())
        if summary["method_statistics"] is not None:
            print("\nMETHODS:")
            print("=" * 70)
            print(summary["method_statistics"].to_string())
    else:
        print("\nNo ground truth: evaluation skipped")
    return summary


def cmd_embed(config: BaseConfig, progress: bool, emit: bool) -> Dict[str, Any]:
    banner("EMBED: common and difference embeddings")
    print(f"Views: {config.view1_path}, {config.view2_path}")
    print(f"Operator variant: {config.operator}  Dimension: {config.embedding_dim}\n")

    summary = run_embed(config, emit)

    print(f"Samples: {summary['n']}")
    print(f"Difference embedding: {summary['difference_status']}")
    return summary


COMMANDS: Dict[str, Callable[[BaseConfig, bool, bool], Dict[str, Any]]] = {
    "shapes": cmd_shapes,
    "planted": cmd_planted,
    "fecg": cmd_fecg,
    "embed": cmd_embed,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="KEY=VALUE configuration file")
    common.add_argument("--out", type=str, help="Output directory")
    common.add_argument("--seed", type=int, help="Random seed")
    common.add_argument("--operator", choices=sorted(settings.OPERATOR_VARIANTS), help="Operator variant")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--emit-config", action="store_true", help="Write the effective config as config.env")
    common.add_argument("--progress", action="store_true", help="Show progress bars")

    parser = argparse.ArgumentParser(description="Composite diffusion experiments")
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("shapes", parents=[common], help="Sphere vs. bumped sphere")
    subparsers.add_parser("planted", parents=[common], help="Rank/support check on a planted pair")
    subparsers.add_parser("fecg", parents=[common], help="Fetal ECG beat extraction")
    subparsers.add_parser("embed", parents=[common], help="Embeddings of two CSV point clouds")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return the exit code."""
    args = build_parser().parse_args(argv)
    configure_logging("DEBUG" if args.verbose else None)

    if not validate_environment():
        return 2

    try:
        config = load_config(args.command, args.config)
        config = apply_overrides(config, seed=args.seed, operator=args.operator, out=args.out)

        summary = COMMANDS[args.command](config, args.progress, args.emit_config)

    except CompositeDiffusionError as e:
        print(f"\nERROR: {e}", file=sys.stderr)
        return e.exit_code

    print(f"\nResults saved to: {summary['output_dir']}")
    print(f"Files: {', '.join(summary['files'])}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
