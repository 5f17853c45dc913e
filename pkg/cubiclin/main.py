#!/usr/bin/env python3
"""
cubiclin - properness analysis of cubic-linear maps

This is the main entry point for the cubiclin CLI application.
"""

import os
import sys
import argparse
import logging
from typing import Any, Dict, List, Optional

from . import __version__
from .errors import CubicLinError, IterationBudgetExceeded, NonConvergent
from .core.analyzer import MatrixAnalyzer, probe_settings_from_config
from .family.classz import certify_class_z, refute_classz_properness
from .family.construct import SpecialFamilyParams, reference_instance, reference_params, sample_family
from .maps.classes import druzkowski_test
from .properness.criterion import Refusal
from .properness.structure import find_certificate
from .properness.witness import decay_csv, decay_table
from .utils.config import ConfigManager, ProfileManager
from .utils.serialization import atomic_write, dump_json, load_matrix, matrix_to_dict

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ITERATION = 2

FAMILY_ALIASES = {"instance": "paper-instance", "refute": "refute-claim1"}


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments

    Args:
        argv: Argument list (defaults to sys.argv)

    Returns:
        Parsed arguments
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", default="config.cfg", help="Path to configuration file")
    common.add_argument("-p", "--profile", help="Use a profile (e.g., 'quick', 'thorough')")
    common.add_argument("--save-profile", help="Save current settings as a new profile with the specified name")
    common.add_argument("--seed", type=int, help="Random seed (falls back to $CUBICLIN_SEED, then the config)")
    common.add_argument("-o", "--out", help="Write output to this file instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="Log debug messages to stderr")

    parser = argparse.ArgumentParser(
        prog="cubiclin",
        description="cubiclin - properness analysis of cubic-linear maps x + (Ax)^3",
        epilog="Example: cubiclin analyze matrix.json --out report.json",
    )
    parser.add_argument("--version", action="version", version=f"cubiclin {__version__}")
    parser.add_argument("--list-profiles", action="store_true", help="List all available profiles")
    commands = parser.add_subparsers(dest="command")

    analyze = commands.add_parser("analyze", parents=[common], help="Full analysis of a matrix")
    analyze.add_argument("matrix", help="Matrix JSON file")
    mode = analyze.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="Only exact candidate directions")
    mode.add_argument("--tol", type=float, help="Also accept numeric candidates within this tolerance")
    analyze.add_argument("--trials", type=int, help="Druzkowski test trials")
    analyze.add_argument("--progress", action="store_true", help="Show a progress bar on stderr")
    analyze.add_argument("--no-timings", action="store_true", help="Leave timings out of the report")

    witness = commands.add_parser("witness", parents=[common], help="Decay table of a non-properness witness")
    witness.add_argument("matrix", help="Matrix JSON file")
    witness.add_argument("--gammas", help="Comma-separated gamma values, e.g. 10,100,1000")
    witness.add_argument("--csv", help="Write the CSV to this file")

    family = commands.add_parser("family", help="The constructible family of 3x3 matrices")
    family_commands = family.add_subparsers(dest="family_command")
    sample = family_commands.add_parser("sample", parents=[common], help="Sample family members")
    sample.add_argument("--count", type=int, default=1, help="Number of samples")
    sample.add_argument("--special", action="store_true", help="Only the row3 = row1 members")
    family_commands.add_parser("paper-instance", aliases=["instance"], parents=[common],
                               help="The worked instance with alpha = 5")
    certify = family_commands.add_parser("certify", parents=[common], help="Class-Z certificate of a matrix")
    certify.add_argument("matrix", help="Matrix JSON file")
    refute = family_commands.add_parser("refute-claim1", aliases=["refute"], parents=[common],
                                        help="Class-Z matrix with a non-proper map, fully certified")
    refute.add_argument("--probe", action="store_true", help="Also run the numeric class-Z probe")

    args = parser.parse_args(argv)
    if not args.list_profiles and args.command is None:
        parser.error("a command is required")
    if args.command == "family" and args.family_command is None:
        family.error("a family command is required")
    if args.command == "family":
        args.family_command = FAMILY_ALIASES.get(args.family_command, args.family_command)
    return args


def list_available_profiles():
    """Print a list of all available profiles"""
    profile_manager = ProfileManager()
    profiles = profile_manager.list_profiles()

    if not profiles:
        print("\nNo profiles found.")
        print(f"Profiles directory: {os.path.abspath(profile_manager.profile_dir)}")
        return

    print("\nAvailable Profiles:")
    print("-------------------")
    for profile_name in profiles:
        info = profile_manager.get_profile_info(profile_name)
        description = info.get("description", "No description available")
        print(f"{profile_name}: {description}")

    print("\nUse with --profile option (e.g., --profile quick)")


def load_config(args: argparse.Namespace) -> ConfigManager:
    """Configuration file, then profile, then command-line flags"""
    config = ConfigManager(args.config if os.path.exists(args.config) else None)
    if args.profile:
        if ProfileManager().apply_profile(args.profile, config):
            logger.info("Using profile: %s", args.profile)
        else:
            logger.warning("Profile '%s' not found. Using configuration without it.", args.profile)
    update_config_from_args(config, args)
    if args.save_profile:
        path = ProfileManager().save_profile(args.save_profile, config)
        print(f"Profile '{args.save_profile}' saved to {path}", file=sys.stderr)
    return config


def update_config_from_args(config: ConfigManager, args: argparse.Namespace):
    """Update configuration based on command-line arguments"""
    if getattr(args, "exact", False):
        config.set_value("ANALYSIS", "exact", "true")
    if getattr(args, "tol", None) is not None:
        config.set_value("ANALYSIS", "exact", "false")
        config.set_value("ANALYSIS", "tolerance", args.tol)
    if getattr(args, "trials", None) is not None:
        config.set_value("DRUZKOWSKI", "trials", args.trials)
    if getattr(args, "no_timings", False):
        config.set_value("ANALYSIS", "timings", "false")
    if getattr(args, "gammas", None):
        config.set_value("WITNESS", "gammas", args.gammas)


def print_progress_bar(progress: float, status: str = ""):
    """Print a progress bar to stderr"""
    width = 40
    filled = int(width * progress / 100)
    bar = '#' * filled + '-' * (width - filled)
    print(f"\r[{bar}] {progress:.1f}% {status}", end='', flush=True, file=sys.stderr)
    if progress >= 100:
        print(file=sys.stderr)


def emit(text: str, path: Optional[str]):
    """Write machine output to ``path`` atomically, or to stdout"""
    if path:
        atomic_write(path, text)
    else:
        sys.stdout.write(text)


def run_analyze(args, config: ConfigManager) -> int:
    A = load_matrix(args.matrix)
    analyzer = MatrixAnalyzer(config, args.seed)
    if args.progress:
        analyzer.set_progress_callback(print_progress_bar)
    report = analyzer.analyze(A)
    emit(dump_json(report.to_dict(), config.get_int("OUTPUT", "indent")), args.out)
    return EXIT_OK


def run_witness(args, config: ConfigManager) -> int:
    A = load_matrix(args.matrix)
    gammas = config.get_fraction_list("WITNESS", "gammas")
    cert = find_certificate(A, count=config.get_int("WITNESS", "randomized_candidates"),
                            seed=config.seed(args.seed), tolerance=config.get_float("ANALYSIS", "tolerance"))
    if isinstance(cert, Refusal):
        print(f"Error: no non-properness certificate found ({cert.detail})", file=sys.stderr)
        return EXIT_ITERATION
    emit(decay_csv(decay_table(cert, gammas, config.workers())), args.csv or args.out)
    return EXIT_OK


def _family_report(A, config: ConfigManager, seed: int) -> Dict[str, Any]:
    """{params, matrix, alpha, certificates, druzkowski} for one matrix"""
    class_z = certify_class_z(A)
    nonproper = find_certificate(A, seed=seed)
    params = None
    alpha = None
    if not isinstance(class_z, Refusal):
        alpha = str(class_z.alpha)
        rows = A.rows
        params = SpecialFamilyParams(*rows[0], *rows[1]).to_dict()
    druzkowski = druzkowski_test(A, config.get_int("DRUZKOWSKI", "trials"), seed,
                                 config.get_int("DRUZKOWSKI", "sample_bound"))
    return {
        "params": params,
        "matrix": matrix_to_dict(A),
        "alpha": alpha,
        "certificates": {"classZ": class_z.to_dict(), "nonproperness": nonproper.to_dict()},
        "druzkowski": druzkowski.to_dict(),
    }


def run_family(args, config: ConfigManager) -> int:
    seed = config.seed(args.seed)
    indent = config.get_int("OUTPUT", "indent")

    if args.family_command == "sample":
        samples = sample_family(args.count, seed, args.special,
                                config.get_int("FAMILY", "sample_bound"), config.get_int("FAMILY", "max_retries"))
        data = {
            "seed": seed,
            "count": args.count,
            "special_only": args.special,
            "samples": [s.to_dict() for s in samples],
        }
        emit(dump_json(data, indent), args.out)
        return EXIT_OK

    if args.family_command == "paper-instance":
        A, alpha = reference_instance()
        data = {"params": reference_params().to_dict(), "matrix": matrix_to_dict(A), "alpha": str(alpha)}
        emit(dump_json(data, indent), args.out)
        return EXIT_OK

    if args.family_command == "certify":
        A = load_matrix(args.matrix)
        report = _family_report(A, config, seed)
        emit(dump_json(report, indent), args.out)
        if "refusal" in report["certificates"]["classZ"]:
            print(f"Error: class-Z certification refused: {report['certificates']['classZ']['detail']}",
                  file=sys.stderr)
            return EXIT_INPUT
        return EXIT_OK

    probe_settings = probe_settings_from_config(config, config.workers()) if args.probe else None
    report = refute_classz_properness(
        gammas=config.get_fraction_list("WITNESS", "gammas"),
        decay_gammas=config.get_fraction_list("WITNESS", "decay_gammas"),
        line_ts=config.get_list("WITNESS", "line_ts"),
        trials=config.get_int("DRUZKOWSKI", "trials"),
        seed=seed,
        probe_settings=probe_settings,
        workers=config.workers(),
    )
    emit(dump_json(report.to_dict(), indent), args.out)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the application"""
    args = parse_arguments(argv)

    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    if args.list_profiles:
        list_available_profiles()
        return EXIT_OK

    try:
        config = load_config(args)
        if args.command == "analyze":
            return run_analyze(args, config)
        if args.command == "witness":
            return run_witness(args, config)
        return run_family(args, config)
    except (NonConvergent, IterationBudgetExceeded) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ITERATION
    except (CubicLinError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
