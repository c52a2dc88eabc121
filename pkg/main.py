#!/usr/bin/env python3
import argparse
import logging
import sys
from typing import List, Optional

from src import __version__
from src.core.exceptions import ConfigError, InvariantError, WeylLabError
from src.orchestration.experiment_runner import ExperimentRunner
from src.persistence.report_writer import ReportWriter
from src.utils.config_loader import ExperimentConfig, load_config
from src.utils.workload_estimator import WorkloadEstimator

SUBCOMMANDS = {
    "verify": "Run the invariant suite of every module.",
    "norm-sweep": "Operator norms of Op(a) on the perturbed weighted space across the h grid.",
    "gevrey-fit": "Fit the windowed Fourier decay of test symbols to A exp(-r^rho / C).",
    "decomp-check": "Compare the direct, superposition and rank-one quantization routes.",
    "compose": "Evaluate a#b on a point list by the direct and the Fourier routes.",
}


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parses command-line arguments."""
    parser = argparse.ArgumentParser(description="Weighted Bargmann space Weyl calculus lab")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="experiment", required=True)
    for name, help_text in SUBCOMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("--config", type=str, default=None, help="Path to a sectioned key = value config file.")
        sub.add_argument("--out", type=str, default=None, help="Output directory for the CSV and JSON report.")
        sub.add_argument("--seed", type=int, default=None, help="Seed for random draws (default from config, else 0).")
        sub.add_argument("--threads", type=int, default=None, help="Worker threads over independent h values.")
        sub.add_argument("--log-level", type=str, default=None, help="DEBUG, INFO, WARNING or ERROR.")
        sub.add_argument("--skip-estimate", action="store_true", help="Do not print the workload estimate.")
    return parser.parse_args(argv)


def build_run_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {
        "experiment": args.experiment,
        "out_dir": args.out,
        "seed": args.seed,
        "threads": args.threads,
        "log_level": args.log_level,
    }
    return load_config(args.config, overrides)


def print_estimate(config: ExperimentConfig) -> None:
    estimate = WorkloadEstimator().estimate(config)
    print("\n--- Workload Estimate ---")
    print(f"Estimated kernel evaluations: {estimate['total_evaluations']:,}")
    print(f"Estimated wall time (one core): {estimate['estimated_seconds']:.1f} s")
    for item in estimate["estimates"]:
        print(f"  {item.operation_name}: {item.evaluations:,} ({item.estimated_seconds:.2f} s)")


def print_summary(report) -> None:
    print(f"\n--- {report['provenance']['experiment']} Summary ---")
    for key, value in report["summary"].items():
        print(f"{key}: {value}")
    if report["warnings"]:
        print(f"\n{len(report['warnings'])} warning(s) recorded:")
        for message in report["warnings"]:
            print(f"  - {message}")


def main_cli(argv: Optional[List[str]] = None) -> int:
    """Main CLI function; returns the process exit code."""
    args = parse_arguments(argv)
    try:
        config = build_run_config(args)
    except ConfigError as e:
        print(f"Error: {e}")
        return e.exit_code

    logging.basicConfig(level=getattr(logging, config.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    print(f"\n--- {config.experiment} Setup ---")
    print(f"Weight: {config.weight}, h grid: {config.h_grid}, N={config.N}, M={config.M}, R={config.R}")
    print(f"s={config.s}, C={config.C}, seed={config.seed}, threads={config.threads}")
    if not args.skip_estimate:
        print_estimate(config)

    print(f"\nINFO: Running {config.experiment}...")
    try:
        report = ExperimentRunner(config).run()
        paths = ReportWriter(config.out_dir).write(report)
    except WeylLabError as e:
        print(f"\n--- {config.experiment} Failed ---")
        print(f"Error: {e}")
        return e.exit_code

    print_summary(report)
    print(f"\nINFO: CSV written to {paths['csv']}")
    print(f"INFO: Report written to {paths['json']}")

    if config.experiment == "verify":
        failed = report["summary"]["failed_checks"]
        if failed:
            error = InvariantError(f"{len(failed)} invariant check(s) failed: {', '.join(failed)}")
            print(f"Error: {error}")
            return error.exit_code
        print("INFO: All invariant checks passed.")
    return 0


if __name__ == "__main__":
    sys.exit(main_cli())
