"""Argument types and option groups shared by the subcommands."""

import argparse
from typing import List


def int_list(text: str) -> List[int]:
    """Parse ``"2,4,6"``."""
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def float_list(text: str) -> List[float]:
    """Parse ``"0.05,0.1,0.2"``."""
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def add_run_options(parser: argparse.ArgumentParser, delta: bool = True) -> None:
    """--seed, --output, --format (and --delta) with the RunConfig defaults."""
    if delta:
        parser.add_argument("--delta", type=float, default=0.05, help="failure probability (default 0.05)")
    parser.add_argument("--seed", type=int, default=None, help="master seed; random and logged when absent")
    parser.add_argument("--output", default=None, help="output path (stdout when absent)")
    parser.add_argument("--format", choices=["json", "csv"], default="json", help="output format")
