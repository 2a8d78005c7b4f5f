"""Command-line application: parser factory and dispatch.

Exit codes: 0 success, 1 assertion failure or missed truth, 2 usage or
contract violation, 3 capacity, 4 budget overflow, 5 quadrature failure.
"""

import argparse
import sys
import time
from typing import Optional, Sequence

from pydantic import ValidationError as SchemaError

from overlapix import __version__
from overlapix.cli.commands import COMMANDS
from overlapix.core.config import get_settings
from overlapix.core.exceptions import OverlapixError
from overlapix.core.logging import get_logger, setup_logging

logger = get_logger(__name__)

USAGE_EXIT = 2


def create_parser() -> argparse.ArgumentParser:
    """Build the parser with one subparser per registered command."""
    parser = argparse.ArgumentParser(
        prog="overlapix",
        description="Black-box overlap estimation driven by smoothed L1 norms",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True, metavar="COMMAND")
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def _fail(message: str, code: int) -> int:
    sys.stderr.write(f"overlapix: error: {message}\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the subcommand and return its exit code."""
    settings = get_settings()
    setup_logging(settings)
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    started = time.perf_counter()
    try:
        config = args.build_config(args)
        if getattr(args, "seed", None) is None:
            logger.warning("No seed given; drew one", seed=config.seed)
        logger.info(
            "Command dispatched",
            subcommand=config.subcommand.value,
            seed=config.seed,
            threads=settings.threads,
        )
        code = args.handler(config)
    except SchemaError as exc:
        logger.error("Invalid arguments", subcommand=args.subcommand, errors=exc.error_count())
        parser.print_usage(sys.stderr)
        return _fail(str(exc), USAGE_EXIT)
    except OverlapixError as exc:
        logger.error(
            "Command failed",
            subcommand=args.subcommand,
            error=exc.message,
            exit_code=exc.exit_code,
        )
        return _fail(exc.message, exc.exit_code)

    logger.info(
        "Command finished",
        subcommand=args.subcommand,
        exit_code=code,
        elapsed=f"{time.perf_counter() - started:.3f}s",
    )
    return code
