"""``witness``: adversarial witnesses and the lower/upper budget sandwich."""

import argparse

from overlapix.cli.arguments import add_run_options, float_list
from overlapix.cli.output import emit_sweep
from overlapix.schemas.run_config import RunConfig, Subcommand
from overlapix.services.experiments import ExperimentService


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "witness",
        help="build adversarial witnesses for fock, ghz or haar targets",
    )
    parser.add_argument(
        "--target", action="append", required=True, dest="targets", help="target descriptor (repeatable)"
    )
    parser.add_argument("--eps-list", type=float_list, required=True, help="epsilon grid, e.g. 0.05,0.1,0.15")
    add_run_options(parser)
    parser.set_defaults(build_config=build_config, handler=run)


def build_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=Subcommand.WITNESS,
        targets=args.targets,
        eps_list=args.eps_list,
        delta=args.delta,
        seed=args.seed,
        output=args.output,
        format=args.format,
    )


def run(config: RunConfig) -> int:
    result = ExperimentService().run_adversarial_witness(
        config.targets, config.eps_list, seed=config.seed, delta=config.delta
    )
    return emit_sweep(result, config)
