"""``sweep``: run one experiment family over a grid."""

import argparse

from overlapix.cli.arguments import add_run_options, float_list, int_list
from overlapix.cli.output import emit_sweep
from overlapix.schemas.run_config import RunConfig, Subcommand
from overlapix.schemas.sweep import SweepFamily, SweepSpec
from overlapix.services.experiments import ExperimentService


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "sweep",
        help="run an experiment family and check its assertions",
        description="Exit status 0 when every assertion passes, 1 otherwise. "
        "--output STEM writes STEM.csv and STEM.json.",
    )
    parser.add_argument("--family", required=True, choices=[f.value for f in SweepFamily])
    parser.add_argument("--n", type=int_list, default=[], help="n (or t) grid, e.g. 2,4,6")
    parser.add_argument("--eps", type=float, default=0.1, help="additive error (default 0.1)")
    parser.add_argument("--eps-list", type=float_list, default=[], help="epsilon grid (gaussian, witness)")
    parser.add_argument("--trials", type=int, default=100, help="trials per scenario (>= 100)")
    parser.add_argument("--draws", type=int, default=20, help="Haar draws per n (>= 20)")
    parser.add_argument("--targets", type=lambda s: s.split(";"), default=[], help="witness targets, ';'-separated")
    add_run_options(parser)
    parser.set_defaults(build_config=build_config, handler=run)


def build_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=Subcommand.SWEEP,
        family=args.family,
        n=args.n,
        epsilon=args.eps,
        eps_list=args.eps_list,
        delta=args.delta,
        trials=args.trials,
        draws=args.draws,
        targets=args.targets,
        seed=args.seed,
        output=args.output,
        format=args.format,
    )


def spec_from_config(config: RunConfig) -> SweepSpec:
    return SweepSpec(
        family=SweepFamily(config.family),
        n_list=config.n,
        epsilon=config.epsilon if config.epsilon is not None else 0.1,
        eps_list=config.eps_list,
        delta=config.delta,
        trials=config.trials,
        draws=config.draws,
        targets=config.targets,
        seed=config.seed,
    )


def run(config: RunConfig) -> int:
    result = ExperimentService().run(spec_from_config(config))
    return emit_sweep(result, config)
