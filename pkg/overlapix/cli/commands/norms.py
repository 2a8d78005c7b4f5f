"""``norms``: L1, L2 and sup norms of one state, optionally smoothed."""

import argparse
import csv
import io

from overlapix.cli.arguments import add_run_options
from overlapix.cli.output import emit
from overlapix.core.exceptions import PreconditionError
from overlapix.core.logging import get_logger
from overlapix.models.wigner import WignerEvaluator
from overlapix.schemas.report import NormsReport, round_floats
from overlapix.schemas.run_config import RunConfig, Subcommand
from overlapix.services.artifact_service import ArtifactService
from overlapix.services.cv_states import discretize, norms_quadrature
from overlapix.services.dv_states import char_table
from overlapix.services.smoothing import truncate
from overlapix.services.states import build_state

logger = get_logger(__name__)

FAMILIES = ["fock", "coherent", "spike", "ghz", "mixed", "haar"]


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "norms",
        help="print the norms of a Wigner function or characteristic table",
        description="Wigner norms are Lebesgue norms; table norms use the 1/d counting measure.",
    )
    parser.add_argument("--family", choices=FAMILIES, help="state family (with --n)")
    parser.add_argument("--n", type=int, help="Fock index, real coherent amplitude, spike index or qubit count")
    parser.add_argument("--state", help="full state descriptor, e.g. coherent:1,0 or mix:fock0=0.5,fock2=0.5")
    parser.add_argument("--eps", type=float, default=None, help="also report the smoothed L1 norm at this epsilon")
    add_run_options(parser, delta=False)
    parser.set_defaults(build_config=build_config, handler=run)


def build_config(args: argparse.Namespace) -> RunConfig:
    if args.state:
        target = args.state
    elif args.family and args.n is not None:
        target = f"{args.family}:{args.n}"
    else:
        raise PreconditionError("norms needs --state or --family together with --n")
    return RunConfig(
        subcommand=Subcommand.NORMS,
        target=target,
        epsilon=args.eps,
        seed=args.seed,
        output=args.output,
        format=args.format,
    )


def run(config: RunConfig) -> int:
    state = build_state(config.target, default_seed=config.seed)
    table = None
    smoothed = None
    if isinstance(state, WignerEvaluator):
        l1, l2, linf = norms_quadrature(state)
        if config.epsilon is not None:
            smoothed = truncate(discretize(state), config.epsilon).l1_lebesgue
        domain = "cv"
    else:
        table = char_table(state)
        l1, l2, linf = table.norms
        if config.epsilon is not None:
            smoothed = truncate(table, config.epsilon).l1_tilde
        domain = "dv"

    report = NormsReport(
        state=config.target,
        domain=domain,
        l1=l1,
        l2=l2,
        linf=linf,
        epsilon=config.epsilon,
        smoothed_l1=smoothed,
    )
    logger.info("Norms reported", state=config.target, l1=l1, l2=l2, linf=linf, smoothed_l1=smoothed)

    if config.format == "json":
        emit(report.to_json(), config.output)
    elif table is not None:
        emit(ArtifactService.table_csv(table), config.output)
    else:
        row = round_floats(report.model_dump(exclude={"schema_version"}))
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(row), lineterminator="\n")
        writer.writeheader()
        writer.writerow(row)
        emit(buffer.getvalue(), config.output)
    return 0
