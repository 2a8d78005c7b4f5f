"""``estimate``: one fidelity estimate of a pure target against a simulated black box."""

import argparse
from typing import Optional

from overlapix.cli.arguments import add_run_options
from overlapix.cli.output import emit
from overlapix.core.exceptions import CapacityError, ContractViolation, PreconditionError, QuadratureError
from overlapix.core.logging import get_logger
from overlapix.models.wigner import StateKind, WignerEvaluator
from overlapix.schemas.run_config import RunConfig, Subcommand
from overlapix.services.cv_states import overlap_quadrature, spike_fidelity
from overlapix.services.dv_states import fidelity_pauli_exact
from overlapix.services.estimator import estimate_fidelity_pauli, estimate_fidelity_wigner, make_blackbox
from overlapix.services.states import build_state

logger = get_logger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "estimate",
        help="estimate F(target, sigma) from simulated measurements on sigma",
    )
    parser.add_argument("--target", required=True, help="pure target state descriptor")
    parser.add_argument("--sigma", required=True, help="descriptor of the state inside the black box")
    parser.add_argument("--eps", type=float, required=True, help="additive error in (0, 1)")
    parser.add_argument("--rule", choices=["l1", "l2"], default="l1", help="sampling rule (l2: tables only)")
    add_run_options(parser)
    parser.set_defaults(build_config=build_config, handler=run)


def build_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=Subcommand.ESTIMATE,
        target=args.target,
        sigma=args.sigma,
        epsilon=args.eps,
        delta=args.delta,
        seed=args.seed,
        rule=args.rule,
        output=args.output,
        format=args.format,
    )


def _wigner_truth(target: WignerEvaluator, sigma: WignerEvaluator) -> Optional[float]:
    """Closed-form spike overlaps first, quadrature otherwise; None when neither applies."""
    if target.kind is StateKind.SPIKE:
        try:
            return spike_fidelity(target.n, sigma)
        except ContractViolation:
            pass
    try:
        return overlap_quadrature(target, sigma)
    except (CapacityError, PreconditionError, QuadratureError) as exc:
        logger.warning("No fidelity oracle", target=target.label, sigma=sigma.label, reason=str(exc))
        return None


def run(config: RunConfig) -> int:
    """Write the EstimationReport; exit 1 when a known truth is missed by more than epsilon."""
    if config.format != "json":
        raise PreconditionError("estimate reports are written as JSON")
    target = build_state(config.target, default_seed=config.seed)
    sigma = build_state(config.sigma, default_seed=config.seed)
    if isinstance(target, WignerEvaluator) != isinstance(sigma, WignerEvaluator):
        raise ContractViolation("target and sigma must both be CV states or both qubit states")

    box = make_blackbox(sigma, seed=config.seed)
    if isinstance(target, WignerEvaluator):
        if config.rule != "l1":
            raise ContractViolation("the L2-proportional rule is offered for characteristic tables only")
        report = estimate_fidelity_wigner(
            target, box, config.epsilon, config.delta, truth=_wigner_truth(target, sigma)
        )
    else:
        report = estimate_fidelity_pauli(
            target,
            box,
            config.epsilon,
            config.delta,
            truth=fidelity_pauli_exact(target, sigma),
            rule=config.rule,
        )

    emit(report.to_json(), config.output)
    if report.within_eps is False:
        logger.error(
            "Estimate missed the truth",
            estimate=report.estimate,
            truth=report.truth,
            epsilon=config.epsilon,
            seed=config.seed,
        )
        return 1
    return 0
