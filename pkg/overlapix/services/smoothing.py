"""Smoothed L1-norm machinery.

Threshold truncations f~ = f * 1{|f| >= c*}, the epsilon-prime budget search,
the two-branch adversarial witness, tail-decay certificates and the lower
bounds that go with them.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from overlapix.core.config import get_settings
from overlapix.core.exceptions import ContractViolation, PreconditionError
from overlapix.core.logging import get_logger
from overlapix.models.measured import MeasuredFunction, NodalFunction
from overlapix.models.pauli import CharacteristicTable
from overlapix.models.truncation import TruncatedFunction
from overlapix.models.wigner import WignerEvaluator
from overlapix.services.cv_states import discretize
from overlapix.services.dv_states import table_function

logger = get_logger(__name__)

FunctionLike = Union[MeasuredFunction, CharacteristicTable, WignerEvaluator]

STABILITY_FACTOR = 2.0


def as_measured(f: FunctionLike) -> MeasuredFunction:
    """Wrap tables and Wigner evaluators as measured functions."""
    if isinstance(f, MeasuredFunction):
        return f
    if isinstance(f, CharacteristicTable):
        return table_function(f)
    if isinstance(f, WignerEvaluator):
        return discretize(f)
    raise ContractViolation(f"cannot measure object of type {type(f).__name__}")


def _bisect_threshold(f: MeasuredFunction, eps_sq: float) -> float:
    """Largest c on [0, bound] with sublevel mass <= eps^2, to relative tolerance."""
    settings = get_settings()
    lo, hi = 0.0, f.bound
    for _ in range(settings.bisection_max_iter):
        mid = 0.5 * (lo + hi)
        if f.sublevel_sq_mass(mid) <= eps_sq:
            lo = mid
        else:
            hi = mid
        if hi - lo <= settings.bisection_rel_tol * hi:
            break
    return lo


def truncate(f: FunctionLike, epsilon: float) -> TruncatedFunction:
    """Feasible witness f~ with ||f - f~||_2 <= epsilon and minimal kept mass.

    Args:
        f: Table, Wigner evaluator or already discretised function
        epsilon: Allowed L2 distance, positive

    Returns:
        The truncation; degenerate (zero function) when epsilon >= ||f||_2
    """
    if not epsilon > 0:
        raise PreconditionError(f"epsilon must be positive, got {epsilon}")
    mf = as_measured(f)
    eps_sq = epsilon * epsilon
    total_sq = mf.l2_squared()

    if eps_sq >= total_sq:
        result = TruncatedFunction(mf, epsilon, math.inf, 0.0, math.sqrt(total_sq))
    else:
        c_star = _bisect_threshold(mf, eps_sq)
        c_star = mf.snap_threshold(c_star, eps_sq)
        result = TruncatedFunction(
            source=mf,
            epsilon=epsilon,
            c_star=c_star,
            l1_tilde=mf.superlevel_l1(c_star),
            l2_residual=math.sqrt(mf.sublevel_sq_mass(c_star)),
        )

    logger.info(
        "Truncation computed",
        domain=mf.domain.value,
        epsilon=epsilon,
        c_star=result.c_star,
        l1_tilde=result.l1_tilde,
        l2_residual=result.l2_residual,
        degenerate=result.degenerate,
    )
    return result


def sample_budget(r: float, l1: float, gap: float, delta: float) -> int:
    """N = ceil(2 (r l1 / gap)^2 ln(1/delta))."""
    if l1 == 0.0:
        return 0
    return math.ceil(2.0 * (r * l1 / gap) ** 2 * math.log(1.0 / delta))


class BudgetPlan(NamedTuple):
    eps_prime: float
    plan_l1: float
    n_samples: int
    truncation: TruncatedFunction


def _identity_truncation(mf: MeasuredFunction) -> TruncatedFunction:
    return TruncatedFunction(mf, 0.0, 0.0, mf.l1(), 0.0)


def budget_optimize(
    f: FunctionLike,
    epsilon: float,
    delta: float,
    r: Optional[float] = None,
) -> BudgetPlan:
    """Minimise N(eps') over the configured grid of fractions of epsilon.

    Ties keep the smallest eps'. ``r`` defaults to the sup bound of the
    function's measurement outcomes.
    """
    if not epsilon > 0 or not 0 < delta < 1:
        raise PreconditionError("need epsilon > 0 and delta in (0, 1)")
    settings = get_settings()
    mf = as_measured(f)
    r = mf.bound if r is None else r

    best: Optional[BudgetPlan] = None
    for fraction in settings.eps_prime_fractions:
        eps_prime = fraction * epsilon
        trunc = _identity_truncation(mf) if eps_prime == 0 else truncate(mf, eps_prime)
        n_samples = sample_budget(r, trunc.l1_tilde, epsilon - eps_prime, delta)
        if best is None or n_samples < best.n_samples:
            best = BudgetPlan(eps_prime, trunc.l1_tilde, n_samples, trunc)

    logger.info(
        "Budget optimised",
        epsilon=epsilon,
        delta=delta,
        eps_prime=best.eps_prime,
        plan_l1=best.plan_l1,
        n_samples=best.n_samples,
    )
    return best


@dataclass(frozen=True, eq=False)
class AdversarialWitness:
    """The function g of the constructive witness on the nodes of ``source``.

    ``pairing`` is the integral of f g; ``l2`` and ``linf`` are the norms
    of g. Branch "tail" normalises the small values of f; branch "bulk"
    is the scaled sign of f on the kept set.
    """

    source: NodalFunction
    epsilon: float
    branch: str
    values: np.ndarray
    c_star: float
    l1_tilde: float
    pairing: float
    l2: float
    linf: float
    evaluate: Callable[[np.ndarray], np.ndarray]

    @property
    def linf_cap(self) -> float:
        return self.epsilon / self.l1_tilde

    def properties_hold(self, tol: float = 1e-6) -> bool:
        return (
            self.pairing >= self.epsilon - tol
            and self.l2 <= 1.0 + tol
            and self.linf <= self.linf_cap + tol
        )


def adversarial_g(f: FunctionLike, epsilon: float) -> AdversarialWitness:
    """Build g with integral(f g) >= eps, ||g||_2 <= 1 and ||g||_inf <= eps / ||f~||_1.

    Raises:
        PreconditionError: epsilon >= ||f||_2
        ContractViolation: f has no nodal discretisation
    """
    mf = as_measured(f)
    if not isinstance(mf, NodalFunction):
        raise ContractViolation("the adversarial witness is built on nodal functions only")
    if not 0 < epsilon < mf.l2():
        raise PreconditionError(f"epsilon {epsilon:g} must lie in (0, ||f||_2 = {mf.l2():.6g})")

    trunc = truncate(mf, epsilon)
    cutoff = epsilon * epsilon / trunc.l1_tilde
    magnitude = np.abs(mf.values)

    if trunc.c_star < cutoff:
        branch = "tail"
        h = np.where(magnitude < cutoff, mf.values, 0.0)
        h_norm = math.sqrt(float(np.sum(mf.weights * h * h)))
        values = h / h_norm

        def evaluate(points: np.ndarray) -> np.ndarray:
            v = mf.evaluate(points)
            return np.where(np.abs(v) < cutoff, v, 0.0) / h_norm

    else:
        branch = "bulk"
        scale = epsilon / trunc.l1_tilde
        c_star = trunc.c_star
        values = np.where(magnitude >= c_star, scale * np.sign(mf.values), 0.0)

        def evaluate(points: np.ndarray) -> np.ndarray:
            v = mf.evaluate(points)
            return np.where(np.abs(v) >= c_star, scale * np.sign(v), 0.0)

    witness = AdversarialWitness(
        source=mf,
        epsilon=epsilon,
        branch=branch,
        values=values,
        c_star=trunc.c_star,
        l1_tilde=trunc.l1_tilde,
        pairing=float(np.sum(mf.weights * mf.values * values)),
        l2=math.sqrt(float(np.sum(mf.weights * values * values))),
        linf=float(np.max(np.abs(values))),
        evaluate=evaluate,
    )
    logger.info(
        "Adversarial witness built",
        branch=branch,
        epsilon=epsilon,
        pairing=witness.pairing,
        l2=witness.l2,
        linf=witness.linf,
    )
    return witness


class TailCertificate(NamedTuple):
    kappa_hat: float
    passed: bool
    refined_kappa: float
    ratios: List[float]


def _kappa(mf: MeasuredFunction, omega0_radius: float, gamma: float, deltas: Sequence[float]) -> List[float]:
    return [mf.tail_l1(d, omega0_radius) / d**gamma for d in deltas]


def tail_decay_certificate(
    f: FunctionLike,
    omega0_radius: float,
    gamma: float,
    delta_grid: Sequence[float],
) -> TailCertificate:
    """Empirical constant kappa of a tail of order gamma outside Omega_0.

    The certificate passes when kappa_hat is finite and the maximum over a
    refined delta grid (geometric midpoints added) stays within a factor two.
    """
    deltas = [float(d) for d in delta_grid]
    if not deltas or any(d <= 0 for d in deltas) or any(a <= b for a, b in zip(deltas, deltas[1:])):
        raise PreconditionError("delta grid must be positive and strictly decreasing")
    if not gamma > 0 or omega0_radius < 0:
        raise PreconditionError("need gamma > 0 and a nonnegative Omega_0 radius")

    mf = as_measured(f)
    ratios = _kappa(mf, omega0_radius, gamma, deltas)
    kappa_hat = max(ratios)
    midpoints = [math.sqrt(a * b) for a, b in zip(deltas, deltas[1:])]
    refined = max(ratios + _kappa(mf, omega0_radius, gamma, midpoints))

    passed = bool(
        math.isfinite(kappa_hat)
        and math.isfinite(refined)
        and refined <= STABILITY_FACTOR * kappa_hat
    )
    logger.info(
        "Tail certificate evaluated",
        omega0_radius=omega0_radius,
        gamma=gamma,
        kappa_hat=kappa_hat,
        refined_kappa=refined,
        passed=passed,
    )
    return TailCertificate(kappa_hat, passed, refined, ratios)


def smoothed_l1_lower_bound(l1: float, kappa: float, gamma: float, omega0_measure: float, epsilon: float) -> float:
    """||f||_1 - 2 kappa^{1/(1+gamma)} eps^{gamma/(gamma+1)} - eps sqrt(mu(Omega_0)).

    Not clamped; callers clamp at zero.
    """
    if min(l1, kappa, omega0_measure, epsilon) < 0 or not gamma > 0:
        raise PreconditionError("inputs must be nonnegative and gamma positive")
    beta = gamma / (gamma + 1.0)
    kappa_prime = 2.0 * kappa ** (1.0 / (1.0 + gamma))
    return l1 - kappa_prime * epsilon**beta - epsilon * math.sqrt(omega0_measure)


def lower_bound_figure(r: float, l1_2eps: float, epsilon: float, delta: float) -> float:
    """(r ||f||_1^(2 eps) / (2 eps))^2 ln(1 / (3 delta)), the witness-implied sample figure."""
    if not 0 < delta < 1.0 / 3.0:
        raise PreconditionError("the lower-bound figure needs delta in (0, 1/3)")
    return (r * l1_2eps / (2.0 * epsilon)) ** 2 * math.log(1.0 / (3.0 * delta))
