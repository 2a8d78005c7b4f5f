"""Black-box overlap estimation.

A target function f is truncated to f~, points are drawn with density
|f~| / ||f~||_1, a simulated black box returns one +-r outcome per point,
and the mean of y ||f~||_1 sgn f~(lambda) estimates the integral of f g.
"""

import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid

from overlapix.core.config import get_settings
from overlapix.core.exceptions import (
    BudgetOverflowError,
    ContractViolation,
    PreconditionError,
)
from overlapix.core.logging import get_logger
from overlapix.models.measured import ClusteredFunction, Domain, NodalFunction
from overlapix.models.pauli import CharacteristicTable, StateModel
from overlapix.models.phase_space import SQRT2
from overlapix.models.truncation import TruncatedFunction
from overlapix.models.wigner import StateKind, WignerEvaluator
from overlapix.schemas.report import EstimationReport, SamplingPlanInfo
from overlapix.services.cv_states import discretize, spike_normalisation, wigner_eval
from overlapix.services.dv_states import char_table, table_function
from overlapix.services.smoothing import FunctionLike, as_measured, budget_optimize, sample_budget

logger = get_logger(__name__)

LAMBDA_STREAM = 1
OUTCOME_STREAM = 0
PURITY_TOL = 1e-9
FINE_GRID_FACTOR = 16


def derive_seed(master_seed: int, index: int) -> int:
    """Independent 31-bit seed for trial ``index`` of a run seeded with ``master_seed``."""
    state = np.random.SeedSequence([master_seed, index]).generate_state(1, dtype=np.uint32)
    return int(state[0] >> 1)


@dataclass(eq=False)
class BlackBoxSampler:
    """Simulated measurement device: at lambda it emits +r with probability (1 + g/r) / 2.

    ``g`` is vectorised over an array of points (CV) or Pauli indices (DV).
    """

    g: Callable[[np.ndarray], np.ndarray]
    r: float
    seed: int
    domain: Domain
    label: str = ""
    rng: np.random.Generator = field(init=False)

    def __post_init__(self):
        if not self.r > 0:
            raise ContractViolation("outcome magnitude r must be positive")
        self.rng = np.random.default_rng([self.seed, OUTCOME_STREAM])

    def mean(self, lam: np.ndarray) -> np.ndarray:
        """g(lambda), with values in (r, r + window] clamped to r."""
        values = np.atleast_1d(np.asarray(self.g(lam), dtype=float))
        excess = np.abs(values) - self.r
        window = get_settings().clamp_window
        if np.any(excess > window):
            raise ContractViolation(
                f"black box {self.label} has |g| = {np.max(np.abs(values)):.12g} > r = {self.r:.12g}"
            )
        return np.clip(values, -self.r, self.r)

    def sample(self, lam: np.ndarray) -> np.ndarray:
        """One outcome in {+r, -r} per point."""
        p_plus = 0.5 * (1.0 + self.mean(lam) / self.r)
        return np.where(self.rng.random(p_plus.shape) < p_plus, self.r, -self.r)

    def sample_at(self, lam, size: int) -> np.ndarray:
        """``size`` repeated outcomes at a single point."""
        p_plus = 0.5 * (1.0 + float(self.mean(np.asarray([lam]))[0]) / self.r)
        return np.where(self.rng.random(size) < p_plus, self.r, -self.r)


def make_blackbox(
    state_model: Union[WignerEvaluator, StateModel, CharacteristicTable],
    domain: Optional[Domain] = None,
    r: Optional[float] = None,
    seed: int = 0,
) -> BlackBoxSampler:
    """Black box for the state sigma: displaced parity (CV) or Pauli measurement (DV)."""
    if isinstance(state_model, WignerEvaluator):
        if domain not in (None, Domain.CV):
            raise ContractViolation("Wigner evaluators are measured in the CV domain")
        return BlackBoxSampler(
            g=lambda lam: wigner_eval(state_model, np.atleast_2d(lam)),
            r=state_model.sup_bound if r is None else r,
            seed=seed,
            domain=Domain.CV,
            label=state_model.label,
        )

    if domain not in (None, Domain.DV):
        raise ContractViolation("qubit states are measured in the DV domain")
    table = state_model if isinstance(state_model, CharacteristicTable) else char_table(state_model)
    lookup = np.concatenate([[1.0], table.values])
    return BlackBoxSampler(
        g=lambda lam: lookup[np.asarray(lam, dtype=np.int64)],
        r=1.0 if r is None else r,
        seed=seed,
        domain=Domain.DV,
        label=table.name,
    )


@dataclass(frozen=True, eq=False)
class SamplingPlan:
    epsilon: float
    eps_prime: float
    delta: float
    n_samples: int
    truncation: TruncatedFunction
    domain: Domain
    r: float
    rule: str = "l1"

    def __post_init__(self):
        expected = sample_budget(self.r, self.truncation.l1_tilde, self.epsilon - self.eps_prime, self.delta)
        if self.rule == "l1" and self.n_samples != expected:
            raise ContractViolation(f"plan budget {self.n_samples} differs from formula value {expected}")

    def info(self) -> SamplingPlanInfo:
        return SamplingPlanInfo(
            epsilon=self.epsilon,
            eps_prime=self.eps_prime,
            delta=self.delta,
            n_samples=self.n_samples,
            plan_l1=self.truncation.l1_tilde,
            r=self.r,
            domain=self.domain.value,
            rule=self.rule,
        )


def plan_sampling(f: FunctionLike, epsilon: float, delta: float, r: Optional[float] = None) -> SamplingPlan:
    """Budget-optimal plan for estimating the overlap with f."""
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise PreconditionError("epsilon and delta must lie in (0, 1)")
    mf = as_measured(f)
    r = mf.bound if r is None else r
    best = budget_optimize(mf, epsilon, delta, r)
    return SamplingPlan(
        epsilon=epsilon,
        eps_prime=best.eps_prime,
        delta=delta,
        n_samples=best.n_samples,
        truncation=best.truncation,
        domain=mf.domain,
        r=r,
    )


class TableSampler:
    """Weighted draw over the kept nodes through a cumulative table."""

    def __init__(self, trunc: TruncatedFunction):
        source = trunc.source
        kept = np.abs(source.values) >= trunc.c_star
        self.index = np.nonzero(kept)[0]
        mass = source.weights[kept] * np.abs(source.values[kept])
        self.cumulative = np.cumsum(mass)
        self.points = source.points
        self.values = source.values

    def draw(self, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        u = rng.random(size) * self.cumulative[-1]
        pick = self.index[np.minimum(np.searchsorted(self.cumulative, u, side="right"), self.index.size - 1)]
        return self.points[pick], np.sign(self.values[pick])

    def probabilities(self) -> np.ndarray:
        """Probability of each kept node, in node order."""
        return np.diff(np.concatenate([[0.0], self.cumulative])) / self.cumulative[-1]


class RadialSampler:
    """Radius by inverse CDF of s |f~(s)| on tabulated knots, angle uniform."""

    def __init__(self, trunc: TruncatedFunction):
        settings = get_settings()
        state: WignerEvaluator = trunc.source.source
        self.trunc = trunc
        self.center = np.asarray(state.center, dtype=float)
        fine = np.linspace(0.0, state.support_radius, settings.cdf_knots * FINE_GRID_FACTOR + 1)
        pts = np.tile(self.center, (fine.size, 1))
        pts[:, 0] += SQRT2 * fine
        density = fine * np.abs(trunc.apply(wigner_eval(state, pts)))
        cdf = cumulative_trapezoid(density, fine, initial=0.0)
        if not cdf[-1] > 0:
            raise PreconditionError("radial density of the truncation vanishes")
        take = np.linspace(0, fine.size - 1, settings.cdf_knots).astype(int)
        self.radii = fine[take]
        self.cdf = cdf[take] / cdf[-1]

    def inverse_cdf(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        j = np.clip(np.searchsorted(self.cdf, u, side="right"), 1, self.cdf.size - 1)
        lo, hi = self.cdf[j - 1], self.cdf[j]
        t = np.where(hi > lo, (u - lo) / np.where(hi > lo, hi - lo, 1.0), 0.0)
        return self.radii[j - 1] + np.clip(t, 0.0, 1.0) * (self.radii[j] - self.radii[j - 1])

    def draw(self, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        s = self.inverse_cdf(rng.random(size))
        theta = rng.uniform(0.0, 2.0 * np.pi, size)
        pts = self.center + SQRT2 * np.stack([s * np.cos(theta), s * np.sin(theta)], axis=-1)
        return pts, np.sign(self.trunc.evaluate(pts))


class RejectionTally(NamedTuple):
    """Proposal and acceptance counts of one rejection-sampling call."""

    proposed: int
    accepted: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else float("nan")


class SpikeRejectionSampler:
    """Rejection sampling of |f~| under the Gaussian envelope of the spike double sum.

    The envelope (1/c_n)(2/pi) sum_{k,l} exp(-2 (x - c_kl)^2) exp(-p^2 / 2)
    bounds |W| and is an equal-weight mixture of n^2 product Gaussians.
    Instances are immutable; ``sampler_for`` shares them across trial threads.
    """

    def __init__(self, trunc: TruncatedFunction):
        state: WignerEvaluator = trunc.source.source
        mu = state.spike_positions()
        self.trunc = trunc
        self.centres = (0.5 * (mu[:, None] + mu[None, :])).ravel()
        self.scale = 2.0 / np.pi / spike_normalisation(state.n)

    def envelope(self, pts: np.ndarray) -> np.ndarray:
        x, p = pts[:, 0:1], pts[:, 1]
        return self.scale * np.exp(-2.0 * (x - self.centres) ** 2).sum(axis=1) * np.exp(-0.5 * p**2)

    def draw_with_tally(
        self, rng: np.random.Generator, size: int
    ) -> Tuple[np.ndarray, np.ndarray, RejectionTally]:
        points, signs, have = [], [], 0
        proposed = accepted = 0
        while have < size:
            batch = max(2 * (size - have), 64)
            pick = rng.integers(0, self.centres.size, batch)
            pts = np.stack([rng.normal(self.centres[pick], 0.5), rng.normal(0.0, 1.0, batch)], axis=-1)
            values = self.trunc.evaluate(pts)
            keep = rng.random(batch) * self.envelope(pts) < np.abs(values)
            proposed += batch
            accepted += int(keep.sum())
            points.append(pts[keep])
            signs.append(np.sign(values[keep]))
            have += int(keep.sum())
        tally = RejectionTally(proposed, accepted)
        return np.concatenate(points)[:size], np.concatenate(signs)[:size], tally

    def draw(self, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        points, signs, _ = self.draw_with_tally(rng, size)
        return points, signs


LambdaSampler = Union[TableSampler, RadialSampler, SpikeRejectionSampler]


@lru_cache(maxsize=32)
def sampler_for(trunc: TruncatedFunction) -> LambdaSampler:
    """Pick the sampling scheme that matches the truncation's source."""
    if trunc.degenerate:
        raise PreconditionError("cannot sample from a zero truncation")
    source = trunc.source
    if isinstance(source, ClusteredFunction):
        return SpikeRejectionSampler(trunc)
    state = source.source
    if isinstance(state, WignerEvaluator) and state.radial_symmetric and source.modes == 1:
        return RadialSampler(trunc)
    if isinstance(source, NodalFunction):
        return TableSampler(trunc)
    raise ContractViolation(f"no sampler for {type(source).__name__}")


def draw_lambda(trunc: TruncatedFunction, rng: np.random.Generator, size: Optional[int] = None):
    """Draw points with density |f~| / ||f~||_1.

    Returns a single point when ``size`` is None, else an array of ``size`` points.
    """
    points, _ = sampler_for(trunc).draw(rng, 1 if size is None else size)
    return points[0] if size is None else points


def overlap_samples(
    trunc: TruncatedFunction, blackbox: BlackBoxSampler, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Per-sample terms X = y ||f~||_1 sgn f~(lambda); each satisfies |X| <= r ||f~||_1."""
    lam, signs = sampler_for(trunc).draw(rng, size)
    return blackbox.sample(lam) * trunc.l1_tilde * signs


def _l2_rule_estimate(mf: NodalFunction, blackbox: BlackBoxSampler, n: int, rng) -> float:
    """Importance sampling with density proportional to f^2 (comparison only)."""
    mass = mf.weights * mf.values**2
    cumulative = np.cumsum(mass)
    pick = np.minimum(np.searchsorted(cumulative, rng.random(n) * cumulative[-1], side="right"), mass.size - 1)
    y = blackbox.sample(mf.points[pick])
    return float(np.mean(y * cumulative[-1] / mf.values[pick]))


def estimate_overlap(
    f: FunctionLike,
    blackbox: BlackBoxSampler,
    epsilon: float,
    delta: float,
    r: Optional[float] = None,
    truth: Optional[float] = None,
    rule: str = "l1",
    descriptors: Sequence[str] = (),
    plan: Optional[SamplingPlan] = None,
    offset: float = 0.0,
) -> EstimationReport:
    """Estimate the integral of f g where g is the mean of ``blackbox``.

    Args:
        f: Target function (table, Wigner evaluator or discretised)
        blackbox: Simulated device for g
        epsilon: Total additive error in (0, 1)
        delta: Failure probability in (0, 1)
        r: Outcome magnitude; the black box's r by default
        truth: Oracle value recorded in the report
        rule: "l1" (guaranteed) or "l2" (f^2-proportional, tables only)
        descriptors: Labels recorded in the report
        plan: Reuse a precomputed plan
        offset: Constant added to the estimate (the identity term of Pauli fidelities)

    Raises:
        BudgetOverflowError: N exceeds the configured maximum
    """
    settings = get_settings()
    started = time.perf_counter()
    r = blackbox.r if r is None else r
    plan = plan or plan_sampling(f, epsilon, delta, r)
    if plan.n_samples > settings.max_samples:
        raise BudgetOverflowError(plan.n_samples, settings.max_samples, epsilon)

    rng = np.random.default_rng([blackbox.seed, LAMBDA_STREAM])
    trunc = plan.truncation
    n = plan.n_samples
    if rule == "l2":
        mf = plan.truncation.source
        if mf.domain is not Domain.DV:
            raise ContractViolation("the L2-proportional rule is offered for characteristic tables only")
        estimate = _l2_rule_estimate(mf, blackbox, n, rng) if n else 0.0
    elif rule != "l1":
        raise ContractViolation(f"unknown sampling rule {rule!r}")
    elif n == 0 or trunc.degenerate:
        estimate = 0.0
    else:
        estimate = float(np.mean(overlap_samples(trunc, blackbox, rng, n)))

    estimate += offset
    report = EstimationReport(
        estimate=estimate,
        n_samples=n,
        epsilon=epsilon,
        eps_prime=plan.eps_prime,
        delta=delta,
        seed=blackbox.seed,
        truth=truth,
        domain=plan.domain.value,
        state_descriptors=list(descriptors),
        plan=plan.info().model_copy(update={"rule": rule}),
        elapsed=time.perf_counter() - started,
    )
    logger.info(
        "Overlap estimated",
        estimate=estimate,
        n_samples=n,
        epsilon=epsilon,
        delta=delta,
        seed=blackbox.seed,
        truth=truth,
        elapsed=report.elapsed,
    )
    return report


def estimate_fidelity_wigner(
    rho: WignerEvaluator,
    sigma_box: BlackBoxSampler,
    epsilon: float,
    delta: float,
    truth: Optional[float] = None,
    plan: Optional[SamplingPlan] = None,
) -> EstimationReport:
    """Estimate F(rho, sigma) = pi^m * integral of W_rho W_sigma."""
    if not rho.is_pure or rho.kind is StateKind.MIXTURE:
        raise ContractViolation(f"target {rho.label} must be a pure state")
    if sigma_box.domain is not Domain.CV:
        raise ContractViolation("Wigner fidelity needs a displaced-parity black box")
    return estimate_overlap(
        discretize(rho),
        sigma_box,
        epsilon,
        delta,
        r=rho.sup_bound,
        truth=truth,
        descriptors=(rho.label, sigma_box.label),
        plan=plan,
    )


def estimate_fidelity_pauli(
    rho: Union[CharacteristicTable, StateModel],
    sigma_box: BlackBoxSampler,
    epsilon: float,
    delta: float,
    truth: Optional[float] = None,
    rule: str = "l1",
    plan: Optional[SamplingPlan] = None,
) -> EstimationReport:
    """Estimate F = 1/d + (1/d) sum over non-identity P of chi_rho(P) chi_sigma(P)."""
    table = rho if isinstance(rho, CharacteristicTable) else char_table(rho)
    if table.purity < 1.0 - PURITY_TOL:
        raise ContractViolation(f"target {table.name} is not pure (purity {table.purity:.12g})")
    if sigma_box.domain is not Domain.DV:
        raise ContractViolation("Pauli fidelity needs a Pauli black box")
    return estimate_overlap(
        table_function(table),
        sigma_box,
        epsilon,
        delta,
        r=1.0,
        truth=truth,
        rule=rule,
        descriptors=(table.name, sigma_box.label),
        offset=1.0 / table.dim,
        plan=plan,
    )
