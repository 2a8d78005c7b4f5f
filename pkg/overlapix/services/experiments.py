"""Experiment sweeps over the scaling laws of the sample budget.

Each runner turns a grid into :class:`SweepRow` records plus a list of
:class:`AssertionOutcome` checks. Results depend only on the grid and the
master seed, so re-running a sweep reproduces its digest.
"""

import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from overlapix.core.config import get_settings
from overlapix.core.exceptions import CapacityError, PreconditionError
from overlapix.core.logging import LoggerMixin
from overlapix.models.pauli import StateModel
from overlapix.models.wigner import StateKind, WignerEvaluator
from overlapix.schemas.sweep import AssertionOutcome, SweepFamily, SweepResult, SweepRow, SweepSpec
from overlapix.services.cv_states import (
    discretize,
    norms_quadrature,
    overlap_quadrature,
    spike_bound_violations,
    spike_fidelity,
    spike_norms,
)
from overlapix.services.dv_states import (
    char_table,
    fidelity_pauli_exact,
    ghz_generators,
    ghz_state,
    haar_state,
    pauli_worst_case_budget,
    stabilizer_char,
    table_function,
)
from overlapix.services.estimator import (
    derive_seed,
    estimate_fidelity_pauli,
    estimate_fidelity_wigner,
    make_blackbox,
    plan_sampling,
)
from overlapix.services.smoothing import adversarial_g, budget_optimize, lower_bound_figure, truncate
from overlapix.services.states import build_state
from overlapix.workers.trial_pool import TrialPool, TrialSummary

HAAR_MAX_QUBITS = 7
FOCK_BAND = 1.3
FOCK_BUDGET_BAND = 1.5
FOCK_VACUUM_TOL = 0.10
STABILISER_BAND = 1.15
STABILISER_BAND_FROM = 4
HAAR_L1_BAND = (0.5, 1.1)
HAAR_LINF_CAP = 4.0
HAAR_BUDGET_BAND = 2.0
GAUSSIAN_BETAS = (0j, 1 + 0j, 1 + 1j)
GAUSSIAN_BAND = 1.05
WORST_CASE_BAND = 3.0
SPIKE_QUADRATURE_MAX_N = 2
ORACLE_TOL = 1e-6
WITNESS_TOL = 1e-6


def _spread(values: Sequence[float]) -> float:
    """max / min of positive values; 1.0 for fewer than two."""
    values = [v for v in values if v is not None]
    if len(values) < 2:
        return 1.0
    lo = min(values)
    return math.inf if lo <= 0 else max(values) / lo


def _check(name: str, passed: bool, detail: str = "") -> AssertionOutcome:
    return AssertionOutcome(name=name, passed=bool(passed), detail=detail)


def _band_outcome(name: str, values: Sequence[float], limit: float, label: str) -> AssertionOutcome:
    ratio = _spread(values)
    return _check(name, ratio <= limit, f"max/min of {label} = {ratio:.4g}")


def _rate_outcome(name: str, summary: TrialSummary, delta: float) -> AssertionOutcome:
    bound = summary.rate_bound(delta)
    return _check(
        name,
        summary.failure_rate <= bound,
        f"failure rate {summary.failure_rate:.4g} against allowance {bound:.4g} over {summary.count} trials",
    )


def _trial_metrics(prefix: str, summary: TrialSummary) -> Dict[str, float]:
    return {
        f"{prefix}_failure_rate": summary.failure_rate,
        f"{prefix}_mean_estimate": summary.mean_estimate,
        f"{prefix}_max_error": summary.max_error,
    }


class ExperimentService(LoggerMixin):
    """Runs sweep families and collects their rows and assertions."""

    def __init__(self, pool: Optional[TrialPool] = None):
        self.pool = pool or TrialPool()
        self.settings = get_settings()

    def run(self, spec: SweepSpec) -> SweepResult:
        """Dispatch ``spec`` to the runner of its family."""
        runners: Dict[SweepFamily, Callable[[SweepSpec], SweepResult]] = {
            SweepFamily.FOCK_SCALING: lambda s: self.run_fock_scaling(
                s.n_list, s.epsilon, s.delta, s.trials, s.seed
            ),
            SweepFamily.SPIKE_BOUNDS: lambda s: self.run_spike_bounds(s.n_list, s.seed),
            SweepFamily.STABILISER_BUDGET: lambda s: self.run_stabiliser_budget(
                s.n_list, s.epsilon, s.delta, s.trials, s.seed
            ),
            SweepFamily.HAAR_CONCENTRATION: lambda s: self.run_haar_trend(
                s.n_list, s.draws, s.epsilon, s.delta, s.seed
            ),
            SweepFamily.GAUSSIAN_BUDGET: lambda s: self.run_gaussian_budget(s.eps_list, s.delta, s.seed),
            SweepFamily.WORST_CASE_BAND: lambda s: self.run_worstcase_band(
                s.n_list, s.epsilon, s.delta, s.seed, s.trials
            ),
            SweepFamily.ADVERSARIAL_WITNESS: lambda s: self.run_adversarial_witness(
                s.targets, s.eps_list, s.seed, s.delta
            ),
        }
        self.logger.info("Sweep started", family=spec.family.value, seed=spec.seed)
        result = runners[spec.family](spec)
        self.logger.info(
            "Sweep finished",
            family=spec.family.value,
            rows=len(result.rows),
            passed=result.passed,
            failed=[a.name for a in result.assertions if not a.passed],
        )
        return result

    # Wigner model

    def _wigner_trials(
        self,
        target: WignerEvaluator,
        sigma: WignerEvaluator,
        truth: float,
        plan,
        master_seed: int,
        trials: int,
        label: str,
    ) -> TrialSummary:
        def trial(seed: int):
            box = make_blackbox(sigma, seed=seed)
            return estimate_fidelity_wigner(target, box, plan.epsilon, plan.delta, truth=truth, plan=plan)

        return self.pool.run_estimations(trial, master_seed, trials, label)

    def run_fock_scaling(
        self,
        n_list: Sequence[int],
        epsilon: float,
        delta: float,
        trials: int,
        seed: int,
    ) -> SweepResult:
        """Fock targets: norms, budgets and estimation trials per n.

        Trials run against sigma = |n> (truth 1) and the mixture
        0.7 |n><n| + 0.3 |n+2><n+2| (truth 0.7).
        """
        if any(not 0 <= n <= 64 for n in n_list):
            raise PreconditionError("Fock sweep grid must lie in [0, 64]")
        spec = SweepSpec(
            family=SweepFamily.FOCK_SCALING, n_list=list(n_list), epsilon=epsilon,
            delta=delta, trials=trials, seed=seed,
        )
        rows: List[SweepRow] = []
        assertions: List[AssertionOutcome] = []

        for index, n in enumerate(n_list):
            target = WignerEvaluator.fock(n)
            norms = norms_quadrature(target)
            mf = discretize(target)
            plan = plan_sampling(mf, epsilon, delta)
            lower = (
                lower_bound_figure(plan.r, truncate(mf, 2 * epsilon).l1_tilde, epsilon, delta)
                if delta < 1.0 / 3.0 else None
            )
            mixture = WignerEvaluator.mixture([(0.7, target), (0.3, WignerEvaluator.fock(n + 2))])

            pure = self._wigner_trials(
                target, target, 1.0, plan, derive_seed(seed, 2 * index), trials, f"fock{n}|fock{n}"
            )
            mixed = self._wigner_trials(
                target, mixture, 0.7, plan, derive_seed(seed, 2 * index + 1), trials, f"fock{n}|mix"
            )
            metrics = {
                "l1": norms.l1,
                "l2": norms.l2,
                "linf": norms.linf,
                "l1_over_sqrt_n": norms.l1 / math.sqrt(n) if n else None,
                "n_samples": plan.n_samples,
                "n_samples_over_n": plan.n_samples / n if n else None,
                "eps_prime": plan.eps_prime,
                "plan_l1": plan.truncation.l1_tilde,
                "lower_figure": lower,
                **_trial_metrics("pure", pure),
                **_trial_metrics("mixed", mixed),
            }
            rows.append(SweepRow(parameters={"n": n, "epsilon": epsilon, "delta": delta}, metrics=metrics))
            assertions.append(_rate_outcome(f"fock{n}_pure_failure_rate", pure, delta))
            assertions.append(_rate_outcome(f"fock{n}_mixed_failure_rate", mixed, delta))
            if lower is not None:
                assertions.append(_check(f"fock{n}_lower_le_upper", lower <= plan.n_samples))
            if n == 0:
                gaussian = math.ceil(8.0 / epsilon**2 * math.log(1.0 / delta))
                assertions.append(_check(
                    "fock0_gaussian_budget",
                    abs(plan.n_samples - gaussian) <= FOCK_VACUUM_TOL * gaussian,
                    f"N = {plan.n_samples} against {gaussian}",
                ))
            self.logger.info("Fock row done", n=n, l1=norms.l1, n_samples=plan.n_samples)

        excited = [r.metrics for r in rows if r.parameters["n"] > 0]
        if len(excited) >= 2:
            ratio = _spread([m["l1_over_sqrt_n"] for m in excited])
            assertions.append(_check("fock_sqrt_n_band", ratio < FOCK_BAND, f"max/min of l1/sqrt(n) = {ratio:.4g}"))
            assertions.append(_band_outcome(
                "fock_budget_over_n_band", [m["n_samples_over_n"] for m in excited], FOCK_BUDGET_BAND, "N/n"
            ))
        return SweepResult(spec=spec, rows=rows, assertions=assertions)

    def run_spike_bounds(self, n_list: Sequence[int], seed: int = 0) -> SweepResult:
        """Sup norm, L1 norm, uncertainty product and normalisation of spike states."""
        if any(not 1 <= n <= 8 for n in n_list):
            raise CapacityError("spike sweeps are limited to 1 <= n <= 8")
        spec = SweepSpec(family=SweepFamily.SPIKE_BOUNDS, n_list=list(n_list), seed=seed)
        rows, assertions = [], []
        for n in n_list:
            norms = spike_norms(n)
            product = math.pi * norms.l1 * norms.linf
            violated = spike_bound_violations(n, norms)
            if product < 1.0 - ORACLE_TOL:
                violated.append("uncertainty")
            rows.append(SweepRow(
                parameters={"n": n},
                metrics={
                    "linf": norms.linf,
                    "linf_cap": 8.0 / (math.pi * n),
                    "l1": norms.l1,
                    "c_n": norms.c_n,
                    "pi_l1_linf": product,
                },
                flags={"violated": ",".join(violated)},
            ))
            assertions.append(_check(
                f"spike{n}_bounds", not violated, f"violated: {', '.join(violated)}" if violated else ""
            ))
        return SweepResult(spec=spec, rows=rows, assertions=assertions)

    def run_gaussian_budget(
        self,
        eps_list: Sequence[float],
        delta: float = 0.05,
        seed: int = 0,
        betas: Sequence[complex] = GAUSSIAN_BETAS,
    ) -> SweepResult:
        """Coherent targets: unit L1 norm for every displacement and an epsilon-only budget."""
        spec = SweepSpec(family=SweepFamily.GAUSSIAN_BUDGET, eps_list=list(eps_list), delta=delta, seed=seed)
        rows, assertions = [], []
        scaled: List[float] = []
        for epsilon in eps_list:
            budgets = []
            for beta in betas:
                state = WignerEvaluator.coherent(beta)
                norms = norms_quadrature(state)
                plan = plan_sampling(discretize(state), epsilon, delta)
                budgets.append(plan.n_samples)
                rows.append(SweepRow(
                    parameters={"epsilon": epsilon, "beta_re": beta.real, "beta_im": beta.imag},
                    metrics={
                        "l1": norms.l1,
                        "n_samples": plan.n_samples,
                        "n_eps_sq": plan.n_samples * epsilon**2,
                        "eps_prime": plan.eps_prime,
                    },
                ))
                assertions.append(_check(
                    f"coherent_{beta}_eps{epsilon:g}_unit_l1", abs(norms.l1 - 1.0) <= ORACLE_TOL,
                    f"l1 = {norms.l1:.10g}",
                ))
            assertions.append(_check(
                f"eps{epsilon:g}_displacement_free_budget", _spread(budgets) <= 1.01, f"budgets {budgets}"
            ))
            scaled.append(budgets[0] * epsilon**2)
        ratio = _spread(scaled)
        assertions.append(_check("gaussian_inverse_eps_squared", ratio <= GAUSSIAN_BAND, f"max/min N eps^2 = {ratio:.4g}"))
        return SweepResult(spec=spec, rows=rows, assertions=assertions)

    def run_worstcase_band(
        self,
        t_list: Sequence[int],
        epsilon: float,
        delta: float,
        seed: int,
        trials: int = 100,
    ) -> SweepResult:
        """Spike targets with n = floor(t) realise the t^2 / eps^2 worst case.

        Trials estimate F(psi_n, sigma) for the equal mixture of the n-th and
        (n-1)-th spike states; t = 1 is the Gaussian case and uses sigma = psi_1.
        """
        if any(not 1 <= t <= 8 for t in t_list):
            raise CapacityError("worst-case band needs 1 <= t <= 8 (spike states up to n = 8)")
        spec = SweepSpec(
            family=SweepFamily.WORST_CASE_BAND, n_list=list(t_list), epsilon=epsilon,
            delta=delta, trials=trials, seed=seed,
        )
        rows, assertions = [], []
        for index, t in enumerate(t_list):
            n = int(math.floor(t))
            target = WignerEvaluator.spike(n)
            sigma = target if n == 1 else WignerEvaluator.mixture(
                [(0.5, target), (0.5, WignerEvaluator.spike(n - 1))]
            )
            truth = spike_fidelity(n, sigma)
            mf = discretize(target)
            l1 = mf.l1() / mf.scale
            plan = plan_sampling(mf, epsilon, delta)
            summary = self._wigner_trials(
                target, sigma, truth, plan, derive_seed(seed, index), trials, f"spike{n}|{sigma.label}"
            )
            metrics = {
                "l1": l1,
                "n_samples": plan.n_samples,
                "n_over_t_sq": plan.n_samples / t**2,
                "eps_prime": plan.eps_prime,
                "truth": truth,
                **_trial_metrics("sigma", summary),
            }
            if n <= SPIKE_QUADRATURE_MAX_N:
                quadrature = overlap_quadrature(target, sigma)
                metrics["truth_quadrature"] = quadrature
                assertions.append(_check(
                    f"t{t}_truth_oracles_agree", abs(quadrature - truth) <= ORACLE_TOL,
                    f"closed form {truth:.10g}, quadrature {quadrature:.10g}",
                ))
            rows.append(SweepRow(parameters={"t": t, "n": n, "epsilon": epsilon, "delta": delta}, metrics=metrics))
            assertions.append(_check(f"t{t}_l1_le_t", l1 <= t + ORACLE_TOL, f"l1 = {l1:.6g}"))
            assertions.append(_rate_outcome(f"t{t}_failure_rate", summary, delta))

        band = [r.metrics["n_over_t_sq"] for r in rows if r.parameters["t"] >= 2]
        ratio = _spread(band)
        assertions.append(_check("worst_case_t_squared_band", ratio <= WORST_CASE_BAND, f"max/min N/t^2 = {ratio:.4g}"))
        return SweepResult(spec=spec, rows=rows, assertions=assertions)

    # Pauli model

    def _pauli_trials(
        self,
        target: StateModel,
        table,
        sigma: StateModel,
        plan,
        master_seed: int,
        trials: int,
        label: str,
    ) -> TrialSummary:
        truth = fidelity_pauli_exact(target, sigma)
        sigma_table = char_table(sigma)

        def trial(seed: int):
            box = make_blackbox(sigma_table, seed=seed)
            return estimate_fidelity_pauli(table, box, plan.epsilon, plan.delta, truth=truth, plan=plan)

        return self.pool.run_estimations(trial, master_seed, trials, label)

    def run_stabiliser_budget(
        self,
        n_list: Sequence[int],
        epsilon: float,
        delta: float,
        trials: int,
        seed: int,
    ) -> SweepResult:
        """GHZ targets: budgets driven only by the (d-1)/d drift, and estimation trials.

        Tables come from the stabiliser group, so sigma = target has truth 1
        and sigma = maximally mixed has truth 1/d.
        """
        if any(not 2 <= n <= 8 for n in n_list):
            raise CapacityError("stabiliser sweeps are limited to 2 <= n <= 8")
        spec = SweepSpec(
            family=SweepFamily.STABILISER_BUDGET, n_list=list(n_list), epsilon=epsilon,
            delta=delta, trials=trials, seed=seed,
        )
        ceiling = math.ceil(2.0 / epsilon**2 * math.log(1.0 / delta))
        rows, assertions = [], []
        for index, n in enumerate(n_list):
            target = ghz_state(n)
            table = stabilizer_char(ghz_generators(n))
            plan = plan_sampling(table_function(table), epsilon, delta, r=1.0)
            pure = self._pauli_trials(
                target, table, target, plan, derive_seed(seed, 2 * index), trials, f"ghz{n}|ghz{n}"
            )
            mixed = self._pauli_trials(
                target, table, StateModel.maximally_mixed(n), plan,
                derive_seed(seed, 2 * index + 1), trials, f"ghz{n}|mixed{n}",
            )
            rows.append(SweepRow(
                parameters={"n": n, "epsilon": epsilon, "delta": delta},
                metrics={
                    "l1": table.l1,
                    "n_samples": plan.n_samples,
                    "eps_prime": plan.eps_prime,
                    "ceiling": ceiling,
                    **_trial_metrics("pure", pure),
                    **_trial_metrics("mixed", mixed),
                },
            ))
            assertions.append(_check(f"ghz{n}_below_ceiling", plan.n_samples <= ceiling, f"N = {plan.n_samples}"))
            assertions.append(_rate_outcome(f"ghz{n}_pure_failure_rate", pure, delta))
            assertions.append(_rate_outcome(f"ghz{n}_mixed_failure_rate", mixed, delta))

        budgets = [r.metrics["n_samples"] for r in rows]
        dims = [1 << n for n in n_list]
        drift = ((1 - 1 / max(dims)) / (1 - 1 / min(dims))) ** 2 * (1 + 1 / min(budgets))
        ratio = _spread(budgets)
        assertions.append(_check("stabiliser_drift_bound", ratio <= drift, f"max/min N = {ratio:.4g}, drift {drift:.4g}"))
        late = [r.metrics["n_samples"] for r in rows if r.parameters["n"] >= STABILISER_BAND_FROM]
        if len(late) >= 2:
            ratio = _spread(late)
            assertions.append(_check("stabiliser_constant_budget", ratio <= STABILISER_BAND, f"max/min N = {ratio:.4g}"))
        return SweepResult(spec=spec, rows=rows, assertions=assertions)

    def run_haar_trend(
        self,
        n_list: Sequence[int],
        draws: int,
        epsilon: float,
        delta: float,
        seed: int,
    ) -> SweepResult:
        """Haar targets: medians of the normalised L1 and sup norms, and budgets per d."""
        if any(n > HAAR_MAX_QUBITS for n in n_list):
            raise CapacityError(f"Haar sweeps build full tables only up to n = {HAAR_MAX_QUBITS}")
        if any(n < 3 for n in n_list):
            raise PreconditionError("Haar sweeps start at n = 3")
        if draws < 20:
            raise PreconditionError("Haar sweeps need at least 20 draws")
        spec = SweepSpec(
            family=SweepFamily.HAAR_CONCENTRATION, n_list=list(n_list), epsilon=epsilon,
            delta=delta, draws=draws, seed=seed,
        )
        rows, assertions = [], []
        for n in n_list:
            d = 1 << n
            l1_ratio, linf_ratio, budgets, over_sqrt_d = [], [], [], 0
            seeds = [derive_seed(seed, 1000 * n + j) for j in range(draws)]
            for draw_seed in seeds:
                table = char_table(haar_state(n, draw_seed))
                l1_ratio.append(table.l1 / math.sqrt(d))
                linf_ratio.append(table.linf * math.sqrt(d / math.log(d)))
                budgets.append(budget_optimize(table, epsilon, delta, r=1.0).n_samples)
                over_sqrt_d += table.l1 > math.sqrt(d) + 1e-12
            worst = pauli_worst_case_budget(n, epsilon, delta)
            med_l1 = float(np.median(l1_ratio))
            med_linf = float(np.median(linf_ratio))
            med_budget = float(np.median(budgets))
            rows.append(SweepRow(
                parameters={"n": n, "draws": draws, "epsilon": epsilon, "delta": delta},
                metrics={
                    "median_l1_over_sqrt_d": med_l1,
                    "median_linf_scaled": med_linf,
                    "median_n_samples": med_budget,
                    "median_n_over_d": med_budget / d,
                    "worst_case_budget": worst,
                },
                flags={"seeds": ",".join(str(s) for s in seeds)},
            ))
            self.logger.info("Haar row done", n=n, draws=draws, median_l1=med_l1, median_budget=med_budget)
            lo, hi = HAAR_L1_BAND
            assertions.append(_check(f"haar{n}_l1_band", lo <= med_l1 <= hi, f"median {med_l1:.4g}"))
            assertions.append(_check(f"haar{n}_linf_concentration", med_linf <= HAAR_LINF_CAP, f"median {med_linf:.4g}"))
            assertions.append(_check(f"haar{n}_l1_le_sqrt_d", over_sqrt_d == 0, f"{over_sqrt_d} draws above sqrt(d)"))
            assertions.append(_check(
                f"haar{n}_below_worst_case", max(budgets) <= worst, f"max N {max(budgets)} against {worst}"
            ))

        ratio = _spread([r.metrics["median_n_over_d"] for r in rows])
        assertions.append(_check("haar_budget_over_d_band", ratio <= HAAR_BUDGET_BAND, f"max/min N/d = {ratio:.4g}"))
        return SweepResult(spec=spec, rows=rows, assertions=assertions)

    # Lower bounds

    def _witness_target(self, descriptor: str, seed: int):
        state = build_state(descriptor, default_seed=seed)
        if isinstance(state, WignerEvaluator):
            if state.kind is not StateKind.FOCK:
                raise PreconditionError("witness targets are Fock, GHZ or Haar states")
            mf = discretize(state)
            return mf, mf.bound
        if not state.name.startswith(("ghz", "haar")):
            raise PreconditionError("witness targets are Fock, GHZ or Haar states")
        return table_function(char_table(state)), 1.0

    def run_adversarial_witness(
        self,
        targets: Sequence[str],
        eps_list: Sequence[float],
        seed: int = 0,
        delta: float = 0.05,
    ) -> SweepResult:
        """Witness g per (target, epsilon) with its properties and the lower/upper sandwich.

        Rows with epsilon >= ||f||_2 have no witness; they are flagged and skipped.
        """
        spec = SweepSpec(
            family=SweepFamily.ADVERSARIAL_WITNESS, targets=list(targets), eps_list=list(eps_list),
            delta=delta, seed=seed,
        )
        rows, assertions = [], []
        for descriptor in targets:
            mf, r = self._witness_target(descriptor, seed)
            norm = mf.l2()
            for epsilon in eps_list:
                parameters = {"target": descriptor, "epsilon": epsilon, "delta": delta}
                if epsilon >= norm:
                    rows.append(SweepRow(parameters=parameters, metrics={"l2": norm}, flags={"skipped": True}))
                    self.logger.warning("Witness row skipped", target=descriptor, epsilon=epsilon, l2=norm)
                    continue
                witness = adversarial_g(mf, epsilon)
                l1_2eps = truncate(mf, 2 * epsilon).l1_tilde
                lower = lower_bound_figure(r, l1_2eps, epsilon, delta)
                upper = budget_optimize(mf, epsilon, delta, r).n_samples
                rows.append(SweepRow(
                    parameters=parameters,
                    metrics={
                        "l2": norm,
                        "pairing": witness.pairing,
                        "g_l2": witness.l2,
                        "g_linf": witness.linf,
                        "linf_cap": witness.linf_cap,
                        "l1_2eps": l1_2eps,
                        "lower_figure": lower,
                        "upper_budget": upper,
                    },
                    flags={"skipped": False, "branch": witness.branch},
                ))
                name = f"{descriptor}_eps{epsilon:g}"
                assertions.append(_check(
                    f"{name}_properties", witness.properties_hold(WITNESS_TOL),
                    f"pairing {witness.pairing:.6g}, |g|_2 {witness.l2:.6g}, |g|_inf {witness.linf:.6g}",
                ))
                assertions.append(_check(f"{name}_lower_le_upper", lower <= upper, f"{lower:.6g} <= {upper}"))
        return SweepResult(spec=spec, rows=rows, assertions=assertions)
