"""Parallel execution of independent, seeded estimation trials.

Each trial owns RNG streams derived from (master_seed, trial_index), so
results do not depend on scheduling or on the number of workers.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, TypeVar

import numpy as np

from overlapix.core.config import get_settings
from overlapix.core.logging import LoggerMixin
from overlapix.schemas.report import EstimationReport
from overlapix.services.estimator import derive_seed

T = TypeVar("T")


@dataclass
class TrialSummary:
    """Aggregate of a batch of trials against one scenario."""

    label: str
    reports: List[EstimationReport] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.reports)

    @property
    def failures(self) -> int:
        return sum(1 for r in self.reports if r.within_eps is False)

    @property
    def failure_rate(self) -> float:
        return self.failures / self.count if self.count else 0.0

    @property
    def mean_estimate(self) -> float:
        return float(np.mean([r.estimate for r in self.reports])) if self.reports else float("nan")

    @property
    def max_error(self) -> Optional[float]:
        errors = [r.error for r in self.reports if r.error is not None]
        return max(errors) if errors else None

    def rate_bound(self, delta: float, slack: Optional[float] = None) -> float:
        """delta + c sqrt(delta / T), the binomial allowance for the failure rate."""
        c = get_settings().failure_slack if slack is None else slack
        return delta + c * float(np.sqrt(delta / max(self.count, 1)))


class TrialPool(LoggerMixin):
    """Thread pool over trials; output order always follows trial index."""

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = max_workers or get_settings().threads

    def map(self, fn: Callable[[int, int], T], master_seed: int, count: int, label: str = "") -> List[T]:
        """Run ``fn(index, seed)`` for every trial index.

        Args:
            fn: Trial body; receives the trial index and its derived seed
            master_seed: Seed of the whole batch
            count: Number of trials
            label: Scenario name used in log events

        Returns:
            Results in trial order
        """
        seeds = [derive_seed(master_seed, i) for i in range(count)]
        self.logger.debug("Trial batch started", label=label, trials=count, workers=self.max_workers)

        def run(index: int) -> T:
            try:
                return fn(index, seeds[index])
            except Exception as exc:
                self.logger.error(
                    "Trial failed",
                    label=label,
                    trial=index,
                    seed=seeds[index],
                    error=str(exc),
                )
                raise

        if self.max_workers == 1 or count <= 1:
            results = [run(i) for i in range(count)]
        else:
            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                results = list(executor.map(run, range(count)))

        self.logger.debug("Trial batch finished", label=label, trials=count)
        return results

    def run_estimations(
        self,
        trial: Callable[[int], EstimationReport],
        master_seed: int,
        count: int,
        label: str = "",
    ) -> TrialSummary:
        """Run ``trial(seed)`` ``count`` times and summarise the failures."""
        reports = self.map(lambda _index, seed: trial(seed), master_seed, count, label)
        summary = TrialSummary(label=label, reports=reports)
        self.logger.info(
            "Trials completed",
            label=label,
            trials=summary.count,
            failures=summary.failures,
            failure_rate=summary.failure_rate,
        )
        return summary
