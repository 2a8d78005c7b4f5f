"""Tests for the trial pool."""

import threading

import pytest

from overlapix.schemas import EstimationReport
from overlapix.services.estimator import derive_seed
from overlapix.workers.trial_pool import TrialPool, TrialSummary

pytestmark = pytest.mark.worker


def report(estimate: float, truth: float = 1.0, epsilon: float = 0.1) -> EstimationReport:
    return EstimationReport(
        estimate=estimate, n_samples=10, epsilon=epsilon, eps_prime=0.0, delta=0.05,
        seed=0, domain="dv", truth=truth,
    )


class TestTrialPool:
    """Test ordered, seeded trial execution."""

    def test_results_follow_trial_order(self, trial_pool):
        results = trial_pool.map(lambda index, seed: (index, seed), master_seed=3, count=50)
        assert [index for index, _ in results] == list(range(50))
        assert [seed for _, seed in results] == [derive_seed(3, i) for i in range(50)]

    def test_worker_count_does_not_change_results(self):
        body = lambda index, seed: seed % 1000 + index  # noqa: E731
        serial = TrialPool(max_workers=1).map(body, 7, 40)
        parallel = TrialPool(max_workers=4).map(body, 7, 40)
        assert serial == parallel

    def test_runs_on_worker_threads(self, trial_pool):
        names = trial_pool.map(lambda index, seed: threading.current_thread().name, 0, 8)
        assert len(names) == 8

    def test_default_workers_from_settings(self):
        assert TrialPool().max_workers == 2

    def test_errors_propagate(self, trial_pool, mocker):
        spy = mocker.spy(trial_pool.logger, "error")

        def body(index, seed):
            if index == 3:
                raise RuntimeError("trial broke")
            return index

        with pytest.raises(RuntimeError, match="trial broke"):
            trial_pool.map(body, 0, 6, label="broken")
        assert spy.call_args.kwargs["trial"] == 3

    def test_run_estimations_summarises(self, trial_pool):
        summary = trial_pool.run_estimations(
            lambda seed: report(1.0 if seed % 2 else 0.5), master_seed=1, count=20, label="demo"
        )
        assert summary.count == 20
        assert summary.label == "demo"
        assert 0 <= summary.failures <= 20


class TestTrialSummary:
    """Test failure-rate bookkeeping."""

    def test_counts(self):
        summary = TrialSummary("s", [report(1.0), report(0.85), report(0.95)])
        assert summary.failures == 1
        assert summary.failure_rate == pytest.approx(1 / 3)
        assert summary.mean_estimate == pytest.approx(0.9333333333)
        assert summary.max_error == pytest.approx(0.15)

    def test_empty(self):
        summary = TrialSummary("empty")
        assert summary.failure_rate == 0.0
        assert summary.max_error is None

    def test_reports_without_truth_never_fail(self):
        summary = TrialSummary("s", [report(0.2, truth=None)])
        assert summary.failures == 0

    def test_rate_bound(self):
        summary = TrialSummary("s", [report(1.0)] * 400)
        assert summary.rate_bound(0.05) == pytest.approx(0.05 + 3 * (0.05 / 400) ** 0.5)
        assert summary.rate_bound(0.05, slack=0.0) == 0.05
