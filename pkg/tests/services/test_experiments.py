"""Tests for the experiment sweeps."""

import math

import pytest

from overlapix.core.exceptions import CapacityError, PreconditionError
from overlapix.models import WignerEvaluator
from overlapix.schemas import SweepFamily, SweepSpec
from overlapix.services.estimator import plan_sampling
from overlapix.services.experiments import FOCK_BUDGET_BAND, ExperimentService, _band_outcome, _spread

pytestmark = pytest.mark.service


def failed(result):
    return [a.name for a in result.assertions if not a.passed]


class TestSpread:
    """Test the band ratio helper."""

    def test_ratio(self):
        assert _spread([2.0, 4.0, 3.0]) == 2.0

    def test_short_and_missing(self):
        assert _spread([5.0]) == 1.0
        assert _spread([None, 3.0]) == 1.0

    def test_non_positive(self):
        assert math.isinf(_spread([0.0, 1.0]))

    def test_band_outcome_fails_past_limit(self):
        assert FOCK_BUDGET_BAND == 1.5
        assert _band_outcome("band", [1.0, 1.5], FOCK_BUDGET_BAND, "N/n").passed
        outcome = _band_outcome("band", [1.0, 1.6], FOCK_BUDGET_BAND, "N/n")
        assert not outcome.passed
        assert outcome.detail == "max/min of N/n = 1.6"


class TestSpikeBounds:
    """Test the spike norm sweep."""

    def test_bounds_hold(self, experiment_service):
        result = experiment_service.run_spike_bounds([1, 2, 3])
        assert result.passed, failed(result)
        assert [row.flags["violated"] for row in result.rows] == ["", "", ""]
        assert all(row.metrics["pi_l1_linf"] >= 1 - 1e-6 for row in result.rows)

    def test_capacity(self, experiment_service):
        with pytest.raises(CapacityError):
            experiment_service.run_spike_bounds([9])


class TestGaussianBudget:
    """Test the coherent-state budget sweep."""

    def test_budget_scales_with_inverse_eps_squared(self, experiment_service):
        result = experiment_service.run_gaussian_budget([0.1, 0.2], delta=0.1)
        assert result.passed, failed(result)
        assert len(result.rows) == 6
        assert result.rows[0].metrics["n_samples"] == 1843


class TestStabiliserBudget:
    """Test the GHZ budget sweep."""

    def test_budget_stays_below_ceiling(self, experiment_service):
        result = experiment_service.run_stabiliser_budget([2, 3, 4, 5], 0.1, 0.05, 100, seed=1)
        assert result.passed, failed(result)
        ghz3 = result.rows[1].metrics
        assert ghz3["n_samples"] == 459
        assert ghz3["pure_failure_rate"] == 0.0
        assert ghz3["ceiling"] == math.ceil(200 * math.log(20))

    def test_capacity(self, experiment_service):
        with pytest.raises(CapacityError):
            experiment_service.run_stabiliser_budget([9], 0.1, 0.05, 100, seed=1)


class TestHaarTrend:
    """Test the Haar concentration sweep."""

    def test_trend(self, experiment_service):
        result = experiment_service.run_haar_trend([3, 4], draws=20, epsilon=0.2, delta=0.05, seed=3)
        assert result.passed, failed(result)
        assert len(result.rows[0].flags["seeds"].split(",")) == 20

    def test_capacity(self, experiment_service):
        with pytest.raises(CapacityError):
            experiment_service.run_haar_trend([8], draws=20, epsilon=0.2, delta=0.05, seed=3)

    @pytest.mark.parametrize("n_list,draws", [([2], 20), ([3], 10)])
    def test_preconditions(self, experiment_service, n_list, draws):
        with pytest.raises(PreconditionError):
            experiment_service.run_haar_trend(n_list, draws=draws, epsilon=0.2, delta=0.05, seed=3)


class TestFockScaling:
    """Test the Fock sweep."""

    def test_vacuum_row(self, experiment_service):
        result = experiment_service.run_fock_scaling([0, 4], 0.2, 0.1, 100, seed=5)
        assert result.passed, failed(result)
        names = {a.name for a in result.assertions}
        assert "fock0_gaussian_budget" in names
        assert "fock4_lower_le_upper" in names
        assert result.rows[0].metrics["l1"] == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.slow
    def test_sqrt_n_band(self, experiment_service):
        result = experiment_service.run_fock_scaling([4, 16, 64], 0.2, 0.1, 100, seed=5)
        assert result.passed, failed(result)
        for row in result.rows:
            assert 0.4 <= row.metrics["l1_over_sqrt_n"] <= 1.6

    @pytest.mark.slow
    def test_budget_grows_linearly_in_n(self):
        per_n = [plan_sampling(WignerEvaluator.fock(n), 0.1, 0.1).n_samples / n for n in (4, 16, 64)]
        assert _spread(per_n) <= FOCK_BUDGET_BAND


class TestWorstCaseBand:
    """Test the spike worst-case sweep."""

    def test_small_band(self, experiment_service):
        result = experiment_service.run_worstcase_band([1, 2], 0.2, 0.1, seed=2)
        assert result.passed, failed(result)
        assert "t2_truth_oracles_agree" in {a.name for a in result.assertions}
        assert result.rows[0].metrics["truth"] == pytest.approx(1.0)

    def test_capacity(self, experiment_service):
        with pytest.raises(CapacityError):
            experiment_service.run_worstcase_band([9], 0.2, 0.1, seed=2)


class TestAdversarialWitness:
    """Test the witness sweep."""

    def test_ghz3_lower_figure(self, experiment_service):
        result = experiment_service.run_adversarial_witness(["ghz:3"], [0.15], seed=0, delta=0.05)
        assert result.passed, failed(result)
        metrics = result.rows[0].metrics
        assert metrics["lower_figure"] == pytest.approx((0.875 / 0.3) ** 2 * math.log(1 / 0.15))
        assert metrics["lower_figure"] <= metrics["upper_budget"]

    def test_skips_large_epsilon(self, experiment_service):
        result = experiment_service.run_adversarial_witness(["ghz:3"], [0.1, 0.99], seed=0)
        assert result.rows[1].flags == {"skipped": True}
        assert len(result.assertions) == 2

    def test_fock_exercises_both_branches(self, experiment_service):
        result = experiment_service.run_adversarial_witness(["fock:16"], [0.05, 0.8], seed=0)
        assert result.passed, failed(result)
        assert {row.flags["branch"] for row in result.rows} == {"bulk", "tail"}

    def test_haar_target_uses_run_seed(self, experiment_service):
        result = experiment_service.run_adversarial_witness(["haar:3"], [0.2], seed=4)
        assert result.passed, failed(result)

    def test_unsupported_target(self, experiment_service):
        with pytest.raises(PreconditionError):
            experiment_service.run_adversarial_witness(["coherent:1,0"], [0.1])


class TestDispatch:
    """Test family dispatch and reproducibility."""

    def test_run_dispatches_by_family(self, experiment_service):
        spec = SweepSpec(family=SweepFamily.SPIKE_BOUNDS, n_list=[1, 2])
        result = experiment_service.run(spec)
        assert result.spec == spec
        assert len(result.rows) == 2

    def test_same_seed_same_digest(self, trial_pool):
        spec = SweepSpec(family=SweepFamily.STABILISER_BUDGET, n_list=[2, 3], trials=100, seed=9)
        first = ExperimentService(pool=trial_pool).run(spec)
        second = ExperimentService(pool=trial_pool).run(spec)
        assert first.digest() == second.digest()
