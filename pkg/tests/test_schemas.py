"""Tests for serialised schemas and the descriptor grammar."""

import json

import pytest
from pydantic import ValidationError as SchemaError

from overlapix.core.exceptions import ValidationError
from overlapix.schemas import (
    AssertionOutcome,
    EstimationReport,
    RunConfig,
    StateDescriptor,
    Subcommand,
    SweepFamily,
    SweepResult,
    SweepRow,
    SweepSpec,
    round_floats,
)


class TestStateDescriptor:
    """Test descriptor parsing."""

    @pytest.mark.parametrize(
        "text,family,domain",
        [
            ("fock:4", "fock", "cv"),
            ("spike:2", "spike", "cv"),
            ("coherent:1,-0.5", "coherent", "cv"),
            ("ghz:3", "ghz", "dv"),
            ("haar:5@11", "haar", "dv"),
            ("mixed:2", "mixed", "dv"),
            ("basis:0110", "basis", "dv"),
        ],
    )
    def test_parse_families(self, text, family, domain):
        descriptor = StateDescriptor.parse(text)
        assert descriptor.family == family
        assert descriptor.domain == domain

    def test_canonical_text(self):
        assert StateDescriptor.parse("coherent:1").text == "coherent:1,0"
        assert StateDescriptor.parse("HAAR:3@7").text == "haar:3@7"

    def test_mixture(self):
        descriptor = StateDescriptor.parse("mix:fock0=0.7,fock1=0.3")
        assert descriptor.domain == "cv"
        assert [w for w, _ in descriptor.components] == [0.7, 0.3]
        assert descriptor.text == "mix:fock0=0.7,fock1=0.3"

    def test_mixture_with_seeded_haar(self):
        descriptor = StateDescriptor.parse("mix:haar3@5=0.5,mixed3=0.5")
        assert descriptor.components[0][1].seed == 5

    @pytest.mark.parametrize(
        "text",
        ["fock:-1", "fock", "ghz:0", "warp:3", "coherent:x", "basis:012", "mix:fock0", "mix:fock0=0.5,ghz3=0.5"],
    )
    def test_invalid_descriptors(self, text):
        with pytest.raises(ValidationError):
            StateDescriptor.parse(text)


class TestRunConfig:
    """Test run configuration."""

    def test_round_trip(self):
        config = RunConfig(
            subcommand=Subcommand.ESTIMATE,
            target="ghz:3",
            sigma="mix:ghz3=0.6,mixed3=0.4",
            epsilon=0.1,
            seed=7,
        )
        assert RunConfig.from_json(config.to_json()) == config

    def test_seed_filled_when_absent(self):
        config = RunConfig(subcommand=Subcommand.NORMS, target="fock:0")
        assert isinstance(config.seed, int)
        assert 0 <= config.seed < 2**31

    def test_bad_descriptor_rejected(self):
        with pytest.raises(SchemaError):
            RunConfig(subcommand=Subcommand.NORMS, target="fock:-1")

    def test_epsilon_range(self):
        with pytest.raises(SchemaError):
            RunConfig(subcommand=Subcommand.ESTIMATE, epsilon=1.5, seed=0)

    def test_targets_canonicalised(self):
        config = RunConfig(subcommand=Subcommand.WITNESS, targets=["GHZ:3", "fock:16"], seed=0)
        assert config.targets == ["ghz:3", "fock:16"]


class TestEstimationReport:
    """Test estimation reports and canonical JSON."""

    def make(self, **overrides):
        data = dict(
            estimate=0.93, n_samples=459, epsilon=0.1, eps_prime=0.0, delta=0.05,
            seed=7, domain="dv", truth=1.0,
        )
        data.update(overrides)
        return EstimationReport(**data)

    def test_within_eps_filled(self):
        assert self.make().within_eps is True
        assert self.make(estimate=0.8).within_eps is False
        assert self.make(truth=None).within_eps is None

    def test_json_is_canonical(self):
        text = self.make(elapsed=1.5).to_json()
        payload = json.loads(text)
        assert text.endswith("\n")
        assert payload["schema"] == 1
        assert "elapsed" not in payload
        assert list(payload) == sorted(payload)

    def test_round_floats(self):
        assert round_floats(0.1 + 0.2) == 0.3
        assert round_floats({"a": [float("inf")]}) == {"a": [None]}
        assert round_floats(2.0 / 3.0, 3) == 0.667


class TestSweepSchemas:
    """Test sweep specifications and results."""

    def test_trials_floor(self):
        with pytest.raises(SchemaError):
            SweepSpec(family=SweepFamily.FOCK_SCALING, n_list=[0], trials=50)

    def test_grid_range(self):
        with pytest.raises(SchemaError):
            SweepSpec(family=SweepFamily.SPIKE_BOUNDS, n_list=[9])

    def test_empty_grid(self):
        with pytest.raises(SchemaError):
            SweepSpec(family=SweepFamily.STABILISER_BUDGET, n_list=[])

    def test_witness_needs_targets(self):
        with pytest.raises(SchemaError):
            SweepSpec(family=SweepFamily.ADVERSARIAL_WITNESS, eps_list=[0.1])

    def test_result_hash_digest_and_csv(self):
        spec = SweepSpec(family=SweepFamily.SPIKE_BOUNDS, n_list=[1, 2])
        rows = [
            SweepRow(parameters={"n": 1}, metrics={"l1": 1.0}),
            SweepRow(parameters={"n": 2}, metrics={"l1": 1.5, "c_n": 2.0}, flags={"violated": ""}),
        ]
        result = SweepResult(spec=spec, rows=rows, assertions=[AssertionOutcome(name="ok", passed=True)])
        again = SweepResult(spec=spec, rows=rows, assertions=[AssertionOutcome(name="ok", passed=True)])

        assert len(result.config_hash) == 64
        assert result.digest() == again.digest()
        assert result.passed
        lines = result.to_csv().splitlines()
        assert lines[0] == "n,l1,c_n,violated"
        assert lines[1] == "1,1.0,,"
