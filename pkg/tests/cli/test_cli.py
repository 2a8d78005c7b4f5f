"""Tests for the command-line interface."""

import argparse
import json
import math
from pathlib import Path

import pytest

from overlapix import __version__
from overlapix.cli.arguments import float_list, int_list
from overlapix.main import create_parser, main
from tests.utils import DescriptorFactory

pytestmark = pytest.mark.cli


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


class TestArguments:
    """Test shared argument types."""

    def test_int_list(self):
        assert int_list("2,4, 6") == [2, 4, 6]
        with pytest.raises(argparse.ArgumentTypeError):
            int_list("1,x")

    def test_float_list(self):
        assert float_list("0.05,0.1") == [0.05, 0.1]
        with pytest.raises(argparse.ArgumentTypeError):
            float_list("a")

    @pytest.mark.parametrize(
        "argv",
        [
            ["norms", "--state", "fock:0"],
            ["norms", "--family", "coherent", "--n", "1"],
            ["estimate", "--target", "ghz:3", "--sigma", "ghz:3", "--eps", "0.1"],
            ["sweep", "--family", "spike"],
            ["witness", "--target", "ghz:3", "--eps-list", "0.1"],
        ],
    )
    def test_subcommands_registered(self, argv):
        assert create_parser().parse_args(argv).subcommand == argv[0]


class TestMain:
    """Test top-level dispatch and exit codes."""

    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert __version__ in capsys.readouterr().out

    def test_missing_subcommand(self):
        assert main([]) == 2

    def test_unknown_option(self):
        assert main(["norms", "--bogus"]) == 2


class TestNorms:
    """Test the norms command."""

    def test_vacuum(self, capsys):
        code, payload = run_json(capsys, ["norms", "--family", "fock", "--n", "0", "--seed", "1"])
        assert code == 0
        assert payload["l1"] == pytest.approx(1.0, abs=1e-8)
        assert payload["linf"] == pytest.approx(2 / math.pi, rel=1e-6)
        assert payload["schema"] == 1
        assert payload["domain"] == "cv"

    def test_coherent_family(self, capsys):
        code, payload = run_json(capsys, ["norms", "--family", "coherent", "--n", "2", "--seed", "0"])
        assert code == 0
        assert payload["state"] == "coherent:2,0"
        assert payload["l1"] == pytest.approx(1.0, abs=1e-8)
        assert payload["linf"] == pytest.approx(2 / math.pi, rel=1e-6)

    def test_negative_fock_index(self):
        assert main(["norms", "--family", "fock", "--n", "-1"]) == 2

    def test_needs_a_state(self):
        assert main(["norms"]) == 2

    def test_smoothed_table_norm(self, capsys):
        code, payload = run_json(capsys, ["norms", "--state", DescriptorFactory.ghz(3), "--eps", "0.5", "--seed", "0"])
        assert code == 0
        assert payload["l1"] == pytest.approx(0.875)
        assert payload["smoothed_l1"] == pytest.approx(0.875)

    def test_table_csv(self, capsys):
        assert main(["norms", "--family", "ghz", "--n", "2", "--format", "csv", "--seed", "0"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "index,xbits,zbits,value"
        assert len(lines) == 16

    def test_wigner_csv(self, capsys):
        assert main(["norms", "--state", "fock:1", "--format", "csv", "--seed", "0"]) == 0
        header, row = capsys.readouterr().out.splitlines()
        assert header.split(",")[:3] == ["state", "domain", "l1"]
        assert row.startswith("fock:1,cv,")

    def test_capacity(self):
        assert main(["norms", "--state", "ghz:9", "--seed", "0"]) == 3

    def test_quadrature_failure_has_own_code(self, monkeypatch):
        monkeypatch.setenv("OVERLAPIX_QUAD_MAX_DOUBLINGS", "0")
        assert main(["norms", "--state", "fock:37", "--seed", "0"]) == 5

    def test_output_file(self, capsys, temp_dir):
        target = Path(temp_dir) / "norms.json"
        assert main(["norms", "--state", "mixed:2", "--output", str(target), "--seed", "0"]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(target.read_text())["l1"] == 0.0


class TestEstimate:
    """Test the estimate command."""

    def test_ghz_self(self, capsys):
        code, payload = run_json(
            capsys, ["estimate", "--target", "ghz:3", "--sigma", "ghz:3", "--eps", "0.1", "--seed", "7"]
        )
        assert code == 0
        assert payload["n_samples"] == 459
        assert payload["truth"] == 1.0
        assert payload["within_eps"] is True
        assert payload["state_descriptors"] == ["ghz:3", "ghz:3"]

    def test_fock_mixture_truth(self, capsys):
        sigma = DescriptorFactory.mixture([("fock0", 0.7), ("fock1", 0.3)])
        code, payload = run_json(
            capsys,
            ["estimate", "--target", "fock:0", "--sigma", sigma, "--eps", "0.1", "--delta", "0.1", "--seed", "3"],
        )
        assert payload["truth"] == pytest.approx(0.7, abs=1e-8)
        assert payload["n_samples"] == 1843
        assert code == (0 if payload["within_eps"] else 1)

    def test_same_seed_same_report(self, capsys):
        argv = ["estimate", "--target", "haar:3@1", "--sigma", "mix:ghz3=0.5,mixed3=0.5", "--eps", "0.2", "--seed", "5"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first

    def test_mixed_domains(self):
        assert main(["estimate", "--target", "fock:0", "--sigma", "ghz:3", "--eps", "0.1", "--seed", "0"]) == 2

    def test_l2_rule_needs_tables(self):
        argv = ["estimate", "--target", "fock:0", "--sigma", "fock:0", "--eps", "0.1", "--rule", "l2", "--seed", "0"]
        assert main(argv) == 2

    def test_json_only(self):
        argv = ["estimate", "--target", "ghz:3", "--sigma", "ghz:3", "--eps", "0.1", "--format", "csv", "--seed", "0"]
        assert main(argv) == 2

    def test_epsilon_range(self):
        assert main(["estimate", "--target", "ghz:3", "--sigma", "ghz:3", "--eps", "1.5", "--seed", "0"]) == 2

    def test_budget_overflow(self, monkeypatch):
        monkeypatch.setenv("OVERLAPIX_MAX_SAMPLES", "10")
        assert main(["estimate", "--target", "ghz:3", "--sigma", "ghz:3", "--eps", "0.1", "--seed", "0"]) == 4

    def test_unseeded_run_records_seed(self, capsys):
        code, payload = run_json(capsys, ["estimate", "--target", "ghz:2", "--sigma", "ghz:2", "--eps", "0.2"])
        assert code == 0
        assert isinstance(payload["seed"], int)


class TestSweepAndWitness:
    """Test the sweep and witness commands."""

    def test_spike_sweep(self, capsys):
        code, payload = run_json(capsys, ["sweep", "--family", "spike", "--n", "1,2", "--seed", "0"])
        assert code == 0
        assert len(payload["rows"]) == 2
        assert all(a["passed"] for a in payload["assertions"])

    def test_sweep_csv_to_stdout(self, capsys):
        assert main(["sweep", "--family", "spike", "--n", "1", "--format", "csv", "--seed", "0"]) == 0
        assert capsys.readouterr().out.splitlines()[0].startswith("n,")

    def test_sweep_writes_stem_files(self, capsys, temp_dir):
        stem = str(Path(temp_dir) / "spike")
        assert main(["sweep", "--family", "spike", "--n", "1", "--output", stem, "--seed", "0"]) == 0
        assert Path(stem + ".csv").exists()
        assert json.loads(Path(stem + ".json").read_text())["spec"]["family"] == "spike"

    def test_too_few_trials(self):
        assert main(["sweep", "--family", "fock", "--n", "0", "--trials", "10", "--seed", "0"]) == 2

    def test_bad_grid(self):
        assert main(["sweep", "--family", "spike", "--n", "1,x"]) == 2

    def test_gaussian_sweep(self, capsys):
        code, payload = run_json(
            capsys, ["sweep", "--family", "gaussian", "--eps-list", "0.1,0.2", "--delta", "0.1", "--seed", "0"]
        )
        assert code == 0
        assert payload["rows"][0]["metrics"]["n_samples"] == 1843

    def test_witness(self, capsys):
        code, payload = run_json(
            capsys, ["witness", "--target", "ghz:3", "--target", "haar:3", "--eps-list", "0.15", "--seed", "2"]
        )
        assert code == 0
        assert [row["parameters"]["target"] for row in payload["rows"]] == ["ghz:3", "haar:3"]

    def test_witness_unsupported_target(self):
        assert main(["witness", "--target", "spike:2", "--eps-list", "0.1", "--seed", "0"]) == 2
