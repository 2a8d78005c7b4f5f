"""Tests for artifact writing."""

import json
from pathlib import Path

import numpy as np
import pytest

from overlapix.models import CharacteristicTable
from overlapix.schemas import EstimationReport, SweepFamily, SweepResult, SweepRow, SweepSpec

pytestmark = pytest.mark.service


@pytest.fixture
def sweep_result():
    spec = SweepSpec(family=SweepFamily.SPIKE_BOUNDS, n_list=[1])
    return SweepResult(spec=spec, rows=[SweepRow(parameters={"n": 1}, metrics={"l1": 1.0})])


class TestArtifactService:
    """Test files written by the artifact service."""

    def test_write_text_relative_to_base(self, artifact_service, temp_dir):
        path = artifact_service.write_text("a,b\n1,2\n", "nested/out.csv")
        assert path == Path(temp_dir) / "nested" / "out.csv"
        assert path.read_bytes() == b"a,b\n1,2\n"

    def test_absolute_path_kept(self, artifact_service, temp_dir):
        target = Path(temp_dir) / "abs.txt"
        assert artifact_service.resolve(str(target)) == target

    def test_write_json_is_canonical(self, artifact_service):
        report = EstimationReport(
            estimate=0.5, n_samples=10, epsilon=0.1, eps_prime=0.0, delta=0.05, seed=1, domain="dv"
        )
        path = artifact_service.write_json(report, "report.json")
        text = path.read_text(encoding="utf-8")
        assert text == report.to_json()
        assert json.loads(text)["estimate"] == 0.5

    def test_write_sweep(self, artifact_service, sweep_result):
        csv_path, json_path = artifact_service.write_sweep(sweep_result, "spike")
        assert csv_path.name == "spike.csv"
        assert csv_path.read_text().splitlines() == ["n,l1", "1,1.0"]
        payload = json.loads(json_path.read_text())
        assert payload["config_hash"] == sweep_result.config_hash

    def test_table_csv(self, artifact_service, ghz3_table):
        lines = artifact_service.table_csv(ghz3_table).splitlines()
        assert lines[0] == "index,xbits,zbits,value"
        assert len(lines) == 64

    def test_write_table_rounds_values(self, artifact_service):
        table = CharacteristicTable(1, np.array([1 / 3, 0.0, 0.0]), name="third")
        path = artifact_service.write_table(table, "third.csv")
        assert path.read_text().splitlines()[1] == "1,0,1,0.333333333333"
