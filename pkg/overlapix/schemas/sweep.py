"""Sweep specifications and results."""

import csv
import hashlib
import io
from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel, Field, model_validator

from overlapix.schemas.report import ArtifactModel, round_floats

MIN_TRIALS_FOR_RATES = 100


class SweepFamily(str, Enum):
    FOCK_SCALING = "fock"
    SPIKE_BOUNDS = "spike"
    STABILISER_BUDGET = "stabiliser"
    HAAR_CONCENTRATION = "haar"
    GAUSSIAN_BUDGET = "gaussian"
    WORST_CASE_BAND = "worstcase"
    ADVERSARIAL_WITNESS = "witness"


_RANGES = {
    SweepFamily.FOCK_SCALING: (0, 64),
    SweepFamily.SPIKE_BOUNDS: (1, 8),
    SweepFamily.STABILISER_BUDGET: (2, 8),
    SweepFamily.HAAR_CONCENTRATION: (3, 7),
    SweepFamily.WORST_CASE_BAND: (1, 8),
}
_WITH_TRIALS = {
    SweepFamily.FOCK_SCALING,
    SweepFamily.STABILISER_BUDGET,
    SweepFamily.WORST_CASE_BAND,
}


class SweepSpec(BaseModel):
    """Grid of one experiment family."""

    family: SweepFamily = Field(..., description="Experiment family")
    n_list: List[int] = Field(default_factory=list, description="n (or t) grid")
    epsilon: float = Field(default=0.1, gt=0, lt=1, description="Additive error")
    eps_list: List[float] = Field(default_factory=list, description="Epsilon grid (witness, Gaussian)")
    delta: float = Field(default=0.05, gt=0, lt=1, description="Failure probability")
    trials: int = Field(default=100, ge=1, description="Estimation trials per scenario")
    draws: int = Field(default=20, ge=1, description="Haar draws per qubit count")
    targets: List[str] = Field(default_factory=list, description="Witness target descriptors")
    seed: int = Field(default=0, ge=0, description="Master seed")

    @model_validator(mode="after")
    def check_grid(self) -> "SweepSpec":
        family = self.family
        if family is SweepFamily.ADVERSARIAL_WITNESS:
            if not self.targets or not self.eps_list:
                raise ValueError("witness sweeps need targets and an epsilon list")
            return self
        if family is SweepFamily.GAUSSIAN_BUDGET:
            if not self.eps_list:
                raise ValueError("Gaussian sweeps need an epsilon list")
            return self
        if not self.n_list:
            raise ValueError("grid must be nonempty")
        lo, hi = _RANGES[family]
        if any(not lo <= n <= hi for n in self.n_list):
            raise ValueError(f"{family.value} grid must lie in [{lo}, {hi}]")
        if family in _WITH_TRIALS and self.trials < MIN_TRIALS_FOR_RATES:
            raise ValueError(f"failure-rate assertions need at least {MIN_TRIALS_FOR_RATES} trials")
        if family is SweepFamily.HAAR_CONCENTRATION and self.draws < 20:
            raise ValueError("Haar sweeps need at least 20 draws")
        return self


class SweepRow(BaseModel):
    """One grid point: its parameters and everything measured there."""

    parameters: Dict[str, Any] = Field(default_factory=dict)
    metrics: Dict[str, Any] = Field(default_factory=dict)
    flags: Dict[str, Any] = Field(default_factory=dict)


class AssertionOutcome(BaseModel):
    name: str = Field(..., description="What was checked")
    passed: bool = Field(..., description="Outcome")
    detail: str = Field(default="", description="Diagnostic")


class SweepResult(ArtifactModel):
    """Rows, assertions and provenance of a sweep; a pure function of (spec, seed)."""

    spec: SweepSpec
    rows: List[SweepRow] = Field(default_factory=list)
    assertions: List[AssertionOutcome] = Field(default_factory=list)
    config_hash: str = Field(default="", description="sha256 of the canonical spec")

    @model_validator(mode="after")
    def fill_hash(self) -> "SweepResult":
        if not self.config_hash:
            canonical = self.spec.model_dump_json()
            self.config_hash = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
        return self

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def digest(self) -> str:
        """sha256 of the canonical JSON; equal for re-runs of the same spec."""
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def to_csv(self) -> str:
        """One line per row; columns are the union of parameter and metric keys."""
        columns: List[str] = []
        for row in self.rows:
            for key in [*row.parameters, *row.metrics, *row.flags]:
                if key not in columns:
                    columns.append(key)
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(round_floats({**row.parameters, **row.metrics, **row.flags}))
        return buffer.getvalue()
