"""Pydantic schemas for reports, run configuration and sweeps."""

from overlapix.schemas.report import (
    ArtifactModel,
    EstimationReport,
    NormsReport,
    SamplingPlanInfo,
    round_floats,
)
from overlapix.schemas.run_config import RunConfig, StateDescriptor, Subcommand
from overlapix.schemas.sweep import (
    AssertionOutcome,
    SweepFamily,
    SweepResult,
    SweepRow,
    SweepSpec,
)

__all__ = [
    "ArtifactModel",
    "AssertionOutcome",
    "EstimationReport",
    "NormsReport",
    "RunConfig",
    "SamplingPlanInfo",
    "StateDescriptor",
    "Subcommand",
    "SweepFamily",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "round_floats",
]
