"""Estimation report schemas and the canonical JSON writer."""

import json
import math
from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from overlapix.core.config import get_settings


def round_floats(value: Any, digits: Optional[int] = None) -> Any:
    """Round every float in a JSON-like structure to ``digits`` significant digits."""
    digits = digits or get_settings().float_digits
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v, digits) for v in value]
    return value


class ArtifactModel(BaseModel):
    """Base for everything written to stdout or disk."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(
        default_factory=lambda: get_settings().schema_version,
        serialization_alias="schema",
        description="Version tag of the emitted JSON",
    )

    def canonical_dict(self) -> dict:
        return round_floats(self.model_dump(mode="python", by_alias=True))

    def to_json(self) -> str:
        """Sorted-key JSON with rounded floats and a trailing LF."""
        return json.dumps(self.canonical_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


class SamplingPlanInfo(BaseModel):
    """The plan an estimate was drawn under."""

    epsilon: float = Field(..., gt=0, description="Total additive error")
    eps_prime: float = Field(..., ge=0, description="Smoothing parameter")
    delta: float = Field(..., gt=0, lt=1, description="Failure probability")
    n_samples: int = Field(..., ge=0, description="Sample budget N")
    plan_l1: float = Field(..., ge=0, description="L1 norm of the truncated function")
    r: float = Field(..., gt=0, description="Outcome magnitude")
    domain: str = Field(..., description="cv or dv")
    rule: str = Field(default="l1", description="Sampling rule")

    @model_validator(mode="after")
    def check_eps_prime(self) -> "SamplingPlanInfo":
        if self.eps_prime >= self.epsilon:
            raise ValueError("eps_prime must be smaller than epsilon")
        return self


class EstimationReport(ArtifactModel):
    """One estimate together with its plan, seed and (when known) the true value."""

    estimate: float = Field(..., description="Estimated fidelity or overlap")
    n_samples: int = Field(..., ge=0, description="Samples drawn")
    epsilon: float = Field(..., description="Total additive error")
    eps_prime: float = Field(..., description="Smoothing parameter used")
    delta: float = Field(..., description="Failure probability")
    seed: int = Field(..., description="Seed of the sample streams")
    truth: Optional[float] = Field(default=None, description="Oracle value when available")
    within_eps: Optional[bool] = Field(default=None, description="|estimate - truth| <= epsilon")
    domain: str = Field(..., description="cv or dv")
    state_descriptors: List[str] = Field(default_factory=list, description="Target and sigma")
    plan: Optional[SamplingPlanInfo] = Field(default=None, description="Sampling plan")
    elapsed: float = Field(default=0.0, exclude=True, description="Wall time in seconds")

    @model_validator(mode="after")
    def fill_within_eps(self) -> "EstimationReport":
        if self.truth is not None:
            self.within_eps = bool(abs(self.estimate - self.truth) <= self.epsilon)
        return self

    @property
    def error(self) -> Optional[float]:
        return None if self.truth is None else abs(self.estimate - self.truth)


class NormsReport(ArtifactModel):
    """Norms of one state's Wigner function (Lebesgue) or characteristic table (1/d measure)."""

    state: str = Field(..., description="Canonical state descriptor")
    domain: str = Field(..., description="cv or dv")
    l1: float = Field(..., ge=0, description="L1 norm")
    l2: float = Field(..., ge=0, description="L2 norm")
    linf: float = Field(..., ge=0, description="Sup norm")
    epsilon: Optional[float] = Field(default=None, description="Smoothing parameter, when requested")
    smoothed_l1: Optional[float] = Field(default=None, description="L1 norm of the epsilon-truncation")
