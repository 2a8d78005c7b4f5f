"""Run configuration and the state-descriptor grammar.

Descriptors::

    fock:N   coherent:RE[,IM]   spike:N          (continuous variable)
    ghz:N    haar:N[@SEED]      mixed:N   basis:BITS   (qubits)
    mix:fock0=0.7,fock1=0.3     mix:ghz3=0.6,mixed3=0.4

Mixture components use the compact form FAMILY+N (``haar3@5`` for seeded
Haar draws).
"""

import re
from enum import Enum
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from overlapix.core.exceptions import ValidationError

CV_FAMILIES = {"fock", "coherent", "spike"}
DV_FAMILIES = {"ghz", "haar", "mixed", "basis"}
_COMPACT = re.compile(r"^(fock|spike|ghz|mixed|haar)(\d+)(?:@(\d+))?$")
_HAAR = re.compile(r"^(\d+)(?:@(\d+))?$")


class Subcommand(str, Enum):
    NORMS = "norms"
    ESTIMATE = "estimate"
    SWEEP = "sweep"
    WITNESS = "witness"


class StateDescriptor(BaseModel):
    """Parsed state descriptor; ``text`` is its canonical spelling."""

    family: str = Field(..., description="State family")
    n: Optional[int] = Field(default=None, description="Mode, qubit or Fock index")
    beta: Optional[Tuple[float, float]] = Field(default=None, description="Coherent amplitude")
    seed: Optional[int] = Field(default=None, description="Haar draw seed")
    bits: Optional[str] = Field(default=None, description="Basis-state bits")
    components: List[Tuple[float, "StateDescriptor"]] = Field(
        default_factory=list, description="Mixture components"
    )

    @property
    def domain(self) -> Literal["cv", "dv"]:
        if self.family == "mix":
            return self.components[0][1].domain
        return "cv" if self.family in CV_FAMILIES else "dv"

    @property
    def text(self) -> str:
        if self.family == "coherent":
            return f"coherent:{self.beta[0]:g},{self.beta[1]:g}"
        if self.family == "haar":
            return f"haar:{self.n}" + (f"@{self.seed}" if self.seed is not None else "")
        if self.family == "basis":
            return f"basis:{self.bits}"
        if self.family == "mix":
            return "mix:" + ",".join(f"{c.compact}={w:g}" for w, c in self.components)
        return f"{self.family}:{self.n}"

    @property
    def compact(self) -> str:
        tail = f"@{self.seed}" if self.family == "haar" and self.seed is not None else ""
        return f"{self.family}{self.n}{tail}"

    @model_validator(mode="after")
    def check_domains(self) -> "StateDescriptor":
        if self.family == "mix":
            if not self.components:
                raise ValueError("mixture needs components")
            if len({c.domain for _, c in self.components}) != 1:
                raise ValueError("mixture mixes CV and qubit components")
        return self

    @classmethod
    def parse(cls, text: str) -> "StateDescriptor":
        """Parse a descriptor, raising ValidationError on anything malformed."""
        text = text.strip()
        family, sep, body = text.partition(":")
        family = family.lower()
        if not sep or not body:
            raise ValidationError(f"state descriptor {text!r} needs FAMILY:PARAMS")
        try:
            if family in ("fock", "spike", "ghz", "mixed"):
                return cls(family=family, n=_nonneg_int(body, family))
            if family == "coherent":
                parts = [float(p) for p in body.split(",")]
                if len(parts) not in (1, 2) or not np.all(np.isfinite(parts)):
                    raise ValueError("coherent takes RE[,IM]")
                return cls(family=family, beta=(parts[0], parts[1] if len(parts) == 2 else 0.0))
            if family == "haar":
                match = _HAAR.match(body)
                if not match:
                    raise ValueError("haar takes N[@SEED]")
                seed = int(match.group(2)) if match.group(2) else None
                return cls(family=family, n=int(match.group(1)), seed=seed)
            if family == "basis":
                if set(body) - {"0", "1"}:
                    raise ValueError("basis takes a bit string")
                return cls(family=family, n=len(body), bits=body)
            if family == "mix":
                return cls(family=family, components=[_component(item) for item in body.split(",")])
        except ValueError as exc:
            raise ValidationError(f"invalid state descriptor {text!r}: {exc}") from exc
        raise ValidationError(f"unknown state family {family!r}")


def _nonneg_int(body: str, family: str) -> int:
    value = int(body)
    if value < 0 or (family != "fock" and value < 1):
        raise ValueError(f"{family} index out of range: {value}")
    return value


def _component(item: str) -> Tuple[float, StateDescriptor]:
    name, sep, weight = item.partition("=")
    match = _COMPACT.match(name.strip().lower())
    if not sep or not match:
        raise ValueError(f"mixture component {item!r} must read FAMILYN=WEIGHT")
    family, n, seed = match.group(1), int(match.group(2)), match.group(3)
    return float(weight), StateDescriptor(
        family=family, n=n, seed=int(seed) if seed else None
    )


class RunConfig(BaseModel):
    """Everything a CLI invocation needs; serialises and parses back unchanged."""

    subcommand: Subcommand = Field(..., description="Subcommand to run")
    target: Optional[str] = Field(default=None, description="Target state descriptor")
    sigma: Optional[str] = Field(default=None, description="Black-box state descriptor")
    targets: List[str] = Field(default_factory=list, description="Witness target descriptors")
    family: Optional[str] = Field(default=None, description="State or sweep family")
    n: List[int] = Field(default_factory=list, description="Index grid")
    epsilon: Optional[float] = Field(default=None, gt=0, lt=1, description="Additive error")
    eps_list: List[float] = Field(default_factory=list, description="Epsilon grid for witnesses")
    delta: float = Field(default=0.05, gt=0, lt=1, description="Failure probability")
    seed: Optional[int] = Field(default=None, ge=0, description="Master seed")
    trials: int = Field(default=100, ge=1, description="Trials per scenario")
    draws: int = Field(default=20, ge=1, description="Haar draws per qubit count")
    output: Optional[str] = Field(default=None, description="Output path (stdout when absent)")
    format: Literal["json", "csv"] = Field(default="json", description="Output format")
    rule: Literal["l1", "l2"] = Field(default="l1", description="Sampling rule")

    @field_validator("target", "sigma")
    @classmethod
    def validate_descriptor(cls, v: Optional[str]) -> Optional[str]:
        """Reject malformed descriptors early and store the canonical spelling."""
        if v is None:
            return v
        return StateDescriptor.parse(v).text

    @field_validator("targets")
    @classmethod
    def validate_targets(cls, v: List[str]) -> List[str]:
        return [StateDescriptor.parse(item).text for item in v]

    @model_validator(mode="after")
    def fill_seed(self) -> "RunConfig":
        if self.seed is None:
            self.seed = int(np.random.SeedSequence().entropy % 2**31)
        return self

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.model_validate_json(text)
