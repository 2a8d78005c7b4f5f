"""Numerical domain types."""

from overlapix.models.measured import (
    Cluster,
    ClusteredFunction,
    Domain,
    MeasuredFunction,
    NodalFunction,
)
from overlapix.models.pauli import (
    CharacteristicTable,
    PauliString,
    QubitStateKind,
    StateModel,
    iter_paulis,
    popcount,
)
from overlapix.models.phase_space import GridScheme, PhasePoint, QuadratureGrid
from overlapix.models.truncation import TruncatedFunction
from overlapix.models.wigner import StateKind, WignerEvaluator

__all__ = [
    "CharacteristicTable",
    "Cluster",
    "ClusteredFunction",
    "Domain",
    "GridScheme",
    "MeasuredFunction",
    "NodalFunction",
    "PauliString",
    "PhasePoint",
    "QuadratureGrid",
    "QubitStateKind",
    "StateKind",
    "StateModel",
    "TruncatedFunction",
    "WignerEvaluator",
    "iter_paulis",
    "popcount",
]
