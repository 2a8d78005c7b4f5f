"""Build state objects from parsed descriptors."""

from typing import Union

from overlapix.core.exceptions import ValidationError
from overlapix.models.pauli import StateModel
from overlapix.models.wigner import WignerEvaluator
from overlapix.schemas.run_config import StateDescriptor
from overlapix.services.dv_states import basis_state, ghz_state, haar_state

State = Union[WignerEvaluator, StateModel]


def build_state(descriptor: Union[str, StateDescriptor], default_seed: int = 0) -> State:
    """Wigner evaluator for CV families, qubit StateModel for the others.

    Haar descriptors without an explicit seed draw with ``default_seed``.
    """
    desc = StateDescriptor.parse(descriptor) if isinstance(descriptor, str) else descriptor
    family = desc.family
    if family == "fock":
        return WignerEvaluator.fock(desc.n)
    if family == "spike":
        return WignerEvaluator.spike(desc.n)
    if family == "coherent":
        return WignerEvaluator.coherent(complex(*desc.beta))
    if family == "ghz":
        return ghz_state(desc.n)
    if family == "haar":
        seed = default_seed if desc.seed is None else desc.seed
        return haar_state(desc.n, seed)
    if family == "mixed":
        return StateModel.maximally_mixed(desc.n)
    if family == "basis":
        return basis_state(desc.bits)
    if family == "mix":
        parts = [(w, build_state(c, default_seed)) for w, c in desc.components]
        if desc.domain == "cv":
            return WignerEvaluator.mixture(parts)
        return StateModel.mixture(parts, name=desc.text)
    raise ValidationError(f"unknown state family {family!r}")


def is_pure(state: State) -> bool:
    if isinstance(state, WignerEvaluator):
        return state.is_pure
    return state.is_vector
