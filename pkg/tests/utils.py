"""Test utilities: dense-matrix and scipy oracles, plus descriptor factories."""

from functools import reduce
from typing import List, Optional

import numpy as np
from scipy.special import eval_genlaguerre

from overlapix.models.pauli import PauliString, StateModel

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_SITE = {(0, 0): _I, (1, 0): _X, (1, 1): _Y, (0, 1): _Z}


def pauli_matrix(pauli: PauliString) -> np.ndarray:
    """Dense matrix of ``pauli``; qubit k is bit k of the basis index."""
    sites = [_SITE[((pauli.xbits >> k) & 1, (pauli.zbits >> k) & 1)] for k in range(pauli.n)]
    # kron puts its first factor on the most significant bit
    return reduce(np.kron, reversed(sites))


def density_matrix(state: StateModel) -> np.ndarray:
    """Dense rho for vectors, mixtures and the maximally mixed state."""
    d = state.dim
    if state.is_vector:
        psi = np.asarray(state.amplitudes)
        return np.outer(psi, psi.conj())
    if state.components:
        return sum(w * density_matrix(c) for w, c in state.components)
    return np.eye(d, dtype=complex) / d


def dense_char_table(state: StateModel) -> np.ndarray:
    """Tr(rho P) for every non-identity P in enumeration order."""
    rho = density_matrix(state)
    n = state.n
    return np.array(
        [np.real(np.trace(rho @ pauli_matrix(PauliString.from_index(n, i)))) for i in range(1, 4**n)]
    )


def dense_fidelity(target: StateModel, sigma: StateModel) -> float:
    """<psi|sigma|psi> for a pure target."""
    psi = np.asarray(target.amplitudes)
    return float(np.real(psi.conj() @ density_matrix(sigma) @ psi))


def fock_wigner_reference(n: int, x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """(2/pi) (-1)^n exp(-2|alpha|^2) L_n(4|alpha|^2) through scipy's Laguerre."""
    a2 = 0.5 * (np.asarray(x) ** 2 + np.asarray(p) ** 2)
    return (2.0 / np.pi) * (-1.0) ** n * np.exp(-2.0 * a2) * eval_genlaguerre(n, 0, 4.0 * a2)


def budget(r: float, l1: float, gap: float, delta: float) -> int:
    """Reference value of ceil(2 (r l1 / gap)^2 ln(1/delta))."""
    return int(np.ceil(2.0 * (r * l1 / gap) ** 2 * np.log(1.0 / delta)))


class DescriptorFactory:
    """Factory for state descriptors used across CLI and schema tests."""

    @staticmethod
    def fock(n: int = 0) -> str:
        return f"fock:{n}"

    @staticmethod
    def ghz(n: int = 3) -> str:
        return f"ghz:{n}"

    @staticmethod
    def haar(n: int = 3, seed: Optional[int] = None) -> str:
        return f"haar:{n}" + (f"@{seed}" if seed is not None else "")

    @staticmethod
    def mixture(parts: List[tuple]) -> str:
        return "mix:" + ",".join(f"{name}={weight:g}" for name, weight in parts)
