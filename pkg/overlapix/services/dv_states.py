"""Pauli-string arithmetic and characteristic-function tables of qubit states."""

import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy.linalg import hadamard

from overlapix.core.exceptions import CapacityError, ContractViolation, PreconditionError, ValidationError
from overlapix.core.logging import get_logger
from overlapix.models.measured import Domain, NodalFunction
from overlapix.models.pauli import (
    CharacteristicTable,
    PauliString,
    QubitStateKind,
    StateModel,
    popcount,
)

logger = get_logger(__name__)

TABLE_MAX_QUBITS = 8
STATE_MAX_QUBITS = 12
PURITY_TOL = 1e-9

Generator = Tuple[int, PauliString]


def _parity(words: np.ndarray, mask: int, n: int) -> np.ndarray:
    """Parity of popcount(word & mask) for every word."""
    bits = words & mask
    out = np.zeros(words.shape, dtype=np.int64)
    for k in range(n):
        out ^= (bits >> k) & 1
    return out


def apply_pauli(P: PauliString, psi: np.ndarray) -> np.ndarray:
    """P|psi> with P|b> = i^{|x&z|} (-1)^{|b&z|} |b xor x>."""
    if psi.size != 1 << P.n:
        raise ContractViolation(f"vector of length {psi.size} does not act on {P.n} qubits")
    b = np.arange(psi.size)
    phase = (1j) ** P.y_count * (1.0 - 2.0 * _parity(b, P.zbits, P.n))
    out = np.empty_like(psi)
    out[b ^ P.xbits] = phase * psi
    return out


def pauli_expectation(P: PauliString, s: StateModel) -> float:
    """chi_s(P) = Tr(P s)."""
    if P.n != s.n:
        raise ContractViolation(f"Pauli on {P.n} qubits applied to a {s.n}-qubit state")
    if P.is_identity:
        return 1.0
    if s.kind is QubitStateKind.MAXIMALLY_MIXED:
        return 0.0
    if s.kind is QubitStateKind.MIXTURE:
        return float(sum(w * pauli_expectation(P, c) for w, c in s.components))
    psi = s.amplitudes
    return float(np.real(np.vdot(psi, apply_pauli(P, psi))))


def _vector_table(psi: np.ndarray, n: int) -> np.ndarray:
    d = psi.size
    b = np.arange(d)
    x = np.arange(d)[:, None]
    # row x: conj(psi[b ^ x]) psi[b]; Walsh-Hadamard over b gives the z axis
    pairs = np.conj(psi[b[None, :] ^ x]) * psi[None, :]
    transformed = pairs @ hadamard(d)
    y = np.vectorize(popcount)(np.arange(d)[:, None] & np.arange(d)[None, :])
    values = np.real((1j) ** y * transformed)
    return values.ravel()[1:]


def _table_values(s: StateModel) -> np.ndarray:
    if s.kind is QubitStateKind.MAXIMALLY_MIXED:
        return np.zeros(4**s.n - 1)
    if s.kind is QubitStateKind.MIXTURE:
        return sum(w * _table_values(c) for w, c in s.components)
    return _vector_table(s.amplitudes, s.n)


def char_table(s: StateModel) -> CharacteristicTable:
    """Full characteristic table over the 4^n - 1 non-identity strings.

    Raises:
        CapacityError: n > 8; exhaustive tables stop at desk scale
    """
    if s.n > TABLE_MAX_QUBITS:
        raise CapacityError(
            f"full tables stop at n = {TABLE_MAX_QUBITS}; n = {s.n} needs sampled-norm mode",
            {"n": s.n},
        )
    values = np.clip(_table_values(s), -1.0, 1.0)
    table = CharacteristicTable(s.n, values, name=s.name)
    logger.debug("Characteristic table built", state=s.name, n=s.n, l1=table.l1)
    return table


def _symplectic_rank(words: Sequence[int]) -> int:
    rows = [w for w in words]
    rank = 0
    for bit in reversed(range(max(rows, default=0).bit_length())):
        pivot = next((i for i in range(rank, len(rows)) if rows[i] >> bit & 1), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] >> bit & 1:
                rows[i] ^= rows[rank]
        rank += 1
    return rank


def validate_generators(generators: Sequence[Generator]) -> int:
    """Check a stabiliser generating set and return its qubit count."""
    if not generators:
        raise ValidationError("stabiliser needs at least one generator")
    n = generators[0][1].n
    for sign, pauli in generators:
        if sign not in (1, -1):
            raise ValidationError(f"generator sign must be +1 or -1, got {sign}")
        if pauli.n != n:
            raise ValidationError("generators act on different qubit counts")
    if len(generators) != n:
        raise ValidationError(f"{n} qubits need exactly {n} generators, got {len(generators)}")
    for i, (_, a) in enumerate(generators):
        for _, b in generators[i + 1:]:
            if not a.commutes(b):
                raise ValidationError(f"generators {a.label} and {b.label} anticommute")
    if _symplectic_rank([p.index for _, p in generators]) != n:
        raise ValidationError("generators are not independent")
    return n


def stabilizer_group(generators: Sequence[Generator]) -> List[Generator]:
    """All 2^n signed elements of the group generated by ``generators``."""
    n = validate_generators(generators)
    if n > STATE_MAX_QUBITS:
        raise CapacityError(f"stabiliser enumeration stops at n = {STATE_MAX_QUBITS}")
    # phases as powers of i
    group: List[Tuple[int, PauliString]] = [(0, PauliString.identity(n))]
    for sign, generator in generators:
        extra = 0 if sign == 1 else 2
        group += [
            ((k + kc + extra) % 4, product)
            for k, element in group
            for kc, product in [element.compose(generator)]
        ]
    signed = []
    for k, element in group:
        if k % 2:
            raise ValidationError(f"element {element.label} picked up an imaginary phase")
        signed.append((1 if k == 0 else -1, element))
    return signed


def stabilizer_char(generators: Sequence[Generator]) -> CharacteristicTable:
    """Table with chi(P) = +-1 on the stabiliser group and 0 elsewhere."""
    group = stabilizer_group(generators)
    n = group[0][1].n
    if n > TABLE_MAX_QUBITS:
        raise CapacityError(f"full tables stop at n = {TABLE_MAX_QUBITS}", {"n": n})
    values = np.zeros(4**n - 1)
    for sign, element in group:
        if element.is_identity:
            if sign != 1:
                raise ValidationError("generators stabilise no state (-I in the group)")
            continue
        values[element.index - 1] = sign
    return CharacteristicTable(n, values, name="stabiliser:" + ",".join(
        ("+" if s == 1 else "-") + p.label for s, p in generators
    ))


def basis_state(bits: str) -> StateModel:
    """Computational basis vector; the leftmost character is qubit 0."""
    if not bits or set(bits) - {"0", "1"}:
        raise ValidationError(f"invalid bit string {bits!r}")
    psi = np.zeros(1 << len(bits), dtype=complex)
    psi[sum(int(c) << k for k, c in enumerate(bits))] = 1.0
    return StateModel.vector(psi, name=f"basis:{bits}")


def ghz_state(n: int) -> StateModel:
    if not 1 <= n <= STATE_MAX_QUBITS:
        raise PreconditionError(f"GHZ states are built for 1 <= n <= {STATE_MAX_QUBITS}")
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = psi[-1] = 1.0 / math.sqrt(2.0)
    return StateModel.vector(psi, name=f"ghz:{n}")


def ghz_generators(n: int) -> List[Generator]:
    """+X...X and +Z_k Z_{k+1} for neighbouring sites."""
    full = (1 << n) - 1
    gens = [(1, PauliString(n, full, 0))]
    gens += [(1, PauliString(n, 0, 0b11 << k)) for k in range(n - 1)]
    return gens


def haar_state(n: int, seed: int) -> StateModel:
    """Haar-random pure state from normalised i.i.d. complex Gaussians."""
    if not 1 <= n <= STATE_MAX_QUBITS:
        raise PreconditionError(f"Haar states are drawn for 1 <= n <= {STATE_MAX_QUBITS}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return StateModel.vector(z / np.linalg.norm(z), name=f"haar:{n}@{seed}")


def fidelity_pauli_exact(rho: StateModel, sigma: StateModel) -> float:
    """F = (1/d) sum over all P of chi_rho(P) chi_sigma(P), identity included.

    Raises:
        ContractViolation: sizes differ or rho is not pure
    """
    if rho.n != sigma.n:
        raise ContractViolation(f"fidelity between {rho.n} and {sigma.n} qubits")
    t_rho, t_sigma = char_table(rho), char_table(sigma)
    if t_rho.purity < 1.0 - PURITY_TOL:
        raise ContractViolation(f"target {rho.name} is not pure (purity {t_rho.purity:.12g})")
    return float((1.0 + np.dot(t_rho.values, t_sigma.values)) / t_rho.dim)


def table_function(table: CharacteristicTable) -> NodalFunction:
    """The table as a function on Pauli indices under the (1/d) counting measure."""
    full = np.concatenate([[1.0], table.values])
    return NodalFunction(
        values=np.asarray(table.values, dtype=float),
        weights=np.full(table.values.size, 1.0 / table.dim),
        points=np.arange(1, 4**table.n),
        domain=Domain.DV,
        scale=1.0,
        bound=1.0,
        source=table,
        evaluate=lambda idx: full[np.asarray(idx, dtype=np.int64)],
        modes=table.n,
    )


def pauli_worst_case_budget(n: int, epsilon: float, delta: float) -> int:
    """ceil(2 (sqrt(d) / eps)^2 ln(1/delta)), the budget any n-qubit target fits under."""
    if not (epsilon > 0 and 0 < delta < 1):
        raise PreconditionError("need epsilon > 0 and delta in (0, 1)")
    return math.ceil(2.0 * (1 << n) / epsilon**2 * math.log(1.0 / delta))
