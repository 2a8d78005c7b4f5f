"""Pauli strings, qubit state models and characteristic-function tables."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, List, Tuple

import numpy as np

from overlapix.core.exceptions import ContractViolation, ValidationError

NORM_TOL = 1e-12
_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {letter: bits for bits, letter in _LETTERS.items()}


def popcount(value: int) -> int:
    return bin(value).count("1")


@dataclass(frozen=True, order=True)
class PauliString:
    """Hermitian n-qubit Pauli string in (x|z) bit encoding.

    Site k carries X iff bit k of ``xbits`` is set, Z iff bit k of ``zbits``
    is set, and Y iff both are. The enumeration index is ``xbits << n | zbits``.
    """

    n: int
    xbits: int
    zbits: int

    def __post_init__(self):
        if self.n < 1:
            raise ContractViolation("Pauli strings need at least one qubit")
        limit = 1 << self.n
        if not (0 <= self.xbits < limit and 0 <= self.zbits < limit):
            raise ContractViolation(f"bit words do not fit {self.n} qubits")

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0)

    @classmethod
    def from_index(cls, n: int, index: int) -> "PauliString":
        if not 0 <= index < 4**n:
            raise ContractViolation(f"index {index} outside the 4^{n} enumeration")
        return cls(n, index >> n, index & ((1 << n) - 1))

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse e.g. ``"XZI"``; the leftmost letter acts on qubit 0."""
        label = label.strip().upper()
        if not label or any(ch not in _BITS for ch in label):
            raise ValidationError(f"invalid Pauli label {label!r}")
        x = z = 0
        for site, letter in enumerate(label):
            bx, bz = _BITS[letter]
            x |= bx << site
            z |= bz << site
        return cls(len(label), x, z)

    @property
    def index(self) -> int:
        return (self.xbits << self.n) | self.zbits

    @property
    def is_identity(self) -> bool:
        return self.xbits == 0 and self.zbits == 0

    @property
    def y_count(self) -> int:
        return popcount(self.xbits & self.zbits)

    @property
    def label(self) -> str:
        return "".join(
            _LETTERS[((self.xbits >> k) & 1, (self.zbits >> k) & 1)] for k in range(self.n)
        )

    def symplectic(self, other: "PauliString") -> int:
        """Symplectic inner product; 0 iff the strings commute."""
        self._check_size(other)
        return (popcount(self.xbits & other.zbits) + popcount(self.zbits & other.xbits)) % 2

    def commutes(self, other: "PauliString") -> bool:
        return self.symplectic(other) == 0

    def compose(self, other: "PauliString") -> Tuple[int, "PauliString"]:
        """Return (k, Q) with self @ other = i^k Q."""
        self._check_size(other)
        product = PauliString(self.n, self.xbits ^ other.xbits, self.zbits ^ other.zbits)
        k = (
            self.y_count
            + other.y_count
            + 2 * popcount(self.zbits & other.xbits)
            - product.y_count
        ) % 4
        return k, product

    def _check_size(self, other: "PauliString") -> None:
        if other.n != self.n:
            raise ContractViolation(f"Pauli size mismatch: {self.n} vs {other.n}")


def iter_paulis(n: int, include_identity: bool = False) -> Iterator[PauliString]:
    """Pauli strings in enumeration order."""
    for index in range(0 if include_identity else 1, 4**n):
        yield PauliString.from_index(n, index)


class QubitStateKind(str, Enum):
    VECTOR = "vector"
    MIXTURE = "mixture"
    MAXIMALLY_MIXED = "maximally_mixed"


@dataclass(frozen=True, eq=False)
class StateModel:
    """Qubit state: a unit vector, a convex mixture, or the maximally mixed state."""

    kind: QubitStateKind
    n: int
    amplitudes: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    components: Tuple[Tuple[float, "StateModel"], ...] = field(default_factory=tuple)
    name: str = ""

    @classmethod
    def vector(cls, amplitudes: Iterable[complex], name: str = "") -> "StateModel":
        psi = np.asarray(list(amplitudes), dtype=complex)
        n = int(round(np.log2(psi.size))) if psi.size else 0
        if psi.size < 2 or 1 << n != psi.size:
            raise ValidationError(f"amplitude vector length {psi.size} is not a power of two")
        if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
            raise ValidationError(f"state vector norm {np.linalg.norm(psi):.15g} differs from 1")
        psi.setflags(write=False)
        return cls(QubitStateKind.VECTOR, n, amplitudes=psi, name=name)

    @classmethod
    def maximally_mixed(cls, n: int) -> "StateModel":
        if n < 1:
            raise ValidationError("qubit count must be positive")
        return cls(QubitStateKind.MAXIMALLY_MIXED, n, name=f"mixed:{n}")

    @classmethod
    def mixture(cls, items: Iterable[Tuple[float, "StateModel"]], name: str = "") -> "StateModel":
        items = tuple((float(w), s) for w, s in items)
        if not items:
            raise ValidationError("mixture needs at least one component")
        weights = np.array([w for w, _ in items])
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > NORM_TOL:
            raise ValidationError("mixture weights must be nonnegative and sum to 1")
        sizes = {s.n for _, s in items}
        if len(sizes) != 1:
            raise ValidationError("mixture components act on different qubit counts")
        label = name or "mix:" + ",".join(f"{s.name}={w:g}" for w, s in items)
        return cls(QubitStateKind.MIXTURE, sizes.pop(), components=items, name=label)

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def is_vector(self) -> bool:
        return self.kind is QubitStateKind.VECTOR


@dataclass(frozen=True, eq=False)
class CharacteristicTable:
    """chi(P) = Tr(P rho) over the 4^n - 1 non-identity strings, in enumeration order.

    Norms use the measure (1/d) * counting, d = 2^n.
    """

    n: int
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.values.shape != (4**self.n - 1,):
            raise ContractViolation(
                f"table for n={self.n} needs {4**self.n - 1} entries, got {self.values.shape}"
            )
        if np.any(np.abs(self.values) > 1.0 + 1e-9):
            raise ContractViolation("characteristic values must lie in [-1, 1]")
        self.values.setflags(write=False)

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def l1(self) -> float:
        return float(np.sum(np.abs(self.values)) / self.dim)

    @property
    def l2(self) -> float:
        return float(np.sqrt(np.sum(self.values**2) / self.dim))

    @property
    def linf(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    @property
    def norms(self) -> Tuple[float, float, float]:
        return self.l1, self.l2, self.linf

    @property
    def purity(self) -> float:
        """Tr(rho^2) via Parseval under the 1/d measure."""
        return float((1.0 + np.sum(self.values**2)) / self.dim)

    def value(self, pauli: PauliString) -> float:
        if pauli.n != self.n:
            raise ContractViolation(f"Pauli size {pauli.n} does not match table size {self.n}")
        return 1.0 if pauli.is_identity else float(self.values[pauli.index - 1])

    def nonzero_count(self, atol: float = 1e-12) -> int:
        return int(np.count_nonzero(np.abs(self.values) > atol))

    def csv_rows(self) -> List[Tuple[int, str, str, float]]:
        """Rows (index, xbits-hex, zbits-hex, value) for audit export."""
        width = max(1, (self.n + 3) // 4)
        rows = []
        for offset, value in enumerate(self.values):
            p = PauliString.from_index(self.n, offset + 1)
            rows.append((p.index, f"{p.xbits:0{width}x}", f"{p.zbits:0{width}x}", float(value)))
        return rows
