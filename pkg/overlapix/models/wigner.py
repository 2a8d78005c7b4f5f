"""Continuous-variable state models with closed-form Wigner functions."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from overlapix.core.exceptions import ValidationError

WEIGHT_TOL = 1e-12
SPIKE_MARGIN = 5.0
SPIKE_MOMENTUM_EXTENT = 6.5


class StateKind(str, Enum):
    """Families of Wigner evaluators."""

    FOCK = "fock"
    COHERENT = "coherent"
    SPIKE = "spike"
    MIXTURE = "mixture"


@dataclass(frozen=True)
class WignerEvaluator:
    """Immutable description of a CV state whose Wigner function is known in closed form.

    Use the ``fock``, ``coherent``, ``spike`` and ``mixture`` constructors;
    evaluation lives in :func:`overlapix.services.cv_states.wigner_eval`.
    """

    kind: StateKind
    n: int = 0
    beta: Tuple[complex, ...] = field(default_factory=tuple)
    components: Tuple[Tuple[float, "WignerEvaluator"], ...] = field(default_factory=tuple)

    @classmethod
    def fock(cls, n: int) -> "WignerEvaluator":
        if n < 0:
            raise ValidationError(f"Fock number must be nonnegative, got {n}")
        return cls(StateKind.FOCK, n=int(n))

    @classmethod
    def coherent(cls, beta: Sequence[complex] | complex) -> "WignerEvaluator":
        values = tuple(complex(b) for b in np.atleast_1d(np.asarray(beta, dtype=complex)))
        if not values or not all(np.isfinite(b.real) and np.isfinite(b.imag) for b in values):
            raise ValidationError("coherent amplitude must be finite")
        return cls(StateKind.COHERENT, beta=values)

    @classmethod
    def spike(cls, n: int) -> "WignerEvaluator":
        if n < 1:
            raise ValidationError(f"spike index must be positive, got {n}")
        return cls(StateKind.SPIKE, n=int(n))

    @classmethod
    def mixture(cls, items: Iterable[Tuple[float, "WignerEvaluator"]]) -> "WignerEvaluator":
        items = tuple((float(w), state) for w, state in items)
        if not items:
            raise ValidationError("mixture needs at least one component")
        weights = np.array([w for w, _ in items])
        if np.any(weights < 0) or np.any(weights > 1):
            raise ValidationError("mixture weights must lie in [0, 1]")
        if abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"mixture weights sum to {weights.sum():.15g}, expected 1")
        if len({state.modes for _, state in items}) != 1:
            raise ValidationError("mixture components must share the mode count")
        return cls(StateKind.MIXTURE, components=items)

    @property
    def modes(self) -> int:
        if self.kind is StateKind.COHERENT:
            return len(self.beta)
        if self.kind is StateKind.MIXTURE:
            return self.components[0][1].modes
        return 1

    @property
    def sup_bound(self) -> float:
        """The displaced-parity magnitude r = (2/pi)^m."""
        return (2.0 / np.pi) ** self.modes

    @property
    def is_pure(self) -> bool:
        if self.kind is StateKind.MIXTURE:
            return len(self.components) == 1 and self.components[0][1].is_pure
        return True

    @property
    def center(self) -> Optional[Tuple[float, ...]]:
        """Phase-space centre of radial symmetry, or None when there is none."""
        if self.kind is StateKind.FOCK:
            return (0.0, 0.0)
        if self.kind is StateKind.COHERENT:
            b = np.asarray(self.beta)
            return tuple(float(c) for c in np.concatenate([np.sqrt(2) * b.real, np.sqrt(2) * b.imag]))
        if self.kind is StateKind.MIXTURE:
            centers = {state.center for _, state in self.components}
            if len(centers) == 1:
                return centers.pop()
        return None

    @property
    def radial_symmetric(self) -> bool:
        return self.center is not None

    @property
    def support_radius(self) -> float:
        """Effective truncation radius used for quadrature and sampling."""
        if self.kind is StateKind.FOCK:
            return float(np.sqrt(self.n + 1) + 7.0)
        if self.kind is StateKind.COHERENT:
            return 7.0
        if self.kind is StateKind.SPIKE:
            return float(self.n * 3**self.n + SPIKE_MARGIN)
        return max(state.support_radius for _, state in self.components)

    def bounding_box(self) -> Tuple[float, float, float, float]:
        """(x_min, x_max, p_min, p_max) outside which W is negligible (one mode)."""
        if self.kind is StateKind.SPIKE:
            mu = self.spike_positions()
            return (
                float(mu[0] - SPIKE_MARGIN),
                float(mu[-1] + SPIKE_MARGIN),
                -SPIKE_MOMENTUM_EXTENT,
                SPIKE_MOMENTUM_EXTENT,
            )
        if self.kind is StateKind.MIXTURE:
            boxes = np.array([state.bounding_box() for _, state in self.components])
            return (
                float(boxes[:, 0].min()),
                float(boxes[:, 1].max()),
                float(boxes[:, 2].min()),
                float(boxes[:, 3].max()),
            )
        x0, p0 = self.center[0], self.center[self.modes]
        half = np.sqrt(2.0) * self.support_radius
        return (x0 - half, x0 + half, p0 - half, p0 + half)

    def spike_positions(self) -> np.ndarray:
        """Spike positions mu_k = n 3^k, k = 1..n."""
        return self.n * 3.0 ** np.arange(1, self.n + 1)

    @property
    def label(self) -> str:
        if self.kind is StateKind.FOCK:
            return f"fock:{self.n}"
        if self.kind is StateKind.SPIKE:
            return f"spike:{self.n}"
        if self.kind is StateKind.COHERENT:
            return "coherent:" + ";".join(f"{b.real:g},{b.imag:g}" for b in self.beta)
        return "mix:" + ",".join(f"{state.label}={w:g}" for w, state in self.components)
