"""Discretised real functions on a measure space.

Phase-space functions carry weights of mu_W = pi^m * Lebesgue; Pauli tables
carry the (1/d) counting measure. All norms and level-set integrals below
are taken under that measure.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, List, Optional, Sequence

import numpy as np

from overlapix.core.exceptions import ContractViolation


class Domain(str, Enum):
    CV = "cv"
    DV = "dv"


class MeasuredFunction(ABC):
    """A function together with the quadrature (or counting) measure it lives on."""

    domain: Domain
    modes: int
    scale: float
    bound: float
    source: Any
    evaluate: Callable[[np.ndarray], np.ndarray]

    @abstractmethod
    def l1(self) -> float: ...

    @abstractmethod
    def l2_squared(self) -> float: ...

    @abstractmethod
    def linf(self) -> float: ...

    @abstractmethod
    def sublevel_sq_mass(self, c: float) -> float:
        """Integral of f^2 over {|f| < c}."""

    @abstractmethod
    def superlevel_l1(self, c: float) -> float:
        """Integral of |f| over {|f| >= c}."""

    def l2(self) -> float:
        return float(np.sqrt(self.l2_squared()))

    def snap_threshold(self, c: float, eps_sq: float) -> float:
        """Move a feasible threshold to the exact discrete supremum when one is available."""
        return c

    def tail_l1(self, delta: float, omega0_radius: float) -> float:
        """Integral of |f| over {|f| <= delta} outside the disc Omega_0."""
        raise ContractViolation(f"{type(self).__name__} has no tail integral")

    def omega0_measure(self, omega0_radius: float) -> float:
        """mu(Omega_0) for a disc of the given |alpha| radius."""
        return self.scale * np.pi * omega0_radius**2


class _SortedLevels:
    """Magnitudes sorted ascending with prefix sums of w|f| and w f^2."""

    def __init__(self, magnitudes: np.ndarray, weights: np.ndarray):
        order = np.argsort(magnitudes, kind="stable")
        self.mags = magnitudes[order]
        w = weights[order]
        self.cum_l1 = np.concatenate([[0.0], np.cumsum(w * self.mags)])
        self.cum_sq = np.concatenate([[0.0], np.cumsum(w * self.mags**2)])

    def below(self, c: float) -> int:
        return int(np.searchsorted(self.mags, c, side="left"))

    def sublevel_sq(self, c: float) -> float:
        return float(self.cum_sq[self.below(c)])

    def superlevel_l1(self, c: float) -> float:
        return float(self.cum_l1[-1] - self.cum_l1[self.below(c)])

    def exact_threshold(self, eps_sq: float) -> float:
        # longest droppable prefix; entries tied with the first kept one stay kept
        k = int(np.searchsorted(self.cum_sq[1:], eps_sq, side="right"))
        return float("inf") if k >= self.mags.size else float(self.mags[k])


@dataclass(eq=False)
class NodalFunction(MeasuredFunction):
    """Function sampled on weighted nodes (phase-space quadrature or Pauli indices)."""

    values: np.ndarray
    weights: np.ndarray
    points: np.ndarray
    domain: Domain
    scale: float
    bound: float
    source: Any
    evaluate: Callable[[np.ndarray], np.ndarray]
    modes: int = 1
    center: Optional[Sequence[float]] = None
    extra_linf: float = 0.0

    def __post_init__(self):
        if self.values.shape != self.weights.shape:
            raise ContractViolation("values and weights must align")
        self._levels = _SortedLevels(np.abs(self.values), self.weights)

    def l1(self) -> float:
        return float(self._levels.cum_l1[-1])

    def l2_squared(self) -> float:
        return float(self._levels.cum_sq[-1])

    def linf(self) -> float:
        top = float(self._levels.mags[-1]) if self.values.size else 0.0
        return max(top, self.extra_linf)

    def sublevel_sq_mass(self, c: float) -> float:
        return self._levels.sublevel_sq(c)

    def superlevel_l1(self, c: float) -> float:
        return self._levels.superlevel_l1(c)

    def snap_threshold(self, c: float, eps_sq: float) -> float:
        return self._levels.exact_threshold(eps_sq)

    def outside(self, omega0_radius: float) -> np.ndarray:
        if self.domain is Domain.DV:
            if omega0_radius > 0:
                raise ContractViolation("Pauli tables only support an empty Omega_0")
            return np.ones(self.values.shape, dtype=bool)
        center = np.zeros(2) if self.center is None else np.asarray(self.center[:2])
        radius = np.sqrt(0.5 * np.sum((self.points - center) ** 2, axis=1))
        return radius > omega0_radius

    def tail_l1(self, delta: float, omega0_radius: float) -> float:
        mask = self.outside(omega0_radius) & (np.abs(self.values) <= delta)
        return float(np.sum(self.weights[mask] * np.abs(self.values[mask])))

    def omega0_measure(self, omega0_radius: float) -> float:
        if self.domain is Domain.DV:
            return 0.0
        return super().omega0_measure(omega0_radius)


@dataclass(eq=False)
class Cluster:
    """One separable block a(x) h(p) of a spike Wigner function.

    Only the sorted momentum profile is retained; the raw panel arrays of
    the widest blocks hold millions of nodes.
    """

    x_center: float
    delta: float
    amplitude: np.ndarray
    x_weights: np.ndarray
    levels: _SortedLevels
    peak: float

    @classmethod
    def build(
        cls,
        x_center: float,
        delta: float,
        amplitude: np.ndarray,
        x_weights: np.ndarray,
        p_abs_profile: np.ndarray,
        p_weights: np.ndarray,
    ) -> "Cluster":
        levels = _SortedLevels(p_abs_profile, p_weights)
        peak = float(np.max(amplitude)) * float(levels.mags[-1])
        return cls(x_center, delta, amplitude, x_weights, levels, peak)

    @property
    def size(self) -> int:
        return int(self.amplitude.size * self.levels.mags.size)


@dataclass(eq=False)
class ClusteredFunction(MeasuredFunction):
    """Sum of well separated separable blocks; level sets are resolved per block."""

    clusters: List[Cluster]
    scale: float
    bound: float
    source: Any
    evaluate: Callable[[np.ndarray], np.ndarray]
    extra_linf: float = 0.0
    domain: Domain = Domain.CV
    modes: int = 1

    def _per_block(self, c: float, kind: str) -> float:
        total = 0.0
        for cl in self.clusters:
            a, wa = cl.amplitude, cl.x_weights
            live = a > 0
            a, wa = a[live], wa[live]
            with np.errstate(divide="ignore", invalid="ignore"):
                idx = np.searchsorted(cl.levels.mags, c / a, side="left")
            if kind == "sq":
                total += float(np.sum(wa * a * a * cl.levels.cum_sq[idx]))
            else:
                total += float(np.sum(wa * a * (cl.levels.cum_l1[-1] - cl.levels.cum_l1[idx])))
        return self.scale * total

    def l1(self) -> float:
        return self.superlevel_l1(0.0)

    def l2_squared(self) -> float:
        return self.sublevel_sq_mass(float("inf"))

    def linf(self) -> float:
        return max(max(cl.peak for cl in self.clusters), self.extra_linf)

    def sublevel_sq_mass(self, c: float) -> float:
        return self._per_block(c, "sq")

    def superlevel_l1(self, c: float) -> float:
        return self._per_block(c, "l1")
