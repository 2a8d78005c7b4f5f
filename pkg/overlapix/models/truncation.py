"""Threshold truncations f~ = f * 1{|f| >= c*}."""

import math
from dataclasses import dataclass

import numpy as np

from overlapix.models.measured import MeasuredFunction, NodalFunction


@dataclass(frozen=True, eq=False)
class TruncatedFunction:
    """Feasible witness for the smoothed L1-norm of ``source`` at level ``epsilon``.

    ``l1_tilde`` and ``l2_residual`` are measured under the source measure.
    A degenerate truncation is the zero function (``c_star`` is infinite).
    """

    source: MeasuredFunction
    epsilon: float
    c_star: float
    l1_tilde: float
    l2_residual: float

    @property
    def degenerate(self) -> bool:
        return math.isinf(self.c_star) or self.l1_tilde == 0.0

    @property
    def l1_lebesgue(self) -> float:
        """l1_tilde without the pi^m rescaling of phase-space measures."""
        return self.l1_tilde / self.source.scale

    def kept(self, values: np.ndarray) -> np.ndarray:
        """Support descriptor: membership of {|f| >= c*} for given function values."""
        return np.abs(values) >= self.c_star

    def apply(self, values: np.ndarray) -> np.ndarray:
        """f~ from values of f."""
        return np.where(self.kept(values), values, 0.0)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return self.apply(self.source.evaluate(points))

    def nodal_values(self) -> np.ndarray:
        """f~ on the nodes of a nodal source."""
        if not isinstance(self.source, NodalFunction):
            raise TypeError("nodal values need a nodal source")
        return self.apply(self.source.values)
