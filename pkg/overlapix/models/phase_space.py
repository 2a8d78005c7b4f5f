"""Phase-space points and quadrature grids.

Coordinates are (x_1..x_m, p_1..p_m) with alpha = (x + i p) / sqrt(2).
Grid weights integrate against d^2 alpha = dx dp / 2 per mode.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from overlapix.core.exceptions import ContractViolation

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class PhasePoint:
    """A single point in 2m-dimensional phase space."""

    coords: Tuple[float, ...]

    def __post_init__(self):
        if len(self.coords) == 0 or len(self.coords) % 2:
            raise ContractViolation(f"phase point needs 2m coordinates, got {len(self.coords)}")
        if not np.all(np.isfinite(self.coords)):
            raise ContractViolation("phase point coordinates must be finite")

    @classmethod
    def from_alpha(cls, alpha: Sequence[complex]) -> "PhasePoint":
        """Build the point for complex amplitudes alpha."""
        alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
        coords = np.concatenate([SQRT2 * alpha.real, SQRT2 * alpha.imag])
        return cls(tuple(float(c) for c in coords))

    @property
    def modes(self) -> int:
        return len(self.coords) // 2

    @property
    def alpha(self) -> np.ndarray:
        c = np.asarray(self.coords)
        return (c[: self.modes] + 1j * c[self.modes:]) / SQRT2

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


class GridScheme(str, Enum):
    """Quadrature layouts."""

    RADIAL = "radial"
    CARTESIAN = "cartesian"
    CLUSTERED = "clustered"


def gauss_legendre(a: float, b: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped from [-1, 1] to [a, b]."""
    y, w = leggauss(n)
    return 0.5 * (y + 1.0) * (b - a) + a, 0.5 * (b - a) * w


def paneled_gauss_legendre(edges: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule with ``n`` nodes on each panel between ``edges``."""
    y, w = leggauss(n)
    left, right = edges[:-1, None], edges[1:, None]
    half = 0.5 * (right - left)
    nodes = (left + half * (y[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class QuadratureGrid:
    """Integration grid over one-mode phase space.

    ``R`` is a radius in |alpha| units around ``center`` (given in (x, p)).
    Radial grids split [0, R] at ``breakpoints`` and use ``n_angles`` uniform
    angles; ``n_angles == 1`` integrates radially symmetric functions only.
    Clustered grids carry panel sizes only; the nodes come from the state.
    """

    scheme: GridScheme
    nodes_per_axis: int
    R: float
    center: Tuple[float, float] = (0.0, 0.0)
    breakpoints: Tuple[float, ...] = field(default_factory=tuple)
    n_angles: int = 1

    def __post_init__(self):
        if self.nodes_per_axis < 1:
            raise ContractViolation("nodes_per_axis must be positive")
        if not self.R > 0:
            raise ContractViolation("grid radius must be positive")

    @property
    def modes(self) -> int:
        return 1

    def refined(self) -> "QuadratureGrid":
        """Same layout with twice the nodes per axis (and angles, when used)."""
        angles = self.n_angles * 2 if self.n_angles > 1 else 1
        return replace(self, nodes_per_axis=self.nodes_per_axis * 2, n_angles=angles)

    def radial_rule(self) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes ``s`` on [0, R] and weights for the integral of g(s) * s ds."""
        inner = [b for b in sorted(self.breakpoints) if 0.0 < b < self.R]
        edges = np.asarray([0.0, *inner, self.R])
        s, w = paneled_gauss_legendre(edges, self.nodes_per_axis)
        return s, w * s

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Points of shape (N, 2) and Lebesgue d^2 alpha weights of shape (N,)."""
        if self.scheme is GridScheme.RADIAL:
            s, ws = self.radial_rule()
            theta = 2.0 * np.pi * np.arange(self.n_angles) / self.n_angles
            ss, tt = np.meshgrid(s, theta, indexing="ij")
            points = np.stack(
                [
                    self.center[0] + SQRT2 * ss * np.cos(tt),
                    self.center[1] + SQRT2 * ss * np.sin(tt),
                ],
                axis=-1,
            ).reshape(-1, 2)
            weights = np.repeat(ws * (2.0 * np.pi / self.n_angles), self.n_angles)
            return points, weights
        if self.scheme is GridScheme.CARTESIAN:
            half = SQRT2 * self.R
            x, wx = gauss_legendre(self.center[0] - half, self.center[0] + half, self.nodes_per_axis)
            p, wp = gauss_legendre(self.center[1] - half, self.center[1] + half, self.nodes_per_axis)
            xx, pp = np.meshgrid(x, p, indexing="ij")
            points = np.stack([xx, pp], axis=-1).reshape(-1, 2)
            weights = (0.5 * np.outer(wx, wp)).ravel()
            return points, weights
        raise ContractViolation("clustered grids take their nodes from the state they integrate")

    def self_check(self) -> float:
        """Absolute error of the grid on its reference integral.

        Radial: the integral of s ds over [0, R]. Cartesian: the integral of the
        unit Gaussian (1/pi) exp(-|alpha - center|^2) d^2 alpha.
        """
        if self.scheme is GridScheme.RADIAL:
            _, ws = self.radial_rule()
            return abs(float(np.sum(ws)) - 0.5 * self.R**2)
        points, weights = self.nodes()
        d2 = 0.5 * ((points[:, 0] - self.center[0]) ** 2 + (points[:, 1] - self.center[1]) ** 2)
        return abs(float(np.sum(weights * np.exp(-d2) / np.pi)) - 1.0)
