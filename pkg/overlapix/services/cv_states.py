"""Closed-form Wigner functions and phase-space quadrature.

Everything here is stateless; evaluators are immutable and discretisations
are cached per (state, grid) pair.
"""

from functools import lru_cache
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import roots_laguerre

from overlapix.core.config import get_settings
from overlapix.core.exceptions import (
    CapacityError,
    ContractViolation,
    PreconditionError,
    QuadratureError,
)
from overlapix.core.logging import get_logger
from overlapix.models.measured import Cluster, ClusteredFunction, Domain, MeasuredFunction, NodalFunction
from overlapix.models.phase_space import (
    SQRT2,
    GridScheme,
    PhasePoint,
    QuadratureGrid,
    gauss_legendre,
    paneled_gauss_legendre,
)
from overlapix.models.wigner import SPIKE_MARGIN, SPIKE_MOMENTUM_EXTENT, StateKind, WignerEvaluator

logger = get_logger(__name__)

TWO_OVER_PI = 2.0 / np.pi
LAGUERRE_MAX_N = 10**6
SPIKE_MAX_N = 8
SPIKE_X_HALFWIDTH = 3.0
SPIKE_FLAT_PANEL = 0.5
CARTESIAN_INITIAL_NODES = 64
CARTESIAN_MAX_NODES = 4096
ROOT_SCAN_POINTS = 4000
EVAL_CHUNK = 16384

PointsLike = Union[PhasePoint, np.ndarray, Sequence[float]]


class NormTriple(NamedTuple):
    l1: float
    l2: float
    linf: float


class SpikeNorms(NamedTuple):
    linf: float
    l1: float
    c_n: float


def laguerre_eval(n: int, x):
    """Laguerre polynomial L_n(x) by the three-term recurrence.

    Args:
        n: Degree, 0 <= n <= 10^6
        x: Finite scalar or array

    Returns:
        L_n(x) with the shape of ``x`` (a float for scalar input)
    """
    if not 0 <= n <= LAGUERRE_MAX_N:
        raise PreconditionError(f"Laguerre degree {n} outside [0, {LAGUERRE_MAX_N}]")
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("Laguerre argument must be finite")

    prev = np.ones_like(arr)
    cur = prev if n == 0 else 1.0 - arr
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - arr) * cur - k * prev) / (k + 1)
    return float(cur) if cur.ndim == 0 else cur


def spike_normalisation(n: int) -> float:
    """c_n = sum over k, l of exp(-(mu_k - mu_l)^2 / 2)."""
    mu = WignerEvaluator.spike(n).spike_positions()
    return float(np.sum(np.exp(-0.5 * (mu[:, None] - mu[None, :]) ** 2)))


def spike_overlap(a: int, b: int) -> float:
    """Wavefunction overlap <psi_a|psi_b> of two spike states (real, closed form)."""
    mu_a = WignerEvaluator.spike(a).spike_positions()
    mu_b = WignerEvaluator.spike(b).spike_positions()
    raw = np.sum(np.exp(-0.5 * (mu_a[:, None] - mu_b[None, :]) ** 2))
    return float(raw / np.sqrt(spike_normalisation(a) * spike_normalisation(b)))


def spike_fidelity(n: int, sigma: WignerEvaluator) -> float:
    """F(psi_n, sigma) = sum_i w_i |<psi_n|psi_{n_i}>|^2 for a spike or a mixture of spikes."""
    if sigma.kind is StateKind.SPIKE:
        return spike_overlap(n, sigma.n) ** 2
    if sigma.kind is StateKind.MIXTURE:
        return float(sum(w * spike_fidelity(n, state) for w, state in sigma.components))
    raise ContractViolation(f"closed-form spike fidelity needs spike components, got {sigma.label}")


def _as_points(alpha: PointsLike, modes: int) -> Tuple[np.ndarray, bool]:
    if isinstance(alpha, PhasePoint):
        arr, scalar = alpha.as_array()[None, :], True
    else:
        arr = np.asarray(alpha, dtype=float)
        scalar = arr.ndim == 1
        arr = np.atleast_2d(arr)
    if arr.shape[-1] != 2 * modes:
        raise ContractViolation(
            f"phase point has {arr.shape[-1]} coordinates, evaluator needs {2 * modes}"
        )
    return arr, scalar


def _fock_values(n: int, pts: np.ndarray) -> np.ndarray:
    s2 = 0.5 * (pts[:, 0] ** 2 + pts[:, 1] ** 2)
    sign = -1.0 if n % 2 else 1.0
    return TWO_OVER_PI * sign * np.exp(-2.0 * s2) * laguerre_eval(n, 4.0 * s2)


def _coherent_values(state: WignerEvaluator, pts: np.ndarray) -> np.ndarray:
    d2 = 0.5 * np.sum((pts - np.asarray(state.center)) ** 2, axis=1)
    return state.sup_bound * np.exp(-2.0 * d2)


def _spike_values(n: int, pts: np.ndarray) -> np.ndarray:
    mu = WignerEvaluator.spike(n).spike_positions()
    k, l = np.triu_indices(n)
    centres = 0.5 * (mu[k] + mu[l])
    deltas = mu[l] - mu[k]
    coef = np.where(k == l, 1.0, 2.0) * TWO_OVER_PI / spike_normalisation(n)

    out = np.empty(pts.shape[0])
    for start in range(0, pts.shape[0], EVAL_CHUNK):
        x = pts[start:start + EVAL_CHUNK, 0:1]
        p = pts[start:start + EVAL_CHUNK, 1:2]
        terms = coef * np.exp(-2.0 * (x - centres) ** 2) * np.cos(p * deltas)
        out[start:start + EVAL_CHUNK] = np.exp(-0.5 * p[:, 0] ** 2) * terms.sum(axis=1)
    return out


def _values(state: WignerEvaluator, pts: np.ndarray) -> np.ndarray:
    if state.kind is StateKind.FOCK:
        return _fock_values(state.n, pts)
    if state.kind is StateKind.COHERENT:
        return _coherent_values(state, pts)
    if state.kind is StateKind.SPIKE:
        return _spike_values(state.n, pts)
    total = np.zeros(pts.shape[0])
    for weight, component in state.components:
        total += weight * _values(component, pts)
    return total


def wigner_eval(W: WignerEvaluator, alpha: PointsLike):
    """Evaluate W at one phase point or at an (N, 2m) array of points."""
    if W.kind is StateKind.SPIKE and W.modes != 1:
        raise ContractViolation("spike states are single-mode")
    pts, scalar = _as_points(alpha, W.modes)
    values = _values(W, pts)
    return float(values[0]) if scalar else values


def _radial_profile(W: WignerEvaluator) -> Callable[[np.ndarray], np.ndarray]:
    center = np.asarray(W.center, dtype=float)

    def profile(s: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        pts = np.tile(center, (s.size, 1))
        pts[:, 0] += SQRT2 * s
        return _values(W, pts)

    return profile


def radial_sign_changes(W: WignerEvaluator, R: float) -> Tuple[float, ...]:
    """Radii in (0, R) where a radially symmetric W changes sign."""
    if W.kind is StateKind.FOCK:
        if W.n == 0:
            return ()
        # zeros of L_n(4 s^2)
        s = np.sqrt(roots_laguerre(W.n)[0]) / 2.0
        return tuple(float(v) for v in s if v < R)
    if W.kind is StateKind.COHERENT:
        return ()

    profile = _radial_profile(W)
    grid = np.linspace(0.0, R, ROOT_SCAN_POINTS + 1)
    values = profile(grid)
    flips = np.nonzero(np.signbit(values[:-1]) != np.signbit(values[1:]))[0]
    return tuple(
        float(brentq(lambda s: float(profile(s)[0]), grid[i], grid[i + 1], xtol=1e-14))
        for i in flips
    )


def _cartesian_cover(states: Sequence[WignerEvaluator]) -> QuadratureGrid:
    boxes = np.array([state.bounding_box() for state in states])
    x_lo, x_hi = boxes[:, 0].min(), boxes[:, 1].max()
    p_lo, p_hi = boxes[:, 2].min(), boxes[:, 3].max()
    half = 0.5 * max(x_hi - x_lo, p_hi - p_lo)
    center = (float(0.5 * (x_lo + x_hi)), float(0.5 * (p_lo + p_hi)))
    return QuadratureGrid(
        GridScheme.CARTESIAN, CARTESIAN_INITIAL_NODES, R=float(half / SQRT2), center=center
    )


def default_grid(W: WignerEvaluator, other: Optional[WignerEvaluator] = None) -> QuadratureGrid:
    """Starting grid for ``W`` alone (norms) or for the product W * other (overlaps).

    Concentric radially symmetric states get a radial grid split at the sign
    changes of W; a lone spike state gets the clustered layout; everything
    else gets a Cartesian box covering all supports.
    """
    settings = get_settings()
    states = [W] if other is None else [W, other]
    if any(state.modes != 1 for state in states):
        raise PreconditionError("phase-space quadrature covers single-mode states only")

    if other is None and W.kind is StateKind.SPIKE:
        return QuadratureGrid(GridScheme.CLUSTERED, settings.cluster_x_nodes, R=W.support_radius)

    centers = {state.center for state in states}
    if len(centers) == 1 and None not in centers:
        R = max(state.support_radius for state in states)
        breakpoints = radial_sign_changes(W, R) if other is None else ()
        return QuadratureGrid(
            GridScheme.RADIAL,
            settings.quad_initial_nodes,
            R=R,
            center=tuple(W.center),
            breakpoints=breakpoints,
        )
    return _cartesian_cover(states)


def _check_covers(grid: QuadratureGrid, states: Sequence[WignerEvaluator]) -> None:
    if grid.scheme is GridScheme.CLUSTERED:
        needed = max(state.support_radius for state in states)
        if grid.R < needed:
            raise PreconditionError(
                f"clustered grid extent {grid.R:g} must reach the outermost spike plus margin ({needed:g})"
            )
        return
    if grid.scheme is GridScheme.RADIAL:
        offsets = [
            np.hypot(state.center[0] - grid.center[0], state.center[1] - grid.center[1]) / SQRT2
            if state.center is not None
            else np.inf
            for state in states
        ]
        needed = max(off + state.support_radius for off, state in zip(offsets, states))
        if any(off > 0 for off in offsets) and grid.n_angles == 1:
            raise PreconditionError("a single-angle radial grid must be centred on the states")
    else:
        half = SQRT2 * grid.R
        boxes = np.array([state.bounding_box() for state in states])
        inside = (
            boxes[:, 0].min() >= grid.center[0] - half - 1e-9
            and boxes[:, 1].max() <= grid.center[0] + half + 1e-9
            and boxes[:, 2].min() >= grid.center[1] - half - 1e-9
            and boxes[:, 3].max() <= grid.center[1] + half + 1e-9
        )
        needed = grid.R if inside else np.inf
    if grid.R < needed:
        raise PreconditionError(
            f"grid radius {grid.R:g} smaller than the support radius {needed:g}"
        )


def tail_mass(W: WignerEvaluator, grid: QuadratureGrid) -> float:
    """Squared mass of W under pi * d^2 alpha on the annulus R <= |alpha - centre| <= 2R."""
    edges = np.linspace(grid.R, 2.0 * grid.R, 9)
    s, ws = paneled_gauss_legendre(edges, 16)
    theta = 2.0 * np.pi * np.arange(64) / 64
    ss, tt = np.meshgrid(s, theta, indexing="ij")
    pts = np.stack(
        [grid.center[0] + SQRT2 * ss * np.cos(tt), grid.center[1] + SQRT2 * ss * np.sin(tt)],
        axis=-1,
    ).reshape(-1, 2)
    weights = np.repeat(ws * s * (2.0 * np.pi / 64), 64)
    return float(np.pi * np.sum(weights * _values(W, pts) ** 2))


def check_tail(W: WignerEvaluator, grid: QuadratureGrid) -> float:
    """Raise QuadratureError when more than the tolerated mass lies beyond the grid."""
    settings = get_settings()
    mass = tail_mass(W, grid)
    if mass > settings.tail_mass_tol:
        logger.warning(
            "Quadrature radius truncates mass",
            state=W.label,
            radius=grid.R,
            tail_mass=mass,
            tolerance=settings.tail_mass_tol,
        )
        raise QuadratureError(
            f"tail mass {mass:.3g} beyond radius {grid.R:g} exceeds {settings.tail_mass_tol:g}",
            {"state": W.label, "radius": grid.R, "tail_mass": mass},
        )
    return mass


def _converge(
    grid: QuadratureGrid,
    functional: Callable[[QuadratureGrid], float],
    label: str,
) -> Tuple[float, QuadratureGrid]:
    """Double the node count until the functional settles to the relative tolerance."""
    settings = get_settings()
    previous = functional(grid)
    for _ in range(settings.quad_max_doublings):
        candidate = grid.refined()
        if candidate.scheme is GridScheme.CARTESIAN and candidate.nodes_per_axis > CARTESIAN_MAX_NODES:
            break
        current = functional(candidate)
        grid = candidate
        if abs(current - previous) <= settings.quad_rel_tol * max(abs(current), 1.0):
            return current, grid
        previous = current

    logger.warning("Quadrature did not converge", target=label, nodes=grid.nodes_per_axis)
    raise QuadratureError(
        f"quadrature for {label} did not converge within {settings.quad_max_doublings} doublings",
        {"target": label, "nodes_per_axis": grid.nodes_per_axis},
    )


def _momentum_edges(delta: float) -> np.ndarray:
    P = SPIKE_MOMENTUM_EXTENT
    if delta == 0.0 or np.pi / delta > SPIKE_FLAT_PANEL:
        return np.linspace(-P, P, int(np.ceil(2 * P / SPIKE_FLAT_PANEL)) + 1)
    # zeros of cos(p * delta)
    j = np.arange(np.ceil(-P * delta / np.pi - 0.5), np.floor(P * delta / np.pi - 0.5) + 1)
    zeros = (j + 0.5) * np.pi / delta
    zeros = zeros[(zeros > -P) & (zeros < P)]
    return np.concatenate([[-P], zeros, [P]])


def _clustered_spike(W: WignerEvaluator, grid: QuadratureGrid) -> ClusteredFunction:
    settings = get_settings()
    n = W.n
    if n > SPIKE_MAX_N:
        raise CapacityError(f"spike numerics are capped at n <= {SPIKE_MAX_N}, got {n}")
    _check_covers(grid, [W])

    mu = W.spike_positions()
    c_n = spike_normalisation(n)
    k_idx, l_idx = np.triu_indices(n)
    offsets, offset_w = gauss_legendre(-SPIKE_X_HALFWIDTH, SPIKE_X_HALFWIDTH, grid.nodes_per_axis)

    clusters = []
    for k, l in zip(k_idx, l_idx):
        centre = 0.5 * (mu[k] + mu[l])
        delta = float(mu[l] - mu[k])
        coef = (1.0 if k == l else 2.0) * TWO_OVER_PI / c_n
        p, wp = paneled_gauss_legendre(_momentum_edges(delta), settings.cluster_panel_nodes)
        clusters.append(
            Cluster.build(
                x_center=float(centre),
                delta=delta,
                amplitude=coef * np.exp(-2.0 * offsets**2),
                x_weights=0.5 * offset_w,
                p_abs_profile=np.abs(np.cos(p * delta)) * np.exp(-0.5 * p**2),
                p_weights=wp,
            )
        )

    centres = np.array([[cl.x_center, 0.0] for cl in clusters])
    peak = float(np.max(np.abs(_values(W, centres))))
    logger.debug(
        "Clustered spike grid built",
        n=n,
        clusters=len(clusters),
        nodes=sum(cl.size for cl in clusters),
    )
    return ClusteredFunction(
        clusters=clusters,
        scale=np.pi,
        bound=W.sup_bound,
        source=W,
        evaluate=lambda points: wigner_eval(W, points),
        extra_linf=peak,
    )


def _nodal(W: WignerEvaluator, grid: QuadratureGrid) -> NodalFunction:
    points, weights = grid.nodes()
    values = _values(W, points)
    extra = 0.0
    if grid.scheme is GridScheme.RADIAL:
        # zero-weight centre node
        extra = abs(float(_values(W, np.asarray([grid.center]))[0]))
    return NodalFunction(
        values=values,
        weights=np.pi * weights,
        points=points,
        domain=Domain.CV,
        scale=np.pi,
        bound=W.sup_bound,
        source=W,
        evaluate=lambda pts: wigner_eval(W, pts),
        modes=1,
        center=grid.center,
        extra_linf=extra,
    )


@lru_cache(maxsize=64)
def discretize(
    W: WignerEvaluator,
    grid: Optional[QuadratureGrid] = None,
    adaptive: bool = True,
) -> MeasuredFunction:
    """Discretise W under mu_W = pi * d^2 alpha for smoothing and sampling.

    Args:
        W: Single-mode state
        grid: Starting grid; :func:`default_grid` when omitted
        adaptive: Refine until the L1 norm settles

    Returns:
        A nodal function (radial or Cartesian) or a clustered spike function
    """
    grid = grid or default_grid(W)
    if grid.scheme is GridScheme.CLUSTERED:
        return _clustered_spike(W, grid)

    _check_covers(grid, [W])
    check_tail(W, grid)
    if adaptive:
        _, grid = _converge(grid, lambda g: _nodal(W, g).l1(), f"L1 of {W.label}")
    return _nodal(W, grid)


def overlap_quadrature(
    W1: WignerEvaluator,
    W2: WignerEvaluator,
    grid: Optional[QuadratureGrid] = None,
    adaptive: bool = True,
) -> float:
    """F = pi^m * integral of W1 * W2; the fidelity when W1 is pure.

    Raises:
        PreconditionError: The grid does not cover both supports
        QuadratureError: Mass beyond the grid or no convergence
    """
    if W1.modes != W2.modes:
        raise ContractViolation("overlap needs states with the same mode count")
    for state in (W1, W2):
        if state.kind is StateKind.SPIKE and state.n > 2 or (
            state.kind is StateKind.MIXTURE
            and any(c.kind is StateKind.SPIKE and c.n > 2 for _, c in state.components)
        ):
            raise CapacityError("spike overlaps beyond n = 2 use spike_fidelity")

    grid = grid or default_grid(W1, W2)
    if grid.scheme is GridScheme.CLUSTERED:
        raise PreconditionError("overlaps are integrated on radial or Cartesian grids")
    _check_covers(grid, [W1, W2])
    check_tail(W1, grid)
    check_tail(W2, grid)

    def functional(g: QuadratureGrid) -> float:
        points, weights = g.nodes()
        return float(np.pi * np.sum(weights * _values(W1, points) * _values(W2, points)))

    if adaptive:
        value, grid = _converge(grid, functional, f"overlap {W1.label} x {W2.label}")
    else:
        value = functional(grid)
    logger.debug("Overlap integrated", first=W1.label, second=W2.label, value=value, nodes=grid.nodes_per_axis)
    return value


def norms_quadrature(W: WignerEvaluator, grid: Optional[QuadratureGrid] = None) -> NormTriple:
    """Plain Lebesgue norms (l1, l2, linf) of W."""
    mf = discretize(W, grid)
    norms = NormTriple(
        l1=mf.l1() / mf.scale,
        l2=float(np.sqrt(mf.l2_squared() / mf.scale)),
        linf=mf.linf(),
    )
    logger.info("Wigner norms computed", state=W.label, l1=norms.l1, l2=norms.l2, linf=norms.linf)
    return norms


def spike_norms(n: int, grid: Optional[QuadratureGrid] = None) -> SpikeNorms:
    """Numerical sup and L1 (Lebesgue) norms of the n-th spike state with the closed-form c_n."""
    if n < 1:
        raise PreconditionError("spike index must be positive")
    W = WignerEvaluator.spike(n)
    required = float(n * 3**n + SPIKE_MARGIN)
    if grid is not None and grid.R < required:
        raise PreconditionError(f"grid radius {grid.R:g} must reach n 3^n + 5 = {required:g}")

    mf = discretize(W, grid or default_grid(W))
    result = SpikeNorms(linf=mf.linf(), l1=mf.l1() / mf.scale, c_n=spike_normalisation(n))
    logger.info("Spike norms computed", n=n, linf=result.linf, l1=result.l1, c_n=result.c_n)
    return result


def spike_bound_violations(n: int, norms: SpikeNorms) -> List[str]:
    """Names of the asymptotic spike bounds (linf, l1, c_n) that ``norms`` break."""
    violated = []
    if norms.linf > 4.0 * TWO_OVER_PI / n + 1e-12:
        violated.append("linf")
    if norms.l1 > n + 1e-6:
        violated.append("l1")
    if norms.c_n < n - 1e-12:
        violated.append("c_n")
    return violated


def spike_norm_bounds(n: int, grid: Optional[QuadratureGrid] = None) -> SpikeNorms:
    """Spike norms checked against linf <= 4 (2/pi) / n, l1 <= n and c_n >= n.

    Raises:
        PreconditionError: the grid does not reach the outermost spike
        QuadratureError: a bound fails numerically
    """
    result = spike_norms(n, grid)
    violated = spike_bound_violations(n, result)
    if violated:
        raise QuadratureError(f"spike norm bounds violated for n={n}: {', '.join(violated)}", result._asdict())
    return result
