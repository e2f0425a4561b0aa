"""Coverage performance functional H and its analytic per-sensor gradient.

H integrates, over each order-k cell, the cost f of the distances to the
cell's k generators, weighted by the density. The gradient keeps only the
interior term per cell (the moving-boundary contributions cancel across
shared cell boundaries); that cancellation is validated against finite
differences in the test suite rather than assembled term by term.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .geometry import ConvexPolygon, OrderKPartition, SensorConfiguration
from .quadrature import (
    CellMoments,
    DensityField,
    QuadratureSpec,
    cell_moments,
    cell_nodes,
    polygon_nodes,
    union_moments,
)

log = logging.getLogger(__name__)

_DIST_FLOOR = 1e-300


class ConfigurationError(ValueError):
    """Cost arity, partition order, and sensor count do not line up."""


class CostRejectedError(ValueError):
    """A cost function violated the admissibility checks."""


class CostFunction:
    """Symmetric, monotone cost of k nonnegative distances.

    ``value`` maps an (N, k) distance array to (N,); ``partial(m, D)`` is the
    derivative with respect to the m-th distance, also (N,). ``smooth``
    marks costs whose integrands are smooth across whole cells (polynomial
    in the coordinates), letting the quadrature skip its kink handling.
    """

    def __init__(self, name, arity, value, partial, smooth=False):
        self.name = name
        self.arity = arity
        self.value = value
        self.partial = partial
        self.smooth = smooth

    def __repr__(self):
        return f"CostFunction({self.name}, arity={self.arity})"


def sum_distance(arity=2):
    return CostFunction(
        "sum_distance",
        arity,
        lambda D: D.sum(axis=1),
        lambda m, D: np.ones(len(D)),
    )


def sum_squared_half(arity=2):
    return CostFunction(
        "sum_squared_half",
        arity,
        lambda D: 0.5 * (D * D).sum(axis=1),
        lambda m, D: D[:, m].copy(),
        smooth=True,
    )


def p_norm(n, arity=2):
    if n < 1:
        raise ValueError("p_norm exponent must be >= 1")

    def value(D):
        return ((D ** n).sum(axis=1)) ** (1.0 / n)

    def partial(m, D):
        s = (D ** n).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = D[:, m] ** (n - 1) * s ** (1.0 / n - 1.0)
        return np.where(s > 0, out, 0.0)

    return CostFunction(f"p_norm({n})", arity, value, partial)


def max_distance(arity=2):
    def value(D):
        return D.max(axis=1)

    def partial(m, D):
        # subgradient: indicator of the maximal distance, ties split equally
        mx = D.max(axis=1)
        at_max = D == mx[:, None]
        return at_max[:, m] / at_max.sum(axis=1)

    return CostFunction("max_distance", arity, value, partial)


BUILTIN_COSTS = {
    "sum_distance": sum_distance,
    "sum_squared_half": sum_squared_half,
    "p_norm": p_norm,
    "max_distance": max_distance,
}


@dataclass(frozen=True)
class CostValidationReport:
    samples: int
    worst_symmetry: float
    worst_monotonicity: float  # most negative finite-difference slope seen

    @property
    def passed(self):
        return self.worst_symmetry <= 1e-7 and self.worst_monotonicity >= -1e-7


def validate_cost(f: CostFunction, samples=200, seed=0) -> CostValidationReport:
    """Check permutation symmetry and monotonicity at random distance tuples.

    Raises CostRejectedError when a violation exceeds 1e-7.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    D = rng.uniform(0.05, 3.0, size=(samples, f.arity))
    base = f.value(D)

    worst_sym = 0.0
    for _ in range(min(8, max(2, f.arity * 2))):
        perm = rng.permutation(f.arity)
        diff = np.abs(f.value(D[:, perm]) - base)
        denom = np.maximum(np.abs(base), 1.0)
        worst_sym = max(worst_sym, float((diff / denom).max()))

    h = 1e-6
    worst_mono = np.inf
    for m in range(f.arity):
        Dp = D.copy()
        Dm = D.copy()
        Dp[:, m] += h
        Dm[:, m] = np.maximum(Dm[:, m] - h, 1e-12)
        slope = (f.value(Dp) - f.value(Dm)) / (Dp[:, m] - Dm[:, m])
        worst_mono = min(worst_mono, float(slope.min()))

    report = CostValidationReport(samples, worst_sym, float(worst_mono))
    if not report.passed:
        raise CostRejectedError(
            f"cost {f.name!r} rejected: symmetry violation {report.worst_symmetry:.3g}, "
            f"worst monotonicity slope {report.worst_monotonicity:.3g}"
        )
    return report


def _check_compatible(partition: OrderKPartition, S: SensorConfiguration, f: CostFunction):
    if f.arity != partition.order:
        raise ConfigurationError(
            f"cost arity {f.arity} does not match partition order {partition.order}"
        )
    if partition.cells and max(max(c.subset) for c in partition.cells) >= len(S):
        raise ConfigurationError("partition references sensors beyond the configuration")


def _nodes(cell, S, f, spec):
    if f.smooth:
        return polygon_nodes(cell.polygon, spec)
    return cell_nodes(cell.polygon, S.positions[list(cell.subset)], spec)


def _cell_distances(pts, S, subset):
    diff = pts[:, None, :] - S.positions[list(subset)][None, :, :]
    return np.sqrt((diff ** 2).sum(axis=2))


def evaluate_H(partition, S, f, phi: DensityField, spec: QuadratureSpec) -> float:
    """Sum over cells of the integral of f(distances to generators) * phi."""
    _check_compatible(partition, S, f)
    total = 0.0
    for cell in partition.cells:
        pts, wts = _nodes(cell, S, f, spec)
        if len(pts) == 0:
            continue
        D = _cell_distances(pts, S, cell.subset)
        total += float((wts * phi(pts)) @ f.value(D))
    return total


def gradient(partition, S, f, phi: DensityField, spec: QuadratureSpec) -> np.ndarray:
    """Analytic dH/dp_i: per cell containing i, the integral of
    (df/dd_i)(q) * (p_i - q)/|p_i - q| * phi(q); boundary terms cancel.
    """
    _check_compatible(partition, S, f)
    grad = np.zeros((len(S), 2))
    for cell in partition.cells:
        pts, wts = _nodes(cell, S, f, spec)
        if len(pts) == 0:
            continue
        D = _cell_distances(pts, S, cell.subset)
        dens = wts * phi(pts)
        for m, i in enumerate(cell.subset):
            pf = f.partial(m, D) * dens
            delta = S.positions[i][None, :] - pts
            dist = D[:, m]
            safe = np.maximum(dist, _DIST_FLOOR)
            unit = np.where(dist[:, None] > 0, delta / safe[:, None], 0.0)
            grad[i] += pf @ unit
    return grad


def evaluate_H_and_gradient(partition, S, f, phi, spec):
    """Single pass sharing quadrature nodes between H and its gradient."""
    _check_compatible(partition, S, f)
    total = 0.0
    grad = np.zeros((len(S), 2))
    for cell in partition.cells:
        pts, wts = _nodes(cell, S, f, spec)
        if len(pts) == 0:
            continue
        D = _cell_distances(pts, S, cell.subset)
        dens = wts * phi(pts)
        total += float(dens @ f.value(D))
        for m, i in enumerate(cell.subset):
            pf = f.partial(m, D) * dens
            delta = S.positions[i][None, :] - pts
            safe = np.maximum(D[:, m], _DIST_FLOOR)
            unit = np.where(D[:, m][:, None] > 0, delta / safe[:, None], 0.0)
            grad[i] += pf @ unit
    return total, grad


def centroid_gradient(partition, S, phi: DensityField, spec: QuadratureSpec) -> np.ndarray:
    """dH/dp_i = -M_{W_i} (C_{W_i} - p_i) for the half-sum-of-squares cost."""
    moments = [cell_moments(c.polygon, phi, spec) for c in partition.cells]
    grad = np.zeros((len(S), 2))
    for i in range(len(S)):
        own = [m for c, m in zip(partition.cells, moments) if i in c.subset]
        if not own:
            continue
        wi = union_moments(own)
        if wi.zero_mass:
            log.warning("sensor %d has a zero-mass region; centroid gradient set to 0", i)
            continue
        grad[i] = -wi.mass * (wi.centroid - S.positions[i])
    return grad


def union_region_moments(partition, S, phi, spec):
    """Per-sensor moments of W_i (mass and centroid), for the centroid law."""
    moments = [cell_moments(c.polygon, phi, spec) for c in partition.cells]
    out = []
    for i in range(len(S)):
        own = [m for c, m in zip(partition.cells, moments) if i in c.subset]
        if own:
            out.append(union_moments(own))
        else:
            out.append(CellMoments(0.0, np.asarray(S.positions[i]), zero_mass=True))
    return out


def evaluate_H_bruteforce(S, f, phi, Q: ConvexPolygon, k, grid_resolution=1024) -> float:
    """Midpoint-rule grid evaluation of the raw min-over-subsets functional.

    Independent of the partition machinery; the Lemma-2 oracle.
    """
    from itertools import combinations

    if grid_resolution < 64:
        raise ValueError("grid_resolution must be >= 64")
    x0, y0, x1, y1 = Q.bounding_box()
    xs = x0 + (np.arange(grid_resolution) + 0.5) * (x1 - x0) / grid_resolution
    ys = y0 + (np.arange(grid_resolution) + 0.5) * (y1 - y0) / grid_resolution
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    mask = _contains_many(Q, pts)
    pts = pts[mask]
    if len(pts) == 0:
        return 0.0
    diff = pts[:, None, :] - S.positions[None, :, :]
    D = np.sqrt((diff ** 2).sum(axis=2))
    best = None
    for subset in combinations(range(len(S)), k):
        vals = f.value(D[:, list(subset)])
        best = vals if best is None else np.minimum(best, vals)
    cell_area = (x1 - x0) * (y1 - y0) / grid_resolution ** 2
    return float((best * phi(pts)).sum() * cell_area)


def _contains_many(poly: ConvexPolygon, pts):
    v = poly.vertices
    nxt = np.roll(v, -1, axis=0)
    inside = np.ones(len(pts), dtype=bool)
    for (vx, vy), (wx, wy) in zip(v, nxt):
        cross = (wx - vx) * (pts[:, 1] - vy) - (wy - vy) * (pts[:, 0] - vx)
        inside &= cross >= 0
    return inside
