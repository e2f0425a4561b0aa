"""Brute-force reference implementations used for cross-checking.

Deliberately independent of the geometry and quadrature modules: point
classification minimizes the cost over subsets directly, moments come from
Monte Carlo rejection sampling, and gradients from central differences.
These are slow by design.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np


def classify_point(q, S, k, f):
    """Generating subset of the cell containing q: argmin over k-subsets of
    the cost of subset distances, lexicographic first on ties.
    """
    q = np.asarray(q, dtype=float)
    d = np.sqrt(((S.positions - q[None, :]) ** 2).sum(axis=1))
    best_subset, best_val = None, np.inf
    for subset in combinations(range(len(S)), k):
        val = float(f.value(d[list(subset)][None, :])[0])
        if val < best_val:
            best_subset, best_val = subset, val
    return best_subset


def classify_points(pts, S, k, f):
    """Vectorized classify_point: returns an (N,) index into the lex-ordered
    subset list, plus that list.
    """
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    diff = pts[:, None, :] - S.positions[None, :, :]
    D = np.sqrt((diff ** 2).sum(axis=2))
    subsets = list(combinations(range(len(S)), k))
    vals = np.column_stack([f.value(D[:, list(s)]) for s in subsets])
    return vals.argmin(axis=1), subsets


def nearest_k_gap(q, S, k):
    """Distance gap between the k-th and (k+1)-th nearest sensors at q
    (infinite when k = n); small gaps flag boundary-ambiguous points.
    """
    q = np.asarray(q, dtype=float)
    d = np.sort(np.sqrt(((S.positions - q[None, :]) ** 2).sum(axis=1)))
    if k >= len(d):
        return np.inf
    return float(d[k] - d[k - 1])


def fd_gradient(S, f, phi, Q, k, h, evaluator=None, grid_resolution=1024):
    """Central finite differences of H per sensor coordinate.

    ``evaluator(positions_array) -> H`` defaults to the brute-force grid
    functional; tighter checks pass the partition-based evaluate_H instead.
    """
    from .coverage import evaluate_H_bruteforce
    from .geometry import SensorConfiguration

    if evaluator is None:
        def evaluator(pos):
            return evaluate_H_bruteforce(
                SensorConfiguration(pos), f, phi, Q, k, grid_resolution
            )

    base = np.array(S.positions, dtype=float)
    grad = np.zeros_like(base)
    for i in range(len(base)):
        for c in range(2):
            plus = base.copy()
            minus = base.copy()
            plus[i, c] += h
            minus[i, c] -= h
            grad[i, c] = (evaluator(plus) - evaluator(minus)) / (2.0 * h)
    return grad


@dataclass(frozen=True)
class MonteCarloMoments:
    mass: float
    centroid: np.ndarray
    mass_stderr: float
    samples: int


def mc_moments(poly, phi, samples, seed):
    """Rejection-sampled mass and centroid with a standard error estimate.

    Containment is re-derived here from the raw vertex list (no geometry
    module routines).
    """
    if samples < 10_000:
        raise ValueError("use at least 1e4 samples")
    verts = np.asarray(poly.vertices, dtype=float)
    if len(verts) < 3:
        return MonteCarloMoments(0.0, np.zeros(2), 0.0, samples)
    x0, y0 = verts.min(axis=0)
    x1, y1 = verts.max(axis=0)
    rng = np.random.default_rng(seed)
    pts = rng.uniform([x0, y0], [x1, y1], size=(samples, 2))

    nxt = np.roll(verts, -1, axis=0)
    inside = np.ones(samples, dtype=bool)
    for (vx, vy), (wx, wy) in zip(verts, nxt):
        inside &= (wx - vx) * (pts[:, 1] - vy) - (wy - vy) * (pts[:, 0] - vx) >= 0

    box_area = (x1 - x0) * (y1 - y0)
    w = np.where(inside, phi(pts), 0.0)
    mass = box_area * float(w.mean())
    stderr = box_area * float(w.std(ddof=1)) / np.sqrt(samples)
    if mass <= 0.0:
        return MonteCarloMoments(0.0, verts.mean(axis=0), stderr, samples)
    centroid = (w[:, None] * pts).sum(axis=0) / w.sum()
    return MonteCarloMoments(mass, centroid, stderr, samples)
