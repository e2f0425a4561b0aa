"""Gauss quadrature of density-weighted fields over convex polygonal cells.

Polygons are fan-triangulated and each triangle carries a conical-product
Gauss rule (Jacobi x Legendre) exact to the requested polynomial degree,
optionally after uniform midpoint subdivision. All integrand callables take
an (N, 2) point array and return an (N,) array.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .geometry import ConvexPolygon


class DensityField:
    """Nonnegative weighting density phi over the domain."""

    def __init__(self, evaluator, name="density"):
        self.evaluator = evaluator
        self.name = name

    def __call__(self, points):
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        out = np.asarray(self.evaluator(points), dtype=float)
        return np.broadcast_to(out, (len(points),)).astype(float, copy=False)

    @classmethod
    def uniform(cls, value=1.0):
        value = float(value)
        return cls(lambda pts: np.full(len(pts), value), name=f"uniform({value})")


@dataclass(frozen=True)
class QuadratureSpec:
    rule_degree: int = 8
    subdivision: int = 1

    def __post_init__(self):
        if self.rule_degree < 2:
            raise ValueError("rule_degree must be >= 2")
        if self.subdivision < 0:
            raise ValueError("subdivision must be >= 0")


@dataclass(frozen=True)
class CellMoments:
    mass: float
    centroid: np.ndarray
    zero_mass: bool = False


@lru_cache(maxsize=32)
def _reference_rule(degree):
    """Nodes (u, v) and weights on the unit reference triangle, exact for
    total degree <= degree. Conical product: Gauss-Jacobi (weight 1-x) in u,
    Gauss-Legendre in the collapsed coordinate.
    """
    m = (degree + 2) // 2  # 2m-1 >= degree
    xj, wj = roots_jacobi(m, 1.0, 0.0)
    u = 0.5 * (xj + 1.0)
    wu = 0.25 * wj
    xl, wl = roots_legendre(m)
    t = 0.5 * (xl + 1.0)
    wt = 0.5 * wl

    U, T = np.meshgrid(u, t, indexing="ij")
    V = (1.0 - U) * T
    W = np.outer(wu, wt)
    return (
        np.column_stack([U.ravel(), V.ravel()]),
        W.ravel(),
    )


def triangulate(poly: ConvexPolygon) -> np.ndarray:
    """Fan triangulation from vertex 0; (ntri, 3, 2) array, empty if < 3 verts."""
    v = poly.vertices
    if len(v) < 3:
        return np.empty((0, 3, 2))
    ntri = len(v) - 2
    tris = np.empty((ntri, 3, 2))
    tris[:, 0] = v[0]
    tris[:, 1] = v[1:-1]
    tris[:, 2] = v[2:]
    return tris


def _subdivide(tris, levels):
    for _ in range(levels):
        a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
        ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
        tris = np.concatenate(
            [
                np.stack([a, ab, ca], axis=1),
                np.stack([ab, b, bc], axis=1),
                np.stack([ca, bc, c], axis=1),
                np.stack([ab, bc, ca], axis=1),
            ]
        )
    return tris


def _graded(tris, near_points, max_levels=10):
    """Refine triangles toward the given points until each triangle is at
    least its own diameter away from all of them (or max_levels reached).
    Resolves nearly singular integrands at a cost that grows only linearly
    with the refinement depth.
    """
    if len(tris) == 0 or len(near_points) == 0:
        return tris
    near_points = np.asarray(near_points, dtype=float).reshape(-1, 2)
    done = []
    cur = tris
    for _ in range(max_levels):
        if len(cur) == 0:
            break
        edges = cur - np.roll(cur, 1, axis=1)
        diam2 = (edges ** 2).sum(axis=2).max(axis=1)
        cent = cur.mean(axis=1)
        d2 = ((cent[:, None, :] - near_points[None, :, :]) ** 2).sum(axis=2).min(axis=1)
        mask = d2 < 4.0 * diam2
        done.append(cur[~mask])
        cur = _subdivide(cur[mask], 1)
    done.append(cur)
    return np.concatenate(done)


def polygon_nodes(poly: ConvexPolygon, spec: QuadratureSpec, near_points=()):
    """All quadrature points and weights for the polygon, concatenated.
    Triangles are grade-refined toward any ``near_points``."""
    tris = _subdivide(triangulate(poly), spec.subdivision)
    tris = _graded(tris, near_points)
    return _triangle_nodes(tris, spec)


def singular_polygon_nodes(poly: ConvexPolygon, point, spec: QuadratureSpec, near_points=()):
    """Quadrature nodes for integrands with a radial kink at ``point``.

    The polygon is fan-triangulated around the point, which is placed at the
    collapsed vertex of the conical rule; the (1-u) Jacobian then absorbs the
    kink (Duffy transform). Midpoint subdivision keeps the apex child
    collapsed at the singular point. Weights are signed, so the rule remains
    valid when the point lies outside the polygon (overlapping fan triangles
    cancel), which handles nearly singular integrands as well.
    """
    point = np.asarray(point, dtype=float)
    v = poly.vertices
    if len(v) < 3:
        return np.empty((0, 2)), np.empty(0)
    nxt = np.roll(v, -1, axis=0)
    sing = np.stack([v, np.broadcast_to(point, v.shape), nxt], axis=1)
    regular = np.empty((0, 3, 2))
    for _ in range(spec.subdivision):
        regular = _subdivide(regular, 1)
        a, g, c = sing[:, 0], sing[:, 1], sing[:, 2]
        m_ag, m_gc, m_ca = 0.5 * (a + g), 0.5 * (g + c), 0.5 * (c + a)
        regular = np.concatenate(
            [
                regular,
                np.stack([a, m_ag, m_ca], axis=1),
                np.stack([m_ca, m_gc, c], axis=1),
                np.stack([m_ag, m_gc, m_ca], axis=1),
            ]
        )
        # apex child, split angularly so the subtended angle at the
        # singular point also shrinks each level
        m_out = 0.5 * (m_ag + m_gc)
        sing = np.concatenate(
            [
                np.stack([m_ag, g, m_out], axis=1),
                np.stack([m_out, g, m_gc], axis=1),
            ]
        )
    # drop degenerate fans (point on an edge or at a vertex)
    def _nonzero(tris):
        if len(tris) == 0:
            return tris
        eb = tris[:, 1] - tris[:, 0]
        ec = tris[:, 2] - tris[:, 0]
        area2 = np.abs(eb[:, 0] * ec[:, 1] - eb[:, 1] * ec[:, 0])
        return tris[area2 > 1e-300]

    pts_s, wts_s = _triangle_nodes(_nonzero(sing), spec, signed=True)
    pts_r, wts_r = _triangle_nodes(_graded(_nonzero(regular), near_points), spec, signed=True)
    return np.concatenate([pts_s, pts_r]), np.concatenate([wts_s, wts_r])


def _triangle_nodes(tris, spec: QuadratureSpec, signed=False):
    if len(tris) == 0:
        return np.empty((0, 2)), np.empty(0)
    uv, w = _reference_rule(spec.rule_degree)
    a = tris[:, 0]
    eb = tris[:, 1] - a
    ec = tris[:, 2] - a
    pts = a[:, None, :] + uv[None, :, 0, None] * eb[:, None, :] + uv[None, :, 1, None] * ec[:, None, :]
    jac = eb[:, 0] * ec[:, 1] - eb[:, 1] * ec[:, 0]
    if signed:
        # fan triangles are (v_j, apex, v_{j+1}): negate so a CCW polygon
        # yields positive total weight, with overlap cancelling when the
        # apex is exterior
        jac = -jac
    else:
        jac = np.abs(jac)
    wts = jac[:, None] * w[None, :]
    return pts.reshape(-1, 2), wts.ravel()


def cell_nodes(poly: ConvexPolygon, generators, spec: QuadratureSpec):
    """Nodes for integrating cost-of-distance fields over one cell.

    The cell is split into the nearest-generator pieces by bisector clips:
    near-max ridges of pairwise costs then lie along piece boundaries, and a
    generator inside its own piece (a radial kink of the integrand) gets the
    singularity-aware fan rule.
    """
    from . import geometry  # noqa: PLC0415 -- break import cycle at load time

    generators = np.asarray(generators, dtype=float).reshape(-1, 2)
    if poly.is_empty:
        return np.empty((0, 2)), np.empty(0)
    # the signed fan rule stays accurate for generators a little outside the
    # piece (nearly singular integrands), so trigger it within this margin
    near = -0.35 * poly.diameter()
    if len(generators) <= 1:
        if len(generators) == 1 and poly.signed_depth(generators[0]) > near:
            return singular_polygon_nodes(poly, generators[0], spec)
        return polygon_nodes(poly, spec)

    pts_all, wts_all = [], []
    for i, g in enumerate(generators):
        piece = poly
        for j, other in enumerate(generators):
            if j == i:
                continue
            piece = geometry.clip(piece, geometry.bisector_halfplane(g, other))
            if piece.is_empty:
                break
        if piece.is_empty:
            continue
        # a foreign generator just outside the piece still leaves a kink near
        # its boundary that the owner's fan cannot absorb; grade-refine
        # triangles toward such points
        margin = -0.35 * piece.diameter()
        near = [
            other
            for j, other in enumerate(generators)
            if j != i and piece.signed_depth(other) > margin
        ]
        if piece.signed_depth(g) > margin:
            pts, wts = singular_polygon_nodes(piece, g, spec, near_points=near)
        else:
            pts, wts = polygon_nodes(piece, spec, near_points=near + [g])
        pts_all.append(pts)
        wts_all.append(wts)
    if not pts_all:
        return polygon_nodes(poly, spec)
    return np.concatenate(pts_all), np.concatenate(wts_all)


def integrate(poly: ConvexPolygon, g, phi: DensityField | None, spec: QuadratureSpec) -> float:
    """Integral of g(q) * phi(q) over the polygon (0 for empty polygons)."""
    pts, wts = polygon_nodes(poly, spec)
    if len(pts) == 0:
        return 0.0
    vals = np.asarray(g(pts), dtype=float)
    if phi is not None:
        vals = vals * phi(pts)
    return float(wts @ vals)


def cell_moments(poly: ConvexPolygon, phi: DensityField, spec: QuadratureSpec) -> CellMoments:
    pts, wts = polygon_nodes(poly, spec)
    if len(pts) == 0:
        return CellMoments(0.0, np.zeros(2), zero_mass=True)
    dens = wts * phi(pts)
    mass = float(dens.sum())
    if mass <= 0.0:
        return CellMoments(0.0, poly.centroid_of_vertices(), zero_mass=True)
    centroid = (dens[:, None] * pts).sum(axis=0) / mass
    return CellMoments(mass, centroid)


def union_moments(moments) -> CellMoments:
    """Mass-weighted combination: the moments of a union of disjoint cells."""
    moments = list(moments)
    if not moments:
        raise ValueError("union_moments needs at least one cell")
    mass = sum(m.mass for m in moments)
    if mass <= 0.0:
        avg = np.mean([m.centroid for m in moments], axis=0)
        return CellMoments(0.0, avg, zero_mass=True)
    centroid = sum(m.mass * m.centroid for m in moments) / mass
    return CellMoments(float(mass), centroid)
