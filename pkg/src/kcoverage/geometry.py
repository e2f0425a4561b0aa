"""Order-k Voronoi geometry over convex polygonal domains.

Cells are built by direct half-plane intersection: the domain is clipped by
the perpendicular bisector of (p_v, p_w) for every member v of the generating
subset and every outsider w. Hot loops live in the compiled ``_clipcore``
extension with a pure-Python fallback (set ``KCOVERAGE_PURE=1`` to force it).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

if os.environ.get("KCOVERAGE_PURE") == "1":
    from . import _clippure as _kernel
else:
    try:
        from . import _clipcore as _kernel
    except ImportError:
        from . import _clippure as _kernel

KERNEL_IMPLEMENTATION = _kernel.IMPLEMENTATION

# scale-relative tolerance factors (multiplied by diameter / area of Q)
EPS_GEOM_REL = 1e-9
EPS_AREA_REL = 1e-12
EPS_COINCIDE_REL = 1e-9


class DegenerateInputError(ValueError):
    """Raised for coincident sensors or other degenerate geometric input."""


class HalfPlane:
    """The closed half-plane {q : normal . q <= offset}."""

    __slots__ = ("normal", "offset")

    def __init__(self, normal, offset):
        normal = np.asarray(normal, dtype=float)
        if not np.all(np.isfinite(normal)) or np.hypot(*normal) == 0.0:
            raise ValueError("half-plane normal must be finite and nonzero")
        self.normal = normal
        self.offset = float(offset)

    def contains(self, q, eps=0.0):
        q = np.asarray(q, dtype=float)
        return float(self.normal @ q) <= self.offset + eps

    def __repr__(self):
        return f"HalfPlane(normal={self.normal!r}, offset={self.offset!r})"


class ConvexPolygon:
    """Convex polygon as a CCW vertex array; may be empty (0 vertices).

    Vertices are stored in a read-only (m, 2) float array. Construction
    normalizes orientation and drops consecutive duplicates.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        verts = np.asarray(vertices, dtype=float).reshape(-1, 2)
        if verts.size and not np.all(np.isfinite(verts)):
            raise ValueError("polygon vertices must be finite")
        if len(verts) >= 3:
            if _kernel.shoelace_area(verts) < 0:
                verts = verts[::-1]
            verts = _dedup_vertices(verts)
        elif len(verts) > 0:
            verts = np.empty((0, 2))
        verts = np.ascontiguousarray(verts)
        verts.flags.writeable = False
        self.vertices = verts

    @classmethod
    def _raw(cls, verts):
        """Wrap kernel output (already CCW and deduped) without rework."""
        poly = cls.__new__(cls)
        verts = np.ascontiguousarray(verts, dtype=float)
        verts.flags.writeable = False
        poly.vertices = verts
        return poly

    @classmethod
    def box(cls, x0, y0, x1, y1):
        return cls([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    @property
    def is_empty(self):
        return len(self.vertices) < 3

    def area(self):
        return abs(_kernel.shoelace_area(self.vertices))

    def diameter(self):
        if self.is_empty:
            return 0.0
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((d ** 2).sum(axis=2).max()))

    def centroid_of_vertices(self):
        if len(self.vertices) == 0:
            raise ValueError("empty polygon has no vertices")
        return self.vertices.mean(axis=0)

    def contains(self, q, eps=None):
        if self.is_empty:
            return False
        if eps is None:
            eps = EPS_GEOM_REL * self.diameter()
        q = np.asarray(q, dtype=float)
        v = self.vertices
        nxt = np.roll(v, -1, axis=0)
        cross = (nxt[:, 0] - v[:, 0]) * (q[1] - v[:, 1]) - (nxt[:, 1] - v[:, 1]) * (q[0] - v[:, 0])
        return bool(np.all(cross >= -eps * np.hypot(nxt[:, 0] - v[:, 0], nxt[:, 1] - v[:, 1])))

    def signed_depth(self, q):
        """Distance from q to the boundary, positive inside (min over edges)."""
        if self.is_empty:
            return -np.inf
        q = np.asarray(q, dtype=float)
        v = self.vertices
        nxt = np.roll(v, -1, axis=0)
        e = nxt - v
        ln = np.hypot(e[:, 0], e[:, 1])
        cross = e[:, 0] * (q[1] - v[:, 1]) - e[:, 1] * (q[0] - v[:, 0])
        return float(np.min(cross / ln))

    def bounding_box(self):
        v = self.vertices
        return v[:, 0].min(), v[:, 1].min(), v[:, 0].max(), v[:, 1].max()

    def is_convex_ccw(self, eps=None):
        if self.is_empty:
            return True
        if eps is None:
            eps = EPS_GEOM_REL * self.diameter() ** 2
        v = self.vertices
        a = np.roll(v, -1, axis=0) - v
        b = np.roll(a, -1, axis=0)
        cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        return bool(np.all(cross >= -eps))

    def project(self, q):
        """Euclidean projection of q onto the polygon (q itself if inside)."""
        q = np.asarray(q, dtype=float)
        if self.contains(q, eps=0.0):
            return q
        v = self.vertices
        nxt = np.roll(v, -1, axis=0)
        e = nxt - v
        t = np.clip(((q - v) * e).sum(axis=1) / (e ** 2).sum(axis=1), 0.0, 1.0)
        cand = v + t[:, None] * e
        return cand[np.argmin(((cand - q) ** 2).sum(axis=1))]

    def __repr__(self):
        return f"ConvexPolygon({len(self.vertices)} vertices)"


def _dedup_vertices(verts):
    scale = max(np.ptp(verts[:, 0]), np.ptp(verts[:, 1]), 1e-300)
    eps = EPS_GEOM_REL * scale
    keep = [
        i
        for i in range(len(verts))
        if np.max(np.abs(verts[i] - verts[(i + 1) % len(verts)])) > eps
    ]
    return verts[keep] if len(keep) >= 3 else np.empty((0, 2))


class SensorConfiguration:
    """Ordered sensor positions p_0..p_{n-1} as an (n, 2) array."""

    __slots__ = ("positions",)

    def __init__(self, positions):
        pos = np.ascontiguousarray(positions, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(pos)):
            raise ValueError("sensor positions must be finite")
        pos.flags.writeable = False
        self.positions = pos

    def __len__(self):
        return len(self.positions)

    def __getitem__(self, i):
        return self.positions[i]

    def min_pairwise_distance(self):
        p = self.positions
        if len(p) < 2:
            return np.inf
        d = np.sqrt(((p[:, None, :] - p[None, :, :]) ** 2).sum(axis=2))
        return float(d[np.triu_indices(len(p), k=1)].min())


@dataclass(frozen=True)
class OrderKCell:
    subset: tuple
    polygon: ConvexPolygon


@dataclass
class OrderKPartition:
    """Nonempty order-k cells tiling Q, with lazily-computed adjacency."""

    order: int
    domain: ConvexPolygon
    cells: list
    _adjacency: dict | None = field(default=None, repr=False)

    @property
    def adjacency(self):
        if self._adjacency is None:
            self._adjacency = _compute_adjacency(self.cells, self.domain)
        return self._adjacency

    def cell_index_of_subset(self, subset):
        subset = tuple(subset)
        for i, c in enumerate(self.cells):
            if c.subset == subset:
                return i
        return None

    def locate(self, q):
        """Index of the cell containing q (deepest cell wins near edges)."""
        best, best_depth = None, -np.inf
        for i, c in enumerate(self.cells):
            d = c.polygon.signed_depth(q)
            if d > best_depth:
                best, best_depth = i, d
        return best

    def to_json_dict(self):
        def fmt(x):
            return float(f"{x:.12g}")

        return {
            "order": self.order,
            "domain": [[fmt(x), fmt(y)] for x, y in self.domain.vertices],
            "cells": [
                {
                    "subset": list(map(int, c.subset)),
                    "vertices": [[fmt(x), fmt(y)] for x, y in c.polygon.vertices],
                }
                for c in self.cells
            ],
            "adjacency": sorted(
                [i, j] for i, js in self.adjacency.items() for j in js if i < j
            ),
        }

    def to_json(self, **kw):
        return json.dumps(self.to_json_dict(), **kw)

    @classmethod
    def from_json_dict(cls, doc):
        cells = [
            OrderKCell(tuple(c["subset"]), ConvexPolygon(c["vertices"]))
            for c in doc["cells"]
        ]
        adj = {i: set() for i in range(len(cells))}
        for i, j in doc["adjacency"]:
            adj[i].add(j)
            adj[j].add(i)
        return cls(doc["order"], ConvexPolygon(doc["domain"]), cells, adj)


def polygon_area(poly: ConvexPolygon) -> float:
    return poly.area()


def polygon_contains(poly: ConvexPolygon, q, eps=None) -> bool:
    return poly.contains(q, eps=eps)


def bisector_halfplane(a, b, eps_coincide=0.0) -> HalfPlane:
    """Half-plane of points at least as close to a as to b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.hypot(*(a - b)) <= eps_coincide or np.array_equal(a, b):
        raise DegenerateInputError(f"coincident points {a} and {b}")
    return HalfPlane(b - a, 0.5 * (b @ b - a @ a))


def clip(poly: ConvexPolygon, h: HalfPlane, eps=0.0) -> ConvexPolygon:
    verts = _kernel.clip_halfplane(poly.vertices, h.normal[0], h.normal[1], h.offset, eps)
    if len(verts) < 3:
        return ConvexPolygon([])
    return ConvexPolygon._raw(verts)


def _check_sensors(S: SensorConfiguration, Q: ConvexPolygon):
    eps = EPS_COINCIDE_REL * Q.diameter()
    if len(S) >= 2 and S.min_pairwise_distance() <= eps:
        raise DegenerateInputError("coincident sensors (pairwise distance below tolerance)")


def order_k_cell(S: SensorConfiguration, subset, Q: ConvexPolygon) -> ConvexPolygon:
    """Clip Q by every (member, outsider) bisector of the given k-subset."""
    _check_sensors(S, Q)
    eps = EPS_GEOM_REL * Q.diameter()
    verts = _kernel.clip_cell(S.positions, list(subset), Q.vertices, eps)
    if len(verts) < 3:
        return ConvexPolygon([])
    return ConvexPolygon._raw(verts)


def build_partition(S: SensorConfiguration, k: int, Q: ConvexPolygon) -> OrderKPartition:
    n = len(S)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if Q.is_empty:
        raise ValueError("domain polygon is empty")
    _check_sensors(S, Q)
    eps = EPS_GEOM_REL * Q.diameter()
    eps_area = EPS_AREA_REL * Q.area()
    raw = _kernel.build_cells(S.positions, k, Q.vertices, eps, eps_area)
    cells = [OrderKCell(tuple(int(i) for i in subset), ConvexPolygon._raw(v)) for subset, v in raw]
    return OrderKPartition(order=k, domain=Q, cells=cells)


def _segments(poly):
    v = poly.vertices
    return v, np.roll(v, -1, axis=0)


def _segment_distance(a0, a1, b0, b1):
    """Minimum distance between two segments."""

    def pt_seg(p, s0, s1):
        e = s1 - s0
        L2 = float(e @ e)
        if L2 == 0.0:
            return float(np.hypot(*(p - s0)))
        t = np.clip(float((p - s0) @ e) / L2, 0.0, 1.0)
        return float(np.hypot(*(p - s0 - t * e)))

    def cross2(u, v):
        return u[0] * v[1] - u[1] * v[0]

    # proper crossing test
    d1 = cross2(a1 - a0, b0 - a0)
    d2 = cross2(a1 - a0, b1 - a0)
    d3 = cross2(b1 - b0, a0 - b0)
    d4 = cross2(b1 - b0, a1 - b0)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return 0.0
    return min(
        pt_seg(a0, b0, b1), pt_seg(a1, b0, b1), pt_seg(b0, a0, a1), pt_seg(b1, a0, a1)
    )


def _polygons_touch(pa, pb, eps):
    ax0, ay0, ax1, ay1 = pa.bounding_box()
    bx0, by0, bx1, by1 = pb.bounding_box()
    if ax0 > bx1 + eps or bx0 > ax1 + eps or ay0 > by1 + eps or by0 > ay1 + eps:
        return False
    a0s, a1s = _segments(pa)
    b0s, b1s = _segments(pb)
    for a0, a1 in zip(a0s, a1s):
        for b0, b1 in zip(b0s, b1s):
            if _segment_distance(a0, a1, b0, b1) <= eps:
                return True
    return False


def _compute_adjacency(cells, domain):
    """Cells touching along an edge or at a single point are adjacent."""
    eps = EPS_GEOM_REL * max(domain.diameter(), 1e-300) * 10
    adj = {i: set() for i in range(len(cells))}
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            if _polygons_touch(cells[i].polygon, cells[j].polygon, eps):
                adj[i].add(j)
                adj[j].add(i)
    return adj


def union_cells_of(partition: OrderKPartition, i: int) -> list:
    """Cells whose generating subset contains sensor i (the list form of W_i)."""
    return [c for c in partition.cells if i in c.subset]


def neighbors(partition: OrderKPartition, i: int) -> set:
    """Sensors sharing a cell with i, plus generators of cells adjacent to them."""
    own = {idx for idx, c in enumerate(partition.cells) if i in c.subset}
    out = set()
    for idx in own:
        out.update(partition.cells[idx].subset)
        for j in partition.adjacency[idx]:
            out.update(partition.cells[j].subset)
    out.discard(i)
    return out


def intersection_area(pa: ConvexPolygon, pb: ConvexPolygon) -> float:
    """Area of the intersection of two convex polygons (clip a by b's edges)."""
    if pa.is_empty or pb.is_empty:
        return 0.0
    verts = pa.vertices
    b = pb.vertices
    nxt = np.roll(b, -1, axis=0)
    for v0, v1 in zip(b, nxt):
        e = v1 - v0
        normal = np.array([e[1], -e[0]])  # inward for CCW is left of edge; keep right side out
        # CCW polygon: interior is to the left of each edge, i.e. cross(e, q-v0) >= 0
        # as a half-plane: (-e_y, e_x) . q >= (-e_y, e_x) . v0  ->  (e_y, -e_x) . q <= ...
        off = float(normal @ v0)
        verts = _kernel.clip_halfplane(verts, normal[0], normal[1], off, 0.0)
        if len(verts) < 3:
            return 0.0
    return abs(_kernel.shoelace_area(np.asarray(verts)))
