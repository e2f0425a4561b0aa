"""Pure-Python/numpy fallback for the polygon clipping kernels.

Mirrors the API of the compiled ``_clipcore`` extension; selected at import
time by :mod:`kcoverage.geometry` when the extension is unavailable or
``KCOVERAGE_PURE=1`` is set.
"""

from itertools import combinations

import numpy as np

__all__ = ["clip_halfplane", "clip_cell", "build_cells", "shoelace_area"]

IMPLEMENTATION = "python"


def shoelace_area(verts):
    """Signed shoelace area of a polygon given as an (m, 2) array."""
    if len(verts) < 3:
        return 0.0
    x = verts[:, 0]
    y = verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def clip_halfplane(verts, nx, ny, off, eps):
    """Clip a convex CCW polygon against {q : nx*qx + ny*qy <= off}.

    Sutherland-Hodgman against a single plane; vertices within eps of the
    boundary are kept. Returns an (m', 2) array, possibly empty.
    """
    m = len(verts)
    if m == 0:
        return verts
    side = verts[:, 0] * nx + verts[:, 1] * ny - off
    if np.all(side <= eps):
        return verts
    if np.all(side >= -eps):
        return np.empty((0, 2))

    out = []
    for i in range(m):
        j = (i + 1) % m
        si, sj = side[i], side[j]
        if si <= eps:
            out.append(verts[i])
            if sj > eps and si < -eps:
                t = si / (si - sj)
                out.append(verts[i] + t * (verts[j] - verts[i]))
        elif sj < -eps:
            t = si / (si - sj)
            out.append(verts[i] + t * (verts[j] - verts[i]))
    if not out:
        return np.empty((0, 2))
    return _dedup(np.asarray(out), eps)


def _dedup(verts, eps):
    """Drop consecutive duplicate vertices (closed polygon, tolerance eps)."""
    m = len(verts)
    if m < 2:
        return verts
    keep = []
    for i in range(m):
        j = (i + 1) % m
        if abs(verts[i, 0] - verts[j, 0]) > eps or abs(verts[i, 1] - verts[j, 1]) > eps:
            keep.append(i)
    if len(keep) < 3:
        return np.empty((0, 2))
    return verts[keep]


def clip_cell(points, members, domain, eps):
    """Intersect the domain with all bisector half-planes defining one
    order-k cell: for every v in members and w outside, keep the side
    nearer to v. Clips nearest outsiders first so empty cells exit early.
    """
    n = len(points)
    members = list(members)
    inside = np.zeros(n, dtype=bool)
    inside[members] = True
    outsiders = np.nonzero(~inside)[0]
    verts = domain
    if len(outsiders) == 0:
        return verts

    anchor = points[members].mean(axis=0)
    d2 = np.sum((points[outsiders] - anchor) ** 2, axis=1)
    for w in outsiders[np.argsort(d2, kind="stable")]:
        pw = points[w]
        for v in members:
            pv = points[v]
            nvec = pw - pv
            off = 0.5 * (pw @ pw - pv @ pv)
            verts = clip_halfplane(verts, nvec[0], nvec[1], off, eps)
            if len(verts) == 0:
                return verts
    return verts


def build_cells(points, k, domain, eps, eps_area):
    """Enumerate all C(n, k) subsets and return [(subset, vertices)] for the
    cells whose clipped polygon has area > eps_area, in subset-lex order.
    """
    n = len(points)
    cells = []
    for subset in combinations(range(n), k):
        verts = clip_cell(points, subset, domain, eps)
        if len(verts) >= 3 and shoelace_area(verts) > eps_area:
            cells.append((subset, np.ascontiguousarray(verts)))
    return cells
