# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled polygon clipping kernels (hot path of partition construction).

Same API as the pure-Python fallback ``_clippure``.
"""

from libc.math cimport fabs
from libc.stdlib cimport free, malloc

import numpy as np

cimport numpy as cnp

cnp.import_array()

IMPLEMENTATION = "cython"


cdef double _shoelace(double* vx, double* vy, int m) nogil:
    cdef double a = 0.0
    cdef int i, j
    for i in range(m):
        j = i + 1
        if j == m:
            j = 0
        a += vx[i] * vy[j] - vx[j] * vy[i]
    return 0.5 * a


cdef int _clip_one(double* vx, double* vy, int m,
                   double nx, double ny, double off, double eps,
                   double* ox, double* oy) nogil:
    """Clip CCW polygon (vx, vy, m) against nx*x+ny*y <= off into (ox, oy).

    Returns the new vertex count (0 when the intersection is empty).
    """
    cdef int i, j, cnt = 0, nin = 0
    cdef double si, sj, t
    for i in range(m):
        si = vx[i] * nx + vy[i] * ny - off
        if si <= eps:
            nin += 1
    if nin == m:
        for i in range(m):
            ox[i] = vx[i]
            oy[i] = vy[i]
        return m
    if nin == 0:
        return 0

    for i in range(m):
        j = i + 1
        if j == m:
            j = 0
        si = vx[i] * nx + vy[i] * ny - off
        sj = vx[j] * nx + vy[j] * ny - off
        if si <= eps:
            ox[cnt] = vx[i]
            oy[cnt] = vy[i]
            cnt += 1
            if sj > eps and si < -eps:
                t = si / (si - sj)
                ox[cnt] = vx[i] + t * (vx[j] - vx[i])
                oy[cnt] = vy[i] + t * (vy[j] - vy[i])
                cnt += 1
        elif sj < -eps:
            t = si / (si - sj)
            ox[cnt] = vx[i] + t * (vx[j] - vx[i])
            oy[cnt] = vy[i] + t * (vy[j] - vy[i])
            cnt += 1
    return _dedup(ox, oy, cnt, eps)


cdef int _dedup(double* vx, double* vy, int m, double eps) nogil:
    cdef int i, j, cnt = 0
    if m < 2:
        return m
    for i in range(m):
        j = i + 1
        if j == m:
            j = 0
        if fabs(vx[i] - vx[j]) > eps or fabs(vy[i] - vy[j]) > eps:
            vx[cnt] = vx[i]
            vy[cnt] = vy[i]
            cnt += 1
    if cnt < 3:
        return 0
    return cnt


cdef int _clip_cell_raw(const double[:, ::1] points, long* members, int k,
                        long* order, int nout,
                        double* ax, double* ay, double* bx, double* by,
                        int m, double eps) nogil:
    """Clip the working polygon (ax, ay, m) by every (member, outsider)
    bisector, ping-ponging between the two buffers. Returns final count and
    leaves the result in (ax, ay).
    """
    cdef int oi, vi, i
    cdef double px, py, wx, wy, nx, ny, off
    cdef double* tx
    for oi in range(nout):
        wx = points[order[oi], 0]
        wy = points[order[oi], 1]
        for vi in range(k):
            px = points[members[vi], 0]
            py = points[members[vi], 1]
            nx = wx - px
            ny = wy - py
            off = 0.5 * (wx * wx + wy * wy - px * px - py * py)
            m = _clip_one(ax, ay, m, nx, ny, off, eps, bx, by)
            if m == 0:
                return 0
            tx = ax; ax = bx; bx = tx
            tx = ay; ay = by; by = tx
    # result parity: copy back into the caller's a-buffers if it ended in b
    return m


def shoelace_area(verts):
    cdef const double[:, ::1] v = np.ascontiguousarray(verts, dtype=np.float64)
    cdef int m = v.shape[0]
    if m < 3:
        return 0.0
    cdef double a = 0.0
    cdef int i, j
    for i in range(m):
        j = i + 1
        if j == m:
            j = 0
        a += v[i, 0] * v[j, 1] - v[j, 0] * v[i, 1]
    return 0.5 * a


def clip_halfplane(verts, double nx, double ny, double off, double eps):
    verts = np.ascontiguousarray(verts, dtype=np.float64)
    cdef const double[:, ::1] v = verts
    cdef int m = v.shape[0]
    if m == 0:
        return verts
    out = np.empty((m + 4, 2), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double* vx = <double*> malloc(4 * (m + 4) * sizeof(double))
    if vx == NULL:
        raise MemoryError()
    cdef double* vy = vx + (m + 4)
    cdef double* ox = vy + (m + 4)
    cdef double* oy = ox + (m + 4)
    cdef int i, cnt
    for i in range(m):
        vx[i] = v[i, 0]
        vy[i] = v[i, 1]
    cnt = _clip_one(vx, vy, m, nx, ny, off, eps, ox, oy)
    for i in range(cnt):
        o[i, 0] = ox[i]
        o[i, 1] = oy[i]
    free(vx)
    return out[:cnt].copy()


cdef _order_outsiders(const double[:, ::1] points, list members, int n):
    inside = np.zeros(n, dtype=bool)
    inside[members] = True
    outsiders = np.nonzero(~inside)[0].astype(np.int64)
    anchor = np.asarray(points)[members].mean(axis=0)
    d2 = np.sum((np.asarray(points)[outsiders] - anchor) ** 2, axis=1)
    return np.ascontiguousarray(outsiders[np.argsort(d2, kind="stable")])


def clip_cell(points, members, domain, double eps):
    points = np.ascontiguousarray(points, dtype=np.float64)
    domain = np.ascontiguousarray(domain, dtype=np.float64)
    cdef const double[:, ::1] p = points
    cdef int n = p.shape[0]
    cdef int k = len(members)
    members = list(members)
    order = _order_outsiders(p, members, n)
    cdef long[::1] ordv = order
    cdef long[::1] mem = np.asarray(members, dtype=np.int64)
    cdef int nout = ordv.shape[0]
    if nout == 0:
        return domain

    cdef const double[:, ::1] dom = domain
    cdef int m0 = dom.shape[0]
    cdef int cap = m0 + k * nout + 8
    cdef double* buf = <double*> malloc(4 * cap * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* ax = buf
    cdef double* ay = buf + cap
    cdef double* bx = buf + 2 * cap
    cdef double* by = buf + 3 * cap
    cdef int i, m = m0
    for i in range(m0):
        ax[i] = dom[i, 0]
        ay[i] = dom[i, 1]
    cdef int nclips = k * nout
    m = _clip_cell_raw(p, &mem[0], k, &ordv[0], nout, ax, ay, bx, by, m, eps)
    # after an odd number of buffer swaps the data sits in (bx, by)
    cdef double* rx = ax
    cdef double* ry = ay
    if nclips % 2 == 1:
        rx = bx
        ry = by
    out = np.empty((m, 2), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(m):
        o[i, 0] = rx[i]
        o[i, 1] = ry[i]
    free(buf)
    return out


def build_cells(points, int k, domain, double eps, double eps_area):
    """Enumerate all C(n, k) subsets; return [(subset, vertices)] for cells
    with area > eps_area, in subset-lex order.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    domain = np.ascontiguousarray(domain, dtype=np.float64)
    cdef const double[:, ::1] p = points
    cdef const double[:, ::1] dom = domain
    cdef int n = p.shape[0]
    cdef int m0 = dom.shape[0]
    cdef int nout = n - k
    cdef int cap = m0 + k * nout + 8
    cdef int nclips = k * nout

    cdef double* buf = <double*> malloc(4 * cap * sizeof(double))
    cdef long* mem = <long*> malloc(n * sizeof(long))
    cdef long* order = <long*> malloc((nout if nout > 0 else 1) * sizeof(long))
    cdef long* rest = <long*> malloc((nout if nout > 0 else 1) * sizeof(long))
    cdef double* d2 = <double*> malloc((nout if nout > 0 else 1) * sizeof(double))
    if buf == NULL or mem == NULL or order == NULL or rest == NULL or d2 == NULL:
        free(buf); free(mem); free(order); free(rest); free(d2)
        raise MemoryError()
    cdef double* ax = buf
    cdef double* ay = buf + cap
    cdef double* bx = buf + 2 * cap
    cdef double* by = buf + 3 * cap

    cells = []
    cdef int i, j, t, m, idx, best
    cdef double anchx, anchy, dx, dy, tmp
    cdef long tmpl
    cdef double* rx
    cdef double* ry
    cdef double area

    # lexicographic combination enumeration
    for i in range(k):
        mem[i] = i
    while True:
        # outsiders sorted by squared distance to the subset anchor
        anchx = 0.0
        anchy = 0.0
        for i in range(k):
            anchx += p[mem[i], 0]
            anchy += p[mem[i], 1]
        anchx /= k
        anchy /= k
        j = 0
        t = 0
        for i in range(n):
            if j < k and mem[j] == i:
                j += 1
            else:
                rest[t] = i
                t += 1
        for i in range(nout):
            dx = p[rest[i], 0] - anchx
            dy = p[rest[i], 1] - anchy
            d2[i] = dx * dx + dy * dy
            order[i] = rest[i]
        # insertion sort by d2 (nout is small)
        for i in range(1, nout):
            tmp = d2[i]
            tmpl = order[i]
            j = i - 1
            while j >= 0 and d2[j] > tmp:
                d2[j + 1] = d2[j]
                order[j + 1] = order[j]
                j -= 1
            d2[j + 1] = tmp
            order[j + 1] = tmpl

        m = m0
        for i in range(m0):
            ax[i] = dom[i, 0]
            ay[i] = dom[i, 1]
        m = _clip_cell_raw(p, mem, k, order, nout, ax, ay, bx, by, m, eps)
        if m >= 3:
            rx = ax
            ry = ay
            if nclips % 2 == 1:
                rx = bx
                ry = by
            area = _shoelace_xy(rx, ry, m)
            if area > eps_area:
                out = np.empty((m, 2), dtype=np.float64)
                for i in range(m):
                    out[i, 0] = rx[i]
                    out[i, 1] = ry[i]
                cells.append((tuple(mem[i] for i in range(k)), out))

        # advance combination
        idx = k - 1
        while idx >= 0 and mem[idx] == n - k + idx:
            idx -= 1
        if idx < 0:
            break
        mem[idx] += 1
        for i in range(idx + 1, k):
            mem[i] = mem[i - 1] + 1

    free(buf); free(mem); free(order); free(rest); free(d2)
    return cells


cdef double _shoelace_xy(double* vx, double* vy, int m) nogil:
    return _shoelace(vx, vy, m)
