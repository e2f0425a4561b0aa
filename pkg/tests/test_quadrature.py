"""Quadrature: triangulation, polynomial exactness, moments, singular fans."""

import numpy as np
import pytest

from kcoverage import (
    CellMoments,
    ConvexPolygon,
    DensityField,
    QuadratureSpec,
    cell_moments,
    clip,
    integrate,
    triangulate,
    union_moments,
)
from kcoverage.geometry import HalfPlane
from kcoverage.quadrature import (
    cell_nodes,
    polygon_nodes,
    singular_polygon_nodes,
)

UNIFORM = DensityField.uniform()


class TestTriangulate:
    def test_square_two_triangles(self, unit_square):
        tris = triangulate(unit_square)
        assert tris.shape == (2, 3, 2)
        areas = [
            0.5
            * abs(
                (t[1] - t[0])[0] * (t[2] - t[0])[1]
                - (t[1] - t[0])[1] * (t[2] - t[0])[0]
            )
            for t in tris
        ]
        assert np.allclose(areas, 0.5)

    def test_triangle_is_itself(self):
        tri = ConvexPolygon([[0, 0], [2, 0], [0, 1]])
        tris = triangulate(tri)
        assert tris.shape == (1, 3, 2)

    def test_hexagon_area(self):
        ang = np.deg2rad(np.arange(6) * 60.0)
        hexagon = ConvexPolygon(np.column_stack([np.cos(ang), np.sin(ang)]))
        tris = triangulate(hexagon)
        assert len(tris) == 4
        total = sum(
            0.5
            * abs(
                (t[1] - t[0])[0] * (t[2] - t[0])[1]
                - (t[1] - t[0])[1] * (t[2] - t[0])[0]
            )
            for t in tris
        )
        assert total == pytest.approx(3 * np.sqrt(3) / 2, rel=1e-12)

    def test_degenerate_returns_empty(self):
        assert len(triangulate(ConvexPolygon(np.empty((0, 2))))) == 0


class TestIntegrate:
    def test_constant(self, unit_square):
        assert integrate(unit_square, lambda p: np.ones(len(p)), UNIFORM, QuadratureSpec()) == pytest.approx(1.0)

    def test_first_moment(self, unit_square):
        val = integrate(unit_square, lambda p: p[:, 0], UNIFORM, QuadratureSpec())
        assert val == pytest.approx(0.5, abs=1e-13)

    def test_radial_square(self, unit_square):
        val = integrate(
            unit_square, lambda p: (p ** 2).sum(axis=1), UNIFORM, QuadratureSpec()
        )
        assert val == pytest.approx(2.0 / 3.0, abs=1e-13)

    def test_empty_polygon_is_zero(self):
        empty = ConvexPolygon(np.empty((0, 2)))
        assert integrate(empty, lambda p: np.ones(len(p)), UNIFORM, QuadratureSpec()) == 0.0

    def test_density_weighting(self, unit_square):
        phi = DensityField(lambda p: p[:, 1])
        val = integrate(unit_square, lambda p: p[:, 0], phi, QuadratureSpec())
        assert val == pytest.approx(0.25, abs=1e-13)


class TestPolynomialExactness:
    @pytest.mark.parametrize("degree", [2, 4, 8])
    def test_monomials_on_random_triangles(self, degree):
        rng = np.random.default_rng(degree)
        for _ in range(5):
            verts = rng.uniform(-2, 2, (3, 2))
            if abs(np.linalg.det(verts[1:] - verts[0])) < 0.1:
                continue
            tri = ConvexPolygon(verts)
            for a in range(degree + 1):
                for b in range(degree + 1 - a):
                    exact = _tri_monomial(verts, a, b)
                    got = integrate(
                        tri,
                        lambda p, a=a, b=b: p[:, 0] ** a * p[:, 1] ** b,
                        None,
                        QuadratureSpec(degree, 0),
                    )
                    assert got == pytest.approx(exact, rel=1e-12, abs=1e-13)

    def test_additivity_under_clip_split(self, unit_square):
        g = lambda p: np.exp(p[:, 0]) + p[:, 1] ** 3
        spec = QuadratureSpec(10, 1)
        h = HalfPlane((1.0, 0.3), 0.6)
        left = clip(unit_square, h)
        right = clip(unit_square, HalfPlane((-1.0, -0.3), -0.6))
        whole = integrate(unit_square, g, UNIFORM, spec)
        parts = integrate(left, g, UNIFORM, spec) + integrate(right, g, UNIFORM, spec)
        assert abs(whole - parts) <= 1e-10 * abs(whole)

    def test_refinement_convergence_smooth(self, unit_square):
        g = lambda p: np.exp(p[:, 0] * p[:, 1]) * np.cos(p[:, 1])
        v1 = integrate(unit_square, g, UNIFORM, QuadratureSpec(8, 1))
        v2 = integrate(unit_square, g, UNIFORM, QuadratureSpec(8, 2))
        assert abs(v2 - v1) <= 1e-8 * abs(v1)


def _tri_monomial(verts, a, b):
    """Exact integral of x^a y^b over a triangle via affine map and the
    reference-triangle moment formula (independent of the quadrature code)."""
    from math import comb, factorial

    (x0, y0), e1, e2 = verts[0], verts[1] - verts[0], verts[2] - verts[0]
    jac = abs(e1[0] * e2[1] - e1[1] * e2[0])
    total = 0.0
    # expand (x0 + u e1x + v e2x)^a (y0 + u e1y + v e2y)^b and use
    # int_T u^p v^q du dv = p! q! / (p + q + 2)!
    for i in range(a + 1):
        for j in range(a - i + 1):
            ca = comb(a, i) * comb(a - i, j) * e1[0] ** i * e2[0] ** j * x0 ** (a - i - j)
            for k in range(b + 1):
                for l in range(b - k + 1):
                    cb = (
                        comb(b, k)
                        * comb(b - k, l)
                        * e1[1] ** k
                        * e2[1] ** l
                        * y0 ** (b - k - l)
                    )
                    p, q = i + k, j + l
                    total += ca * cb * factorial(p) * factorial(q) / factorial(p + q + 2)
    return jac * total


class TestCellMoments:
    def test_unit_square_uniform(self, unit_square):
        m = cell_moments(unit_square, UNIFORM, QuadratureSpec())
        assert m.mass == pytest.approx(1.0)
        assert np.allclose(m.centroid, [0.5, 0.5])
        assert not m.zero_mass

    def test_triangle(self):
        tri = ConvexPolygon([[0, 0], [1, 0], [0, 1]])
        m = cell_moments(tri, UNIFORM, QuadratureSpec())
        assert m.mass == pytest.approx(0.5)
        assert np.allclose(m.centroid, [1 / 3, 1 / 3])

    def test_linear_density(self, unit_square):
        phi = DensityField(lambda p: p[:, 0])
        m = cell_moments(unit_square, phi, QuadratureSpec())
        assert m.mass == pytest.approx(0.5)
        assert np.allclose(m.centroid, [2 / 3, 1 / 2])

    def test_zero_density_flags_zero_mass(self, unit_square):
        m = cell_moments(unit_square, DensityField.uniform(0.0), QuadratureSpec())
        assert m.zero_mass
        assert m.mass == 0.0


class TestUnionMoments:
    def test_two_unit_masses(self):
        a = CellMoments(1.0, np.array([0.0, 0.0]))
        b = CellMoments(1.0, np.array([2.0, 0.0]))
        m = union_moments([a, b])
        assert m.mass == pytest.approx(2.0)
        assert np.allclose(m.centroid, [1.0, 0.0])

    def test_identity(self):
        a = CellMoments(0.7, np.array([0.3, 0.4]))
        m = union_moments([a])
        assert m.mass == pytest.approx(0.7)
        assert np.allclose(m.centroid, [0.3, 0.4])

    def test_weighted(self):
        a = CellMoments(1.0, np.array([0.0, 0.0]))
        b = CellMoments(3.0, np.array([4.0, 0.0]))
        m = union_moments([a, b])
        assert np.allclose(m.centroid, [3.0, 0.0])

    def test_all_zero_mass(self):
        a = CellMoments(0.0, np.array([1.0, 1.0]), zero_mass=True)
        m = union_moments([a, a])
        assert m.zero_mass

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            union_moments([])


class TestSingularFan:
    """Fan rule collapsed at a point: exact for polynomials, fast-converging
    for radial kinks, valid for exterior points via signed weights."""

    POLY = ConvexPolygon([[0, 0], [1, 0], [1.2, 0.9], [0.3, 1.1]])

    @pytest.mark.parametrize("point", [(0.5, 0.4), (1.5, -0.3)])
    def test_exactness(self, point):
        spec = QuadratureSpec(8, 2)
        pts, wts = singular_polygon_nodes(self.POLY, np.array(point), spec)
        assert wts.sum() == pytest.approx(self.POLY.area(), rel=1e-12)
        f = lambda p: p[:, 0] ** 3 * p[:, 1] ** 2 + 2 * p[:, 0] - p[:, 1] ** 4
        ref_pts, ref_wts = polygon_nodes(self.POLY, QuadratureSpec(12, 1))
        assert (wts * f(pts)).sum() == pytest.approx(
            (ref_wts * f(ref_pts)).sum(), rel=1e-12
        )

    def test_radial_kink_convergence(self):
        g = np.array([0.5, 0.4])
        f = lambda p: np.hypot(p[:, 0] - g[0], p[:, 1] - g[1])
        ref = None
        errs = []
        vals = [
            (singular_polygon_nodes(self.POLY, g, QuadratureSpec(10, s)),)
            for s in (1, 2, 3, 6)
        ]
        results = [float((w * f(p)).sum()) for ((p, w),) in vals]
        ref = results[-1]
        errs = [abs(v - ref) for v in results[:-1]]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-9 * abs(ref)

    def test_cell_nodes_weight_sum(self, unit_square, five_sensors):
        import kcoverage as kc

        part = kc.build_partition(five_sensors, 2, unit_square)
        spec = QuadratureSpec(8, 2)
        total = 0.0
        for cell in part.cells:
            _, wts = cell_nodes(
                cell.polygon, five_sensors.positions[list(cell.subset)], spec
            )
            total += wts.sum()
        assert total == pytest.approx(unit_square.area(), rel=1e-12)
