"""Compiled vs pure-Python clipping kernel parity."""

import numpy as np
import pytest

from kcoverage import KERNEL_IMPLEMENTATION
from kcoverage import _clippure as pure

compiled = pytest.importorskip(
    "kcoverage._clipcore", reason="compiled clipping extension not built"
)

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
EPS = 1e-12
EPS_AREA = 1e-15


def random_points(n, seed):
    rng = np.random.default_rng(seed)
    return 0.05 + 0.9 * rng.random((n, 2))


def test_extension_is_active_by_default():
    assert KERNEL_IMPLEMENTATION in ("cython", "python")


def test_shoelace_area_parity():
    rng = np.random.default_rng(0)
    for _ in range(50):
        m = rng.integers(3, 9)
        angles = np.sort(rng.uniform(0, 2 * np.pi, m))
        verts = np.column_stack([np.cos(angles), np.sin(angles)]) * rng.uniform(0.5, 2)
        assert compiled.shoelace_area(verts) == pytest.approx(
            pure.shoelace_area(verts), rel=1e-14
        )


def test_clip_halfplane_parity():
    rng = np.random.default_rng(1)
    for _ in range(200):
        nx, ny = rng.normal(size=2)
        off = rng.uniform(-1.5, 1.5)
        a = compiled.clip_halfplane(SQUARE, nx, ny, off, EPS)
        b = pure.clip_halfplane(SQUARE, nx, ny, off, EPS)
        assert len(a) == len(b)
        if len(a):
            assert np.allclose(a, b, atol=1e-12)


def test_clip_cell_parity():
    pts = random_points(8, 2)
    for members in [(0,), (3,), (0, 1), (2, 5), (0, 4, 7)]:
        a = compiled.clip_cell(pts, members, SQUARE, EPS)
        b = pure.clip_cell(pts, members, SQUARE, EPS)
        assert len(a) == len(b)
        if len(a):
            assert np.allclose(a, b, atol=1e-12)


@pytest.mark.parametrize("n,k,seed", [(6, 1, 3), (8, 2, 4), (10, 3, 5), (12, 2, 6)])
def test_build_cells_parity(n, k, seed):
    pts = random_points(n, seed)
    a = compiled.build_cells(pts, k, SQUARE, EPS, EPS_AREA)
    b = pure.build_cells(pts, k, SQUARE, EPS, EPS_AREA)
    assert [s for s, _ in a] == [s for s, _ in b]
    for (_, va), (_, vb) in zip(a, b):
        assert va.shape == vb.shape
        assert np.allclose(va, vb, atol=1e-12)
        assert compiled.shoelace_area(va) == pytest.approx(
            pure.shoelace_area(vb), rel=1e-12
        )
