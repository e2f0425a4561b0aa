"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from kcoverage import ConvexPolygon, SensorConfiguration


@pytest.fixture
def unit_square():
    return ConvexPolygon.box(0.0, 0.0, 1.0, 1.0)


@pytest.fixture
def five_sensors():
    return SensorConfiguration(
        [[0.2, 0.3], [0.7, 0.6], [0.4, 0.8], [0.8, 0.2], [0.5, 0.5]]
    )


def random_config(n, seed, lo=0.1, hi=0.9):
    """Seeded sensor positions inside [lo, hi]^2."""
    rng = np.random.default_rng(seed)
    return SensorConfiguration(lo + (hi - lo) * rng.random((n, 2)))


def equilateral_sensors(center=(0.5, 0.5), radius=0.3):
    """Three sensors at the corners of an equilateral triangle."""
    cx, cy = center
    ang = np.deg2rad([90.0, 210.0, 330.0])
    return SensorConfiguration(
        np.column_stack([cx + radius * np.cos(ang), cy + radius * np.sin(ang)])
    )


def sample_in(poly, n, seed):
    """n uniform points inside the polygon, rejection sampled."""
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = poly.bounding_box()
    out = []
    while len(out) < n:
        cand = rng.uniform([x0, y0], [x1, y1], size=(4 * n, 2))
        for q in cand:
            if poly.contains(q, eps=0.0):
                out.append(q)
                if len(out) == n:
                    break
    return np.array(out)
