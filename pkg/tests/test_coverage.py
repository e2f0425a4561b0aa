"""Coverage functional: cost admissibility, H, gradients, centroid identity."""

import itertools

import numpy as np
import pytest

import kcoverage as kc
from kcoverage import (
    ConfigurationError,
    CostFunction,
    CostRejectedError,
    DensityField,
    QuadratureSpec,
    SensorConfiguration,
    build_partition,
    centroid_gradient,
    evaluate_H,
    evaluate_H_bruteforce,
    gradient,
    max_distance,
    p_norm,
    sum_distance,
    sum_squared_half,
    validate_cost,
)
from kcoverage.radar import RadarParams, neg_detection_cost

from conftest import random_config, sample_in

UNIFORM = DensityField.uniform()
SPEC = QuadratureSpec(8, 2)


def builtin_costs():
    return [
        sum_distance(2),
        sum_squared_half(2),
        p_norm(8, 2),
        max_distance(2),
        neg_detection_cost(RadarParams(0.2, 1e-3)),
    ]


class TestValidateCost:
    @pytest.mark.parametrize("f", builtin_costs(), ids=lambda f: f.name)
    def test_builtins_pass(self, f):
        report = validate_cost(f, samples=200, seed=0)
        assert report.passed

    def test_asymmetric_cost_rejected(self):
        bad = CostFunction(
            "difference",
            2,
            lambda D: D[:, 0] - D[:, 1],
            lambda m, D: np.where(m == 0, 1.0, -1.0) * np.ones(len(D)),
        )
        with pytest.raises(CostRejectedError):
            validate_cost(bad)

    def test_decreasing_cost_rejected(self):
        bad = CostFunction(
            "negsum", 2, lambda D: -D.sum(axis=1), lambda m, D: -np.ones(len(D))
        )
        with pytest.raises(CostRejectedError):
            validate_cost(bad)


class TestEvaluateH:
    def test_pair_matches_grid_oracle(self, unit_square):
        S = SensorConfiguration([[0.25, 0.5], [0.75, 0.5]])
        f = sum_squared_half(2)
        part = build_partition(S, 2, unit_square)
        H = evaluate_H(part, S, f, UNIFORM, SPEC)
        H_grid = evaluate_H_bruteforce(S, f, UNIFORM, unit_square, 2, 1024)
        assert abs(H - H_grid) <= 1e-3 * abs(H)

    def test_single_pair_no_min(self, unit_square):
        # n = k = 2: one subset, H is a plain integral of f
        S = SensorConfiguration([[0.3, 0.3], [0.6, 0.7]])
        f = sum_distance(2)
        part = build_partition(S, 2, unit_square)
        H = evaluate_H(part, S, f, UNIFORM, SPEC)
        from kcoverage import integrate

        direct = integrate(
            unit_square,
            lambda p: np.hypot(p[:, 0] - 0.3, p[:, 1] - 0.3)
            + np.hypot(p[:, 0] - 0.6, p[:, 1] - 0.7),
            UNIFORM,
            QuadratureSpec(10, 5),
        )
        assert H == pytest.approx(direct, rel=1e-5)

    def test_density_scaling_linearity(self, unit_square, five_sensors):
        f = sum_squared_half(2)
        part = build_partition(five_sensors, 2, unit_square)
        H1 = evaluate_H(part, five_sensors, f, UNIFORM, SPEC)
        H2 = evaluate_H(part, five_sensors, f, DensityField.uniform(2.0), SPEC)
        assert H2 == pytest.approx(2.0 * H1, rel=1e-12)

    def test_arity_mismatch_raises(self, unit_square, five_sensors):
        part = build_partition(five_sensors, 2, unit_square)
        with pytest.raises(ConfigurationError):
            evaluate_H(part, five_sensors, sum_distance(3), UNIFORM, SPEC)


class TestBruteForce:
    def test_constant_cost_gives_area(self, unit_square):
        S = random_config(4, 0)
        const = CostFunction(
            "const", 2, lambda D: np.full(len(D), 2.5), lambda m, D: np.zeros(len(D))
        )
        H = evaluate_H_bruteforce(S, const, UNIFORM, unit_square, 2, 256)
        assert H == pytest.approx(2.5 * unit_square.area(), rel=1e-9)

    def test_minimum_resolution_enforced(self, unit_square):
        S = random_config(4, 0)
        with pytest.raises(ValueError):
            evaluate_H_bruteforce(S, sum_distance(2), UNIFORM, unit_square, 2, 32)


class TestLemma1:
    """Inside a cell, the cell's subset minimizes the cost pointwise."""

    @pytest.mark.parametrize("f", builtin_costs(), ids=lambda f: f.name)
    def test_pointwise_optimality(self, unit_square, five_sensors, f):
        part = build_partition(five_sensors, 2, unit_square)
        pts = sample_in(unit_square, 10_000, seed=31)
        diff = pts[:, None, :] - five_sensors.positions[None, :, :]
        D = np.sqrt((diff ** 2).sum(axis=2))
        gap = np.sort(D, axis=1)
        interior = (gap[:, 2] - gap[:, 1]) > 1e-6  # away from cell boundaries
        subsets = list(itertools.combinations(range(5), 2))
        vals = np.column_stack([f.value(D[:, list(s)]) for s in subsets])
        for q, v in zip(pts[interior], vals[interior]):
            cell = part.cells[part.locate(q)]
            own = v[subsets.index(cell.subset)]
            assert own <= v.min() + 1e-12


class TestGradient:
    def test_symmetric_pair_axis_component_vanishes(self, unit_square):
        S = SensorConfiguration([[0.5, 0.3], [0.5, 0.7]])  # symmetric about x=0.5
        part = build_partition(S, 2, unit_square)
        g = gradient(part, S, sum_squared_half(2), UNIFORM, SPEC)
        assert abs(g[0, 0]) < 1e-12
        assert abs(g[1, 0]) < 1e-12

    def test_permutation_equivariance(self, unit_square, five_sensors):
        f = sum_distance(2)
        part = build_partition(five_sensors, 2, unit_square)
        g = gradient(part, five_sensors, f, UNIFORM, SPEC)
        perm = [3, 1, 4, 0, 2]
        S2 = SensorConfiguration(five_sensors.positions[perm])
        part2 = build_partition(S2, 2, unit_square)
        g2 = gradient(part2, S2, f, UNIFORM, SPEC)
        assert np.allclose(g2, g[perm], atol=1e-12)

    def test_centroid_identity(self, unit_square, five_sensors):
        part = build_partition(five_sensors, 2, unit_square)
        g = gradient(part, five_sensors, sum_squared_half(2), UNIFORM, SPEC)
        cg = centroid_gradient(part, five_sensors, UNIFORM, SPEC)
        scale = np.abs(cg).max()
        assert np.abs(g - cg).max() <= 1e-8 * scale

    def test_zero_density_gives_zero_centroid_gradient(self, unit_square, five_sensors):
        part = build_partition(five_sensors, 2, unit_square)
        cg = centroid_gradient(part, five_sensors, DensityField.uniform(0.0), SPEC)
        assert np.all(cg == 0.0)

    def test_shared_pass_matches_separate_calls(self, unit_square, five_sensors):
        f = p_norm(8, 2)
        part = build_partition(five_sensors, 2, unit_square)
        H, g = kc.coverage.evaluate_H_and_gradient(part, five_sensors, f, UNIFORM, SPEC)
        assert H == pytest.approx(evaluate_H(part, five_sensors, f, UNIFORM, SPEC))
        assert np.allclose(g, gradient(part, five_sensors, f, UNIFORM, SPEC))
