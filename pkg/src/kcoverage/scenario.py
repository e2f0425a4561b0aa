"""Scenario files: INI-style sections describing domain, cost, density,
sensors, controller, and simulation settings.

Example::

    [domain]
    vertices = 0 0 ; 10 0 ; 10 10 ; 0 10

    [cost]
    name = sum_squared_half
    order = 2

    [density]
    kind = uniform

    [sensors]
    mode = random
    count = 50
    seed = 7

    [controller]
    kind = gradient
    gain = 1.0

    [sim]
    t_end = 50
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

import numpy as np

from . import coverage, radar
from .density import expression_density, load_grid_density
from .dynamics import AvoidanceSpec, ControllerSpec, SimulationConfig, random_initial
from .geometry import ConvexPolygon, SensorConfiguration
from .quadrature import DensityField, QuadratureSpec


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    domain: ConvexPolygon
    order: int
    cost: coverage.CostFunction
    density: DensityField
    sensors_mode: str  # "explicit" | "random"
    explicit_positions: np.ndarray | None
    random_count: int
    random_seed: int
    controller: ControllerSpec
    sim: SimulationConfig
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def initial_sensors(self, seed_override=None) -> SensorConfiguration:
        if self.sensors_mode == "explicit":
            return SensorConfiguration(self.explicit_positions)
        seed = self.random_seed if seed_override is None else seed_override
        return random_initial(self.random_count, self.domain, seed)


def _parse_points(text):
    pts = []
    for chunk in text.replace(",", " ").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        vals = chunk.split()
        if len(vals) != 2:
            raise ScenarioError(f"bad point {chunk!r} (expected 'x y')")
        pts.append((float(vals[0]), float(vals[1])))
    return np.array(pts)


def _build_cost(name, order, cp, section):
    if name == "sum_distance":
        return coverage.sum_distance(order)
    if name == "sum_squared_half":
        return coverage.sum_squared_half(order)
    if name == "max_distance":
        return coverage.max_distance(order)
    if name == "p_norm":
        return coverage.p_norm(cp.getint(section, "n", fallback=8), order)
    if name == "neg_detection":
        if order != 2:
            raise ScenarioError("neg_detection requires order = 2")
        params = radar.RadarParams(
            power_constant=cp.getfloat(section, "power_constant"),
            false_alarm=cp.getfloat(section, "false_alarm"),
        )
        return radar.neg_detection_cost(params)
    raise ScenarioError(f"unknown cost {name!r}")


def load_scenario(path) -> Scenario:
    if not os.path.exists(path):
        raise ScenarioError(f"scenario file not found: {path}")
    cp = configparser.ConfigParser()
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ScenarioError(f"cannot parse scenario: {exc}") from exc

    try:
        domain = ConvexPolygon(_parse_points(cp.get("domain", "vertices")))
        if domain.is_empty or not domain.is_convex_ccw():
            raise ScenarioError("domain must be a nonempty convex polygon")

        order = cp.getint("cost", "order", fallback=2)
        if order not in (1, 2, 3):
            raise ScenarioError("order must be 1, 2 or 3")
        cost = _build_cost(cp.get("cost", "name"), order, cp, "cost")

        kind = cp.get("density", "kind", fallback="uniform")
        if kind == "uniform":
            density = DensityField.uniform(cp.getfloat("density", "value", fallback=1.0))
        elif kind == "expression":
            density = expression_density(cp.get("density", "expr"))
        elif kind == "grid":
            grid_path = cp.get("density", "file")
            if not os.path.isabs(grid_path):
                grid_path = os.path.join(os.path.dirname(os.path.abspath(path)), grid_path)
            if not os.path.exists(grid_path):
                raise ScenarioError(f"density grid file not found: {grid_path}")
            density = load_grid_density(grid_path)
        else:
            raise ScenarioError(f"unknown density kind {kind!r}")

        mode = cp.get("sensors", "mode", fallback=None)
        explicit = None
        count = 0
        seed = cp.getint("sensors", "seed", fallback=0)
        if mode is None:
            mode = "explicit" if cp.has_option("sensors", "positions") else "random"
        if mode == "explicit":
            explicit = _parse_points(cp.get("sensors", "positions"))
            if len(explicit) < order:
                raise ScenarioError("need at least `order` sensors")
        elif mode == "random":
            count = cp.getint("sensors", "count")
            if count < order:
                raise ScenarioError("need at least `order` sensors")
        else:
            raise ScenarioError(f"unknown sensors mode {mode!r}")

        avoidance = None
        if cp.has_option("controller", "avoidance_strength"):
            avoidance = AvoidanceSpec(
                strength=cp.getfloat("controller", "avoidance_strength"),
                range=cp.getfloat("controller", "avoidance_range"),
            )
        controller = ControllerSpec(
            kind=cp.get("controller", "kind", fallback="gradient"),
            gain=cp.getfloat("controller", "gain", fallback=1.0),
            avoidance=avoidance,
        )

        quad = QuadratureSpec(
            rule_degree=cp.getint("quadrature", "degree", fallback=8),
            subdivision=cp.getint("quadrature", "subdivision", fallback=1),
        )

        dt = cp.getfloat("sim", "dt", fallback=None) if cp.has_option("sim", "dt") else None
        stop = (
            cp.getfloat("sim", "stop_grad_tol")
            if cp.has_option("sim", "stop_grad_tol")
            else None
        )
        sim = SimulationConfig(
            dt=dt,
            t_end=cp.getfloat("sim", "t_end", fallback=50.0),
            stop_grad_tol=stop,
            seed=cp.getint("sim", "seed", fallback=0),
            controller=controller,
            quadrature=quad,
        )
    except ScenarioError:
        raise
    except (configparser.Error, ValueError) as exc:
        raise ScenarioError(f"invalid scenario: {exc}") from exc

    return Scenario(
        domain=domain,
        order=order,
        cost=cost,
        density=density,
        sensors_mode=mode,
        explicit_positions=explicit,
        random_count=count,
        random_seed=seed,
        controller=controller,
        sim=sim,
        quadrature=quad,
    )
