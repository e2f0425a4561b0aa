"""Sensor motion under gradient or centroidal control.

Explicit Euler on the (negative-)gradient flow with adaptive step halving:
for pure gradient control a step that increases H is rejected, the step size
halved and retried. Positions are projected back onto the domain after every
step; an optional short-range repulsion keeps sensor pairs from collocating.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from .coverage import evaluate_H_and_gradient, gradient, union_region_moments
from .geometry import DegenerateInputError, SensorConfiguration, build_partition
from .quadrature import QuadratureSpec

log = logging.getLogger(__name__)

DT_MIN = 1e-4
DT_MAX = 1e-1
MAX_HALVINGS = 20


class SimulationAbort(RuntimeError):
    """Step size collapsed without producing an acceptable step."""


@dataclass(frozen=True)
class AvoidanceSpec:
    strength: float
    range: float

    def __post_init__(self):
        if self.range <= 0:
            raise ValueError("avoidance range must be positive")
        if self.strength < 0:
            raise ValueError("avoidance strength must be non-negative")


@dataclass(frozen=True)
class ControllerSpec:
    kind: str = "gradient"  # "gradient" | "centroid"
    gain: float = 1.0
    avoidance: AvoidanceSpec | None = None

    def __post_init__(self):
        if self.kind not in ("gradient", "centroid"):
            raise ValueError(f"unknown controller kind {self.kind!r}")
        if self.gain <= 0:
            raise ValueError("gain must be positive")


@dataclass(frozen=True)
class SimulationConfig:
    dt: float | None = None  # None: 0.05 * diam(Q)^2 / max initial |grad|, clamped
    t_end: float = 50.0
    stop_grad_tol: float | None = None  # None: 1e-6 * initial grad inf-norm
    seed: int = 0
    controller: ControllerSpec = field(default_factory=ControllerSpec)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.stop_grad_tol is not None and self.stop_grad_tol < 0:
            raise ValueError("stop_grad_tol must be nonnegative")


@dataclass
class Trajectory:
    times: list
    positions: list  # (n, 2) arrays, one per recorded time
    H_values: list
    grad_norms: list  # inf-norm over sensors of per-sensor gradient magnitude
    converged: bool

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "sensor_index", "x", "y", "H", "grad_norm"])
            for t, pos, H, g in zip(self.times, self.positions, self.H_values, self.grad_norms):
                for i, (x, y) in enumerate(pos):
                    w.writerow([f"{t:.12g}", i, f"{x:.12g}", f"{y:.12g}", f"{H:.12g}", f"{g:.12g}"])


def _avoidance_term(positions, avoid: AvoidanceSpec):
    n = len(positions)
    u = np.zeros_like(positions)
    for i in range(n):
        delta = positions[i][None, :] - positions
        d = np.hypot(delta[:, 0], delta[:, 1])
        near = (d < avoid.range) & (d > 0)
        near[i] = False
        if np.any(near):
            u[i] = (avoid.strength * delta[near] / (d[near] ** 2)[:, None]).sum(axis=0)
    return u


def control_term(S: SensorConfiguration, partition, f, phi, qspec, controller: ControllerSpec):
    """Velocity field of the chosen controller at the current configuration."""
    if controller.kind == "gradient":
        vel = -controller.gain * gradient(partition, S, f, phi, qspec)
    else:
        moments = union_region_moments(partition, S, phi, qspec)
        vel = np.zeros((len(S), 2))
        for i, m in enumerate(moments):
            if m.zero_mass:
                log.warning("sensor %d: zero-mass region, centroid control skipped", i)
                continue
            vel[i] = controller.gain * (m.centroid - S.positions[i])
    if controller.avoidance is not None:
        vel = vel + _avoidance_term(np.asarray(S.positions), controller.avoidance)
    return vel


def default_dt(Q, max_grad_norm):
    if max_grad_norm <= 0:
        return DT_MAX
    return float(np.clip(0.05 * Q.diameter() ** 2 / max_grad_norm, DT_MIN, DT_MAX))


def _grad_norms(grad):
    return np.hypot(grad[:, 0], grad[:, 1])


def run(initial: SensorConfiguration, Q, f, phi, config: SimulationConfig) -> Trajectory:
    """Integrate the closed loop until t_end or the gradient stop criterion."""
    ctrl = config.controller
    qspec = config.quadrature
    enforce_descent = ctrl.kind == "gradient" and ctrl.avoidance is None

    S = SensorConfiguration(initial.positions)
    partition = build_partition(S, f.arity, Q)
    H, grad = evaluate_H_and_gradient(partition, S, f, phi, qspec)
    gnorm = float(_grad_norms(grad).max())

    dt = config.dt if config.dt is not None else default_dt(Q, gnorm)
    tol = config.stop_grad_tol if config.stop_grad_tol is not None else 1e-6 * gnorm
    H0 = H
    descent_slack = 1e-9 * abs(H0)

    traj = Trajectory([0.0], [np.array(S.positions)], [H], [gnorm], converged=False)
    t = 0.0
    while t < config.t_end:
        if gnorm < tol:
            traj.converged = True
            break
        vel = control_term(S, partition, f, phi, qspec, ctrl)
        accepted = False
        for _ in range(MAX_HALVINGS + 1):
            try:
                new_pos = np.asarray(S.positions) + dt * vel
                new_pos = np.array([Q.project(p) for p in new_pos])
                S_new = SensorConfiguration(new_pos)
                partition_new = build_partition(S_new, f.arity, Q)
                H_new, grad_new = evaluate_H_and_gradient(partition_new, S_new, f, phi, qspec)
            except DegenerateInputError:
                dt *= 0.5
                continue
            if enforce_descent and H_new > H + descent_slack:
                dt *= 0.5
                continue
            accepted = True
            break
        if not accepted:
            raise SimulationAbort(
                f"no acceptable step at t={t:.6g} after {MAX_HALVINGS} halvings (H={H:.6g})"
            )
        t += dt
        S, partition, H = S_new, partition_new, H_new
        grad = grad_new
        gnorm = float(_grad_norms(grad).max())
        traj.times.append(t)
        traj.positions.append(np.array(S.positions))
        traj.H_values.append(H)
        traj.grad_norms.append(gnorm)
    if gnorm < tol:
        traj.converged = True
    return traj


def random_initial(n, Q, seed) -> SensorConfiguration:
    """Uniform positions in Q by rejection sampling (PCG64, reproducible),
    resampled to keep pairwise separations above the coincidence tolerance.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if Q.area() <= 0:
        raise ValueError("zero-area domain")
    from .geometry import EPS_COINCIDE_REL

    sep = EPS_COINCIDE_REL * Q.diameter()
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = Q.bounding_box()
    chosen = []
    while len(chosen) < n:
        cand = rng.uniform([x0, y0], [x1, y1])
        if not Q.contains(cand, eps=0.0):
            continue
        if chosen and np.min(np.hypot(*(np.array(chosen) - cand).T)) < sep:
            continue
        chosen.append(cand)
    return SensorConfiguration(np.array(chosen))
