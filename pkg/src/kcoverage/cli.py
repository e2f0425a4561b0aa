"""Command-line entry point.

Subcommands: ``partition`` (export the order-k partition as JSON),
``evaluate`` (one-shot H and gradient report), ``simulate`` (run the closed
loop, emit trajectory CSV, summary JSON and SVG plots), and a hidden
``oracle`` command for brute-force grid debugging.

Exit codes: 0 success, 2 bad scenario, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import coverage, oracle, svgplot
from .dynamics import SimulationAbort, SimulationConfig, run
from .geometry import DegenerateInputError, SensorConfiguration, build_partition
from .quadrature import cell_moments
from .scenario import ScenarioError, load_scenario

EXIT_OK = 0
EXIT_BAD_SCENARIO = 2
EXIT_NUMERICAL = 3


def _load(args):
    scenario = load_scenario(args.scenario)
    sensors = scenario.initial_sensors(seed_override=args.seed)
    return scenario, sensors


def cmd_partition(args):
    scenario, sensors = _load(args)
    partition = build_partition(sensors, scenario.order, scenario.domain)
    doc = partition.to_json_dict()
    out = args.out or "partition.json"
    if os.path.isdir(out):
        out = os.path.join(out, "partition.json")
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=1)
    print(f"{len(partition.cells)} cells -> {out}")
    return EXIT_OK


def cmd_evaluate(args):
    scenario, sensors = _load(args)
    partition = build_partition(sensors, scenario.order, scenario.domain)
    H, grad = coverage.evaluate_H_and_gradient(
        partition, sensors, scenario.cost, scenario.density, scenario.quadrature
    )
    gnorm = float(np.hypot(grad[:, 0], grad[:, 1]).max())
    print(f"H = {H:.12g}")
    print(f"gradient inf-norm = {gnorm:.12g}")
    print("cell masses:")
    for cell in partition.cells:
        m = cell_moments(cell.polygon, scenario.density, scenario.quadrature)
        print(f"  {cell.subset}: mass={m.mass:.12g}")
    return EXIT_OK


def cmd_simulate(args):
    scenario, sensors = _load(args)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    cfg = scenario.sim
    traj = run(sensors, scenario.domain, scenario.cost, scenario.density, cfg)

    csv_path = os.path.join(out_dir, "trajectory.csv")
    traj.to_csv(csv_path)

    final_sensors = SensorConfiguration(traj.positions[-1])
    final_partition = build_partition(final_sensors, scenario.order, scenario.domain)
    n = len(traj.positions[0])
    paths = [[pos[i] for pos in traj.positions] for i in range(n)]
    with open(os.path.join(out_dir, "trajectory.svg"), "w") as fh:
        fh.write(
            svgplot.trajectory_svg(scenario.domain, final_partition, paths, traj.positions[-1])
        )
    with open(os.path.join(out_dir, "performance.svg"), "w") as fh:
        fh.write(svgplot.curve_svg(traj.times, traj.H_values, xlabel="t", ylabel="H"))

    summary = {
        "final_H": traj.H_values[-1],
        "iterations": len(traj.times) - 1,
        "final_time": traj.times[-1],
        "final_grad_norm": traj.grad_norms[-1],
        "converged": traj.converged,
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=1)
    print(json.dumps(summary))
    return EXIT_OK


def cmd_oracle(args):
    scenario, sensors = _load(args)
    H = coverage.evaluate_H_bruteforce(
        sensors,
        scenario.cost,
        scenario.density,
        scenario.domain,
        scenario.order,
        grid_resolution=args.grid,
    )
    print(f"H_grid({args.grid}) = {H:.12g}")
    counts = {}
    rng = np.random.default_rng(0)
    x0, y0, x1, y1 = scenario.domain.bounding_box()
    while sum(counts.values()) < 1000:
        q = rng.uniform([x0, y0], [x1, y1])
        if scenario.domain.contains(q):
            subset = oracle.classify_point(q, sensors, scenario.order, scenario.cost)
            counts[subset] = counts.get(subset, 0) + 1
    print("sampled cell occupancy:")
    for subset in sorted(counts):
        print(f"  {subset}: {counts[subset]}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="kcoverage", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario file path")
        p.add_argument("--out", default=None, help="output file or directory")
        p.add_argument("--seed", type=int, default=None, help="override the sensors seed")
        p.add_argument("--grid", type=int, default=256, help="oracle grid resolution")

    for name, fn, desc in [
        ("partition", cmd_partition, "export the order-k Voronoi partition as JSON"),
        ("evaluate", cmd_evaluate, "report H, gradient norm and cell masses"),
        ("simulate", cmd_simulate, "run the coverage dynamics and emit artifacts"),
    ]:
        p = sub.add_parser(name, help=desc)
        common(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("oracle")  # hidden from help on purpose: debugging aid
    common(p)
    p.set_defaults(fn=cmd_oracle)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_SCENARIO
    except (DegenerateInputError, SimulationAbort, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
