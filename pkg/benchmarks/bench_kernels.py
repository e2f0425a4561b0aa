"""Benchmark the compiled clipping kernel against the pure-Python fallback.

Times order-k cell construction (the hot path of build_partition) for several
problem sizes and verifies both implementations produce identical partitions.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from kcoverage import _clippure as pure

try:
    from kcoverage import _clipcore as compiled
except ImportError:
    compiled = None

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
EPS = 1e-12
EPS_AREA = 1e-15


def bench(kernel, pts, k, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        cells = kernel.build_cells(pts, k, SQUARE, EPS, EPS_AREA)
        best = min(best, time.perf_counter() - t0)
    return best, cells


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if compiled is None:
        print("compiled extension not available; timing the pure kernel only")

    print(f"{'n':>4} {'k':>2} {'cells':>6} {'pure [ms]':>10} {'cython [ms]':>12} {'speedup':>8}")
    for n in (10, 30, 50):
        for k in (2, 3):
            rng = np.random.default_rng(100 * n + k)
            pts = 0.05 + 0.9 * rng.random((n, 2))
            t_pure, cells_pure = bench(pure, pts, k, args.repeats)
            if compiled is None:
                print(f"{n:>4} {k:>2} {len(cells_pure):>6} {1e3 * t_pure:>10.2f} {'-':>12} {'-':>8}")
                continue
            t_comp, cells_comp = bench(compiled, pts, k, args.repeats)

            assert [s for s, _ in cells_comp] == [s for s, _ in cells_pure]
            for (_, va), (_, vb) in zip(cells_comp, cells_pure):
                assert abs(compiled.shoelace_area(va) - pure.shoelace_area(vb)) <= 1e-12

            print(
                f"{n:>4} {k:>2} {len(cells_pure):>6} {1e3 * t_pure:>10.2f} "
                f"{1e3 * t_comp:>12.2f} {t_pure / t_comp:>7.1f}x"
            )
    print("partition contents verified identical between kernels")


if __name__ == "__main__":
    main()
