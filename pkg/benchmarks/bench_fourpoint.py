"""Compare the compiled four-point kernel against the numpy fallback.

Builds exp(-gromov) tables from real balls, times both backends on the
same inputs, and asserts bit-identical results before reporting.

Usage: python3 benchmarks/bench_fourpoint.py [--radius N] [--repeat N]
"""
import argparse
import time

import numpy as np

from hyperlab import _fourpoint_py, groups, metrics

try:
    from hyperlab import _fourpoint
except ImportError:
    _fourpoint = None


def gromov_tables(radius):
    pres = groups.free_group(2)
    ball = groups.enumerate_ball(pres, radius)
    d = metrics.metric_distance_matrix(metrics.word_metric(pres), ball)
    tables = []
    for o in range(0, d.shape[0], max(1, d.shape[0] // 8)):
        two_g = d[o][:, None] + d[o][None, :] - d
        tables.append(np.ascontiguousarray(np.exp(-0.5 * two_g)))
    return tables


def bench(scan, tables, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = [scan(e) for e in tables]
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--radius", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    tables = gromov_tables(args.radius)
    n = tables[0].shape[0]
    triples = len(tables) * n ** 3
    print(f"radius {args.radius}: {len(tables)} tables of size {n}x{n}, "
          f"{triples} triples per pass")

    py_time, py_result = bench(_fourpoint_py.scan, tables, args.repeat)
    print(f"python  backend: {py_time:.4f}s  "
          f"({triples / py_time / 1e6:.1f} M triples/s)")

    if _fourpoint is None:
        print("compiled backend: not built (HYPERLAB_SKIP_EXT or no "
              "toolchain); nothing to compare")
        return

    c_time, c_result = bench(_fourpoint.scan, tables, args.repeat)
    print(f"compiled backend: {c_time:.4f}s  "
          f"({triples / c_time / 1e6:.1f} M triples/s)")

    assert c_result == py_result, "backends disagree"
    print(f"results bit-identical; speedup x{py_time / c_time:.1f}")


if __name__ == "__main__":
    main()
