"""Benchmark the compiled correlation core against the pure-Python fallback.

Times the three hot operations used by the continuous argmax search:
single-point evaluation, batched evaluation over a grid, and the golden-section
axis refinement.  Run with ``python3 benchmarks/bench_correlation.py``.
"""

import argparse
import time

import numpy as np

from contomp import _corrpy

try:
    from contomp import _corrcore
except ImportError:
    _corrcore = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best


def bench(mod, name, rng, D, m, n_pts, repeat):
    anchors = np.ascontiguousarray(rng.uniform(-5, 5, (m, D)))
    weights = np.ascontiguousarray(rng.uniform(-2, 2, m))
    pt = np.ascontiguousarray(rng.uniform(-5, 5, D))
    pts = np.ascontiguousarray(rng.uniform(-5, 5, (n_pts, D)))
    base = np.zeros(D)
    rows = {}
    rows["eval_one"] = timeit(
        lambda: mod.eval_one(_corrpy.LAPLACE, 1.0, 0.5, weights, anchors, pt), repeat * 10
    )
    rows["eval_batch"] = timeit(
        lambda: mod.eval_batch(_corrpy.LAPLACE, 1.0, 0.5, weights, anchors, pts), repeat
    )
    rows["golden_max"] = timeit(
        lambda: mod.golden_max(_corrpy.LAPLACE, 1.0, 0.5, weights, anchors, base, 0, -5.0, 5.0, 60),
        repeat,
    )
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dimension", type=int, default=2)
    ap.add_argument("--anchors", type=int, default=8)
    ap.add_argument("--points", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"D={args.dimension}  anchors={args.anchors}  batch={args.points}  repeat={args.repeat}")
    py = bench(_corrpy, "python", rng, args.dimension, args.anchors, args.points, args.repeat)
    if _corrcore is None:
        print("compiled core not available; python timings only")
        for op, t in py.items():
            print(f"  {op:12s}  python {t * 1e6:10.2f} us")
        return
    rng = np.random.default_rng(0)
    cc = bench(_corrcore, "compiled", rng, args.dimension, args.anchors, args.points, args.repeat)
    print(f"  {'operation':12s}  {'python (us)':>12s}  {'compiled (us)':>14s}  {'speedup':>8s}")
    for op in py:
        print(f"  {op:12s}  {py[op] * 1e6:12.2f}  {cc[op] * 1e6:14.2f}  {py[op] / cc[op]:7.1f}x")


if __name__ == "__main__":
    main()
