"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--sizes 20 40 80] [--repeat 5]

Each kernel is warmed up once (JIT compilation is excluded) and the best of
``--repeat`` runs is reported in milliseconds. Outputs of both backends are
checked for equality before timing.
"""
import argparse
import time

import numpy as np

from topoprompt import kernels
from topoprompt._accel import HAVE_NUMBA
from topoprompt.homology import _sorted_edges, _sorted_triangles


def best_of(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return 1e3 * min(times)


def kernel_inputs(n, d, rng):
    pts = rng.normal(size=(n, d))
    D = kernels.implementations("numpy")[0](pts)
    src, dst, w = _sorted_edges(D)
    rank = np.zeros((n, n), dtype=np.int64)
    rank[src, dst] = np.arange(len(w))
    _, _, faces = _sorted_triangles(D, rank)
    sens = rng.normal(size=(n, n))
    np.fill_diagonal(sens, 0.0)
    skip = np.zeros(len(w), dtype=bool)
    return {
        "pairwise_distances": (pts,),
        "kruskal": (n, src, dst, skip),
        "reduce_columns": (faces, len(w)),
        "distance_chain": (pts, D, sens),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--sizes", type=int, nargs="+", default=[20, 40, 80])
    parser.add_argument("--dim", type=int, default=16)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    names = ("pairwise_distances", "kruskal", "reduce_columns", "distance_chain")
    fast = dict(zip(names, kernels.implementations("numba")))
    slow = dict(zip(names, kernels.implementations("numpy")))
    rng = np.random.default_rng(0)

    print(f"{'kernel':<20}{'n':>6}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for n in args.sizes:
        inputs = kernel_inputs(n, args.dim, rng)
        for name in names:
            a, b = fast[name](*inputs[name]), slow[name](*inputs[name])
            if not np.allclose(a, b, rtol=1e-12, atol=1e-12):
                raise SystemExit(f"{name}: backends disagree at n={n}")
            t_fast = best_of(fast[name], inputs[name], args.repeat)
            t_slow = best_of(slow[name], inputs[name], args.repeat)
            print(f"{name:<20}{n:>6}{t_fast:>12.3f}{t_slow:>12.3f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
