"""Time the compiled greedy kernel against the pure-Python one.

    python benchmarks/bench_kernels.py [--repeat 3] [--sizes 100 300 1000]

For each tree size a handful of generated instances is solved by both
backends with k = n (a full greedy ordering, the worst case) and with
k = 0.3 n. Outputs are checked to be identical before timings are reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from epdkit import _pykernels, kernels
from epdkit.epd import TIE_RTOL
from epdkit.generate import GenParams, gen_instance


def kernel_args(inst):
    t = inst.tree
    p = np.asarray(inst.probs1)[t.species_at]
    return (t.parent, t.length, t.leaf_node, t.leaf_lo, t.leaf_hi, t.species_at, p)


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 200, 1000])
    ap.add_argument("--instances", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    compiled = kernels.compiled
    if compiled is None:
        print("compiled kernel not built; run `pip install --no-build-isolation -e .` first")
        return 1

    print(f"{'internal':>8} {'species':>8} {'k':>6} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for n_int in args.sizes:
        params = GenParams(internal_node_range=(n_int, n_int))
        for i in range(args.instances):
            inst = gen_instance(args.seed, i, params)
            a = kernel_args(inst)
            n = inst.tree.n_species
            for k in (n, int(0.3 * n)):
                py = _pykernels.greedy(*a, k, TIE_RTOL)
                cy = compiled.greedy(*a, k, TIE_RTOL)
                assert all(np.array_equal(x, y) for x, y in zip(py, cy)), "backends disagree"
                tp = best_time(lambda: _pykernels.greedy(*a, k, TIE_RTOL), args.repeat)
                tc = best_time(lambda: compiled.greedy(*a, k, TIE_RTOL), args.repeat)
                print(f"{n_int:>8} {n:>8} {k:>6} {1e3 * tp:>10.2f} {1e3 * tc:>10.3f} {tp / tc:>7.0f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
