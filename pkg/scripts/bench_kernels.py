#!/usr/bin/env python3
"""Benchmark the compiled sampling/encoding kernels against the numpy
fallback.

Usage:
    python3 scripts/bench_kernels.py [--m 500000] [--n 16]

Both backends consume the same pre-drawn uniforms, so the outputs are
checked bit-identical while timing.
"""

import argparse
import time

import numpy as np

from bnit import _kernels
from bnit.dist import _net_arrays, BayesNet
from bnit.rng import RngState


def random_net(n, d, seed):
    g = RngState(seed).generator()
    parents = tuple(
        tuple(np.sort(g.choice(i, size=min(i, d), replace=False)).tolist())
        if i > 0 else ()
        for i in range(n))
    cpt = tuple(g.uniform(0.05, 0.95, 2 ** len(ps)) for ps in parents)
    return BayesNet(n=n, order=tuple(range(n)), parents=parents, cpt=cpt)


def bench(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--m", type=int, default=500_000)
    parser.add_argument("--n", type=int, default=16)
    parser.add_argument("--d", type=int, default=3)
    args = parser.parse_args()

    if not _kernels.HAVE_COMPILED:
        raise SystemExit("compiled backend not available in this build; "
                         "nothing to compare")

    net = random_net(args.n, args.d, seed=1)
    arrays = _net_arrays(net)
    u = RngState(2).generator().random((args.m, args.n))
    out_c = np.empty((args.m, args.n), dtype=np.uint8)
    out_f = np.empty((args.m, args.n), dtype=np.uint8)

    from bnit._core import ancestral_sample as compiled_sample

    t_c = bench(compiled_sample, *arrays, u, out_c)
    t_f = bench(_kernels._ancestral_sample_fallback, *arrays, u, out_f)
    assert np.array_equal(out_c, out_f), "backends disagree"
    print(f"ancestral_sample  m={args.m} n={args.n}: "
          f"compiled {t_c * 1e3:.1f} ms, fallback {t_f * 1e3:.1f} ms, "
          f"speedup {t_f / t_c:.1f}x")

    cols = np.arange(min(args.n, 8), dtype=np.int64)
    from bnit._core import encode_columns as compiled_encode

    out_codes_c = np.empty(args.m, dtype=np.int64)
    out_codes_f = np.empty(args.m, dtype=np.int64)
    t_c = bench(compiled_encode, out_c, cols, out_codes_c)
    t_f = bench(_kernels._encode_columns_fallback, out_c, cols, out_codes_f)
    assert np.array_equal(out_codes_c, out_codes_f), "backends disagree"
    print(f"encode_columns    m={args.m} k={len(cols)}: "
          f"compiled {t_c * 1e3:.1f} ms, fallback {t_f * 1e3:.1f} ms, "
          f"speedup {t_f / t_c:.1f}x")


if __name__ == "__main__":
    main()
