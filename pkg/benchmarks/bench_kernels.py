#!/usr/bin/env python3
"""Benchmark the window-salience kernels: numba vs pure numpy.

Scores a batch of random documents the way ``rank`` does for one query
(one concatenated profile, per-document best window) and reports the median
wall time per backend, with a bit-for-bit agreement check.

    python benchmarks/bench_kernels.py --docs 1000 --doc-len 500 --terms 3
"""

import argparse
import time

import numpy as np

from cssm import _kernels
from cssm.salience import default_top_k


def make_batch(rng, n_docs, mean_len, n_terms):
    lengths = rng.poisson(mean_len, size=n_docs)
    offsets = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    # mostly weak similarities with a few strong matches, like real profiles
    flat = rng.normal(0.1, 0.15, size=(n_terms, offsets[-1]))
    hits = rng.random(flat.shape) < 0.01
    flat[hits] = rng.uniform(0.6, 1.0, size=hits.sum())
    np.clip(flat, -1, 1, out=flat)
    weights = rng.dirichlet(np.ones(n_terms))
    return np.ascontiguousarray(flat), offsets, weights


def time_backend(fn, args, repeat):
    fn(*args)  # warm-up / JIT compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return float(np.median(times)), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--docs", type=int, default=1000)
    ap.add_argument("--doc-len", type=int, default=500)
    ap.add_argument("--terms", type=int, default=3)
    ap.add_argument("--widths", type=int, nargs="+", default=[10, 30, 80])
    ap.add_argument("--alpha", type=float, default=0.1)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    flat, offsets, weights = make_batch(rng, args.docs, args.doc_len, args.terms)
    print(f"{args.docs} docs, {offsets[-1]} tokens, {args.terms} query terms")
    print(f"{'width':>6} {'K':>3} " + " ".join(f"{name:>12}" for name in _kernels.IMPLEMENTATIONS) + "  speedup")
    for width in args.widths:
        k = default_top_k(width)
        call = (flat, offsets, weights, width, k, args.alpha)
        results = {name: time_backend(best, call, args.repeat)
                   for name, (_, best) in _kernels.IMPLEMENTATIONS.items()}
        ref = next(iter(results.values()))[1]
        for _, (best, start) in results.values():
            assert np.array_equal(best, ref[0]) and np.array_equal(start, ref[1]), "backends disagree"
        cols = " ".join(f"{t * 1e3:10.1f}ms" for t, _ in results.values())
        speedup = ""
        if "numba" in results:
            speedup = f"{results['numpy'][0] / results['numba'][0]:7.1f}x"
        print(f"{width:>6} {k:>3} {cols}  {speedup}")


if __name__ == "__main__":
    main()
