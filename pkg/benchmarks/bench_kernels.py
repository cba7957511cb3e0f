"""Time the compiled training kernels against the pure-Python fallback.

Both backends produce bit-identical arrays, so the comparison is purely
about throughput.  Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --nodes 2000 --walks 4000 --dim 64
"""

import argparse
import sys
import time

import numpy as np

from taxograft._kernels import _fast, _pure


def sgns_workload(nodes, n_walks, walk_len, dim, seed):
    rng = np.random.default_rng(seed)
    walks = rng.integers(0, nodes, size=n_walks * walk_len,
                         dtype=np.int32)
    offsets = np.arange(0, n_walks * walk_len + 1, walk_len,
                        dtype=np.int32)
    syn0 = (rng.random((nodes, dim)) - 0.5) / dim
    syn1 = np.zeros((nodes, dim))
    counts = np.bincount(walks, minlength=nodes).astype(np.float64) + 1.0
    cum = np.cumsum(counts ** 0.75)
    return dict(walks=walks, offsets=offsets, syn0=syn0, syn1=syn1,
                cum_table=cum, window=3, negatives=5, epochs=1,
                lr0=0.025, lr_min=1e-4, seed=1)


def poincare_workload(nodes, dim, seed):
    rng = np.random.default_rng(seed)
    children = np.arange(1, nodes, dtype=np.int32)
    parents = ((children - 1) // 2).astype(np.int32)
    emb = rng.uniform(-0.001, 0.001, size=(nodes, dim))
    return dict(edges_child=children, edges_parent=parents, emb=emb,
                epochs=5, negatives=5, lr=0.1, burn_in=1,
                burn_in_factor=0.1, eps=1e-5, seed=1)


def run_backend(impl, kernel, work):
    work = {k: (v.copy() if isinstance(v, np.ndarray) else v)
            for k, v in work.items()}
    start = time.perf_counter()
    getattr(impl, kernel)(**work)
    elapsed = time.perf_counter() - start
    mutated = work["syn0"] if kernel == "sgns_train" else work["emb"]
    return elapsed, np.asarray(mutated)


def bench(kernel, work):
    pure_t, pure_out = run_backend(_pure, kernel, work)
    line = f"{kernel:15s} pure {pure_t:8.3f}s"
    if _fast is not None:
        fast_t, fast_out = run_backend(_fast, kernel, work)
        match = "bit-identical" if np.array_equal(pure_out, fast_out) \
            else "MISMATCH"
        line += f"   cython {fast_t:8.3f}s   x{pure_t / fast_t:6.1f}   {match}"
        if match == "MISMATCH":
            print(line)
            sys.exit(1)
    else:
        line += "   (compiled backend not built)"
    print(line)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=500)
    ap.add_argument("--walks", type=int, default=1000)
    ap.add_argument("--walk-len", type=int, default=20)
    ap.add_argument("--dim", type=int, default=32)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    print(f"nodes={args.nodes} walks={args.walks} walk_len={args.walk_len} "
          f"dim={args.dim}")
    bench("sgns_train", sgns_workload(args.nodes, args.walks, args.walk_len,
                                      args.dim, args.seed))
    bench("poincare_train", poincare_workload(args.nodes, args.dim,
                                              args.seed))


if __name__ == "__main__":
    main()
