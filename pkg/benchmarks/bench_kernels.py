"""Benchmark the numba kernels against the pure-NumPy fallback.

Times the hot linear-chain operations on a realistic workload (one
1024-token chunk, 7 tags, ~16 active features per token against a 20k
feature dictionary) and prints per-call latencies plus the speedup.

Run:  python3 benchmarks/bench_kernels.py [--repeats 50]
"""

import argparse
import time

import numpy as np

from argmine.kernels import numba_backend, numpy_backend

N_TOKENS = 1024
N_TAGS = 7
N_FEATURES = 20_000
FEATS_PER_TOKEN = 16


def make_instance(seed=0):
    rng = np.random.default_rng(seed)
    indptr = np.arange(N_TOKENS + 1, dtype=np.int64) * FEATS_PER_TOKEN
    indices = rng.integers(0, N_FEATURES, N_TOKENS * FEATS_PER_TOKEN).astype(np.int64)
    weights = rng.normal(scale=0.1, size=(N_FEATURES, N_TAGS))
    trans = rng.normal(scale=0.1, size=(N_TAGS, N_TAGS))
    start = rng.normal(scale=0.1, size=N_TAGS)
    stop = rng.normal(scale=0.1, size=N_TAGS)
    gold = rng.integers(0, N_TAGS, N_TOKENS).astype(np.int64)
    cw = rng.uniform(0.5, 2.0, N_TAGS)
    return indptr, indices, weights, trans, start, stop, gold, cw


def bench(fn, repeats):
    fn()  # warmup (and JIT compile for the numba path)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    indptr, indices, W, T, s, e, gold, cw = make_instance()
    masks = np.ones(N_TAGS, dtype=np.bool_), np.ones((N_TAGS, N_TAGS), dtype=np.bool_)

    def emissions(backend):
        return lambda: backend.emissions(indptr, indices, W)

    def viterbi(backend):
        E = backend.emissions(indptr, indices, W)
        return lambda: backend.viterbi_path(E, T, s, e, *masks)

    def forward(backend):
        E = backend.emissions(indptr, indices, W)
        return lambda: backend.forward_logz(E, T, s, e)

    def crf_grad(backend):
        grads = [np.zeros_like(W), np.zeros_like(T), np.zeros_like(s), np.zeros_like(e)]

        def run():
            for g in grads:
                g.fill(0.0)
            return backend.crf_chunk_grad(indptr, indices, W, T, s, e, gold, cw, *grads)

        return run

    def perceptron(backend):
        state = [W.copy(), T.copy(), s.copy(), e.copy()]
        acc = [np.zeros_like(a) for a in state]

        def run():
            return backend.perceptron_step(indptr, indices, *state, *acc, gold, cw, 1, 0.1)

        return run

    cases = [
        ("emissions", emissions),
        ("viterbi", viterbi),
        ("forward_logz", forward),
        ("crf_chunk_grad", crf_grad),
        ("perceptron_step", perceptron),
    ]

    print(f"workload: {N_TOKENS} tokens x {N_TAGS} tags, "
          f"{FEATS_PER_TOKEN} features/token, {N_FEATURES} feature dict, "
          f"{args.repeats} repeats")
    print(f"{'kernel':<16} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, factory in cases:
        t_np = bench(factory(numpy_backend), args.repeats)
        t_nb = bench(factory(numba_backend), args.repeats)
        print(f"{name:<16} {t_np * 1e3:>10.3f}ms {t_nb * 1e3:>10.3f}ms "
              f"{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
