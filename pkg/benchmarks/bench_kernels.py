"""Time the numba-compiled kernels against their numpy / plain-Python fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 400]

Each row checks that both forms agree before timing them. Without numba
installed (or with STPIPE_DISABLE_NUMBA=1) only the fallback column is filled.
"""

import argparse
import time

import numpy as np

from stpipe import backend, kernels


def best_of(fn, args, repeat):
    fn(*args)  # warm up / trigger compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def lev_case(rng, size):
    a = rng.integers(0, 50, size).astype(np.int64)
    b = rng.integers(0, 50, size).astype(np.int64)
    return (a, b)


def em_case(rng, size):
    # sentence pairs of ~20x20 co-occurrences each, `size` sentences
    n_pairs = 5000
    per_row = 21
    rows = size * 20
    pair_ids = rng.integers(0, n_pairs, rows * per_row).astype(np.int64)
    row_ids = np.repeat(np.arange(rows, dtype=np.int64), per_row)
    t = rng.uniform(0.01, 1.0, n_pairs)
    return (t, pair_ids, row_ids, rows, n_pairs, True)


def logloss_case(rng, size):
    n = size * 50
    feats = 8
    feat_idx = rng.integers(0, 20000, n * feats).astype(np.int64)
    feat_ptr = np.arange(0, n * feats + 1, feats, dtype=np.int64)
    weights = rng.normal(0, 0.1, 20000)
    labels = (rng.random(n) < 0.2).astype(np.float64)
    return (weights, 0.1, feat_idx, feat_ptr, labels)


def segdp_case(rng, size):
    n = size
    gain = rng.normal(0, 1, n)
    return (gain, n, 3, 30, False)


def sgd_case(rng, size):
    weights, bias, feat_idx, feat_ptr, labels = logloss_case(rng, size)
    order = rng.permutation(labels.shape[0]).astype(np.int64)
    return (weights, bias, feat_idx, feat_ptr, labels, order, 0.1)


def same(x, y):
    if isinstance(x, tuple):
        return all(same(a, b) for a, b in zip(x, y))
    return np.allclose(x, y, rtol=1e-9, atol=1e-9)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=400)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    compiled = backend() == "numba"

    # (name, case, compiled form, fallback form, fallback label)
    rows = [
        ("levenshtein table", lev_case, kernels.lev_table_loops, kernels.lev_table_numpy, "numpy"),
        ("EM e-step", em_case, kernels.em_estep_loops, kernels.em_estep_numpy, "numpy"),
        ("log-loss", logloss_case, kernels.logloss_loops, kernels.logloss_numpy, "numpy"),
        ("segmentation DP", segdp_case, kernels.segment_dp, kernels._segment_dp_loops, "python"),
        ("SGD epoch", sgd_case, kernels.sgd_epoch, kernels._sgd_epoch, "python"),
    ]
    print(f"backend: {backend()}   size: {args.size}   best of {args.repeat}")
    print(f"{'kernel':<20}{'numba ms':>12}{'fallback ms':>14}  {'fallback':<8}{'speedup':>9}")
    for name, make, fast, slow, label in rows:
        case = make(rng, args.size)
        # SGD mutates its weights, so each form gets its own copy
        copy = lambda c: tuple(x.copy() if isinstance(x, np.ndarray) else x for x in c)  # noqa: E731
        t_slow = best_of(slow, copy(case), args.repeat)
        if compiled:
            assert same(fast(*copy(case)), slow(*copy(case))), name
            t_fast = best_of(fast, copy(case), args.repeat)
            print(f"{name:<20}{t_fast * 1e3:>12.3f}{t_slow * 1e3:>14.3f}  {label:<8}{t_slow / t_fast:>8.1f}x")
        else:
            print(f"{name:<20}{'-':>12}{t_slow * 1e3:>14.3f}  {label:<8}{'-':>9}")


if __name__ == "__main__":
    main()
