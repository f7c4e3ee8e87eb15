"""Benchmark the jitted hot kernels against their pure-numpy fallbacks.

Runs every dual-path kernel on desk-scale inputs, reports best-of-N wall
times for both backends, the speedup, and the largest numeric deviation
between the two results.

    python benchmarks/bench_kernels.py [--n 1500] [--d 64] [--repeats 5]
"""

import argparse
import time

import numpy as np

from subsel import accel
from subsel.dataset import FeatureMatrix
from subsel.kernels import cosine_similarity, sparsify_knn
from subsel.objectives import FacilityLocation
from subsel.optimize import BudgetSpec, greedy_lazy


def best_of(fn, repeats):
    times = []
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def row(name, t_np, t_nb, diff):
    speedup = t_np / t_nb if t_nb > 0 else float("inf")
    print(f"{name:<28} numpy {t_np * 1e3:9.2f} ms   numba {t_nb * 1e3:9.2f} ms "
          f"  x{speedup:6.1f}   max|diff| {diff:.2e}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1500)
    parser.add_argument("--d", type=int, default=64)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if not accel.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(0)
    x = rng.standard_normal((args.n, args.d))
    inv_norms = 1.0 / np.sqrt((x ** 2).sum(axis=1))
    print(f"inputs: {args.n} points, {args.d} dims, best of {args.repeats}\n")

    # warm the jit once so compilation is not timed
    small = x[:8]
    accel.pairwise_shifted_cosine_nb(small, inv_norms[:8])
    accel.pairwise_euclidean_nb(small)

    t_np, a = best_of(lambda: accel.pairwise_shifted_cosine_np(x, inv_norms),
                      args.repeats)
    t_nb, b = best_of(lambda: accel.pairwise_shifted_cosine_nb(x, inv_norms),
                      args.repeats)
    row("pairwise shifted cosine", t_np, t_nb, np.abs(a - b).max())
    sim = b

    t_np, a = best_of(lambda: accel.pairwise_euclidean_np(x), args.repeats)
    t_nb, b = best_of(lambda: accel.pairwise_euclidean_nb(x), args.repeats)
    row("pairwise euclidean", t_np, t_nb, np.abs(a - b).max())

    best = rng.uniform(0, 1, args.n)
    selected = np.zeros(args.n, dtype=bool)
    selected[rng.choice(args.n, size=args.n // 10, replace=False)] = True
    accel.facility_gains_dense_nb(sim[:8, :8], best[:8], selected[:8])
    t_np, a = best_of(lambda: accel.facility_gains_dense_np(sim, best, selected),
                      args.repeats)
    t_nb, b = best_of(lambda: accel.facility_gains_dense_nb(sim, best, selected),
                      args.repeats)
    row("facility gains (dense)", t_np, t_nb, np.abs(a - b).max())

    kernel = sparsify_knn(
        cosine_similarity(FeatureMatrix(x[:600].astype(np.float32))), 20)
    col_ptr, rows_, vals, cols = kernel.csc_arrays()
    sbest = best[:600]
    ssel = np.zeros(600, dtype=bool)
    accel.facility_gains_sparse_nb(600, col_ptr, rows_, vals, cols, sbest, ssel)
    t_np, a = best_of(lambda: accel.facility_gains_sparse_np(
        600, col_ptr, rows_, vals, cols, sbest, ssel), args.repeats)
    t_nb, b = best_of(lambda: accel.facility_gains_sparse_nb(
        600, col_ptr, rows_, vals, cols, sbest, ssel), args.repeats)
    row("facility gains (sparse)", t_np, t_nb, np.abs(a - b).max())

    train = x[:1000]
    labels = rng.integers(0, 5, size=1000)
    queries = x[1000:1200]
    accel.knn_labels_nb(train[:8], labels[:8], queries[:2], 3, 5)
    t_np, a = best_of(lambda: accel.knn_labels_np(train, labels, queries, 5, 5),
                      args.repeats)
    t_nb, b = best_of(lambda: accel.knn_labels_nb(train, labels, queries, 5, 5),
                      args.repeats)
    row("knn labels (k=5)", t_np, t_nb, float(np.abs(a - b).max()))

    # end to end: lazy greedy facility location on both backends
    m = FeatureMatrix(x[:800].astype(np.float32))
    budget = BudgetSpec(80)

    def run_greedy(cosine_fn, gain_fn, gains_fn):
        saved = (accel.pairwise_shifted_cosine, accel.facility_gain_single,
                 accel.facility_gains_dense)
        accel.pairwise_shifted_cosine = cosine_fn
        accel.facility_gain_single = gain_fn
        accel.facility_gains_dense = gains_fn
        try:
            kern = cosine_similarity(m)
            return greedy_lazy(FacilityLocation(kern), budget)
        finally:
            (accel.pairwise_shifted_cosine, accel.facility_gain_single,
             accel.facility_gains_dense) = saved

    t_np, a = best_of(lambda: run_greedy(accel.pairwise_shifted_cosine_np,
                                         accel.facility_gain_single_np,
                                         accel.facility_gains_dense_np),
                      args.repeats)
    t_nb, b = best_of(lambda: run_greedy(accel.pairwise_shifted_cosine_nb,
                                         accel.facility_gain_single_nb,
                                         accel.facility_gains_dense_nb),
                      args.repeats)
    same = a.indices == b.indices
    row("lazy greedy (end to end)", t_np, t_nb,
        abs(a.final_value - b.final_value))
    print(f"\nend-to-end selections identical across backends: {same}")


if __name__ == "__main__":
    main()
