"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--rows 4000] [--features 300] [--repeats 5]

The workload mimics the combined feature matrix: one continuous SSIM column
followed by sparse binary character-presence columns.  Each kernel is run on
both backends, results are checked for agreement, and the best wall time of
``--repeats`` runs is reported.
"""
import argparse
import time

import numpy as np

from homograph import _kernels
from homograph.learners import tree as tree_mod


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def make_data(rows, features, seed):
    rng = np.random.default_rng(seed)
    y = (rng.random(rows) < 1 / 3).astype(np.int64)
    X = np.zeros((rows, features))
    X[:, 0] = np.clip(rng.normal(0.6 + 0.3 * y, 0.15), 0, 1)
    X[:, 1:] = rng.random((rows, features - 1)) < 0.04
    return X, y


def run(rows, features, repeats, seed):
    if _kernels.numba_impl is None:
        raise SystemExit("numba is not installed; nothing to compare")
    X, y = make_data(rows, features, seed)
    data = tree_mod.RankedMatrix.encode(X)
    rows_idx = np.arange(rows, dtype=np.int64)
    s0, s1 = (y == 0).astype(float), (y == 1).astype(float)
    order = np.arange(features, dtype=np.int64)
    args = (data.ranks, data.uniq, data.offsets, rows_idx, s0, s1, s0.sum(), s1.sum(),
            order, features, _kernels.GINI, np.zeros(0), 1e-9)
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 256, 64 * 64).astype(np.float64)
    b = rng.integers(0, 256, 64 * 64).astype(np.float64)
    r1, r2 = (0.01 * 255) ** 2, (0.03 * 255) ** 2

    # warm up the JIT so compile time is not measured
    _kernels.numba_impl.best_split(*args)
    _kernels.numba_impl.global_ssim(a, b, r1, r2)

    rows_out = []
    for name, call in (
        ("best_split (root node)", lambda impl: impl.best_split(*args)),
        ("global_ssim 64x64", lambda impl: impl.global_ssim(a, b, r1, r2)),
    ):
        t_np, out_np = best_of(lambda: call(_kernels.numpy_impl), repeats)
        t_nb, out_nb = best_of(lambda: call(_kernels.numba_impl), repeats)
        same = np.allclose(np.asarray(out_np, float), np.asarray(out_nb, float),
                           rtol=0, atol=1e-12)
        rows_out.append((name, t_np, t_nb, same))

    def fit_tree():
        return tree_mod.fit_classification_tree(X, y, data=data)

    saved = _kernels.active
    try:
        _kernels.active = _kernels.numba_impl
        fit_tree()
        t_nb, tree_nb = best_of(fit_tree, repeats)
        _kernels.active = _kernels.numpy_impl
        t_np, tree_np = best_of(fit_tree, repeats)
    finally:
        _kernels.active = saved
    same = (np.array_equal(tree_np.feature, tree_nb.feature)
            and np.array_equal(tree_np.threshold, tree_nb.threshold))
    rows_out.append((f"full CART tree ({tree_nb.n_nodes} nodes)", t_np, t_nb, same))

    print(f"rows={rows} features={features} repeats={repeats}")
    print(f"{'kernel':<32} {'numpy s':>10} {'numba s':>10} {'speedup':>8}  agree")
    for name, t_np, t_nb, same in rows_out:
        print(f"{name:<32} {t_np:>10.5f} {t_nb:>10.5f} {t_np / t_nb:>7.1f}x  {same}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=4000)
    parser.add_argument("--features", type=int, default=300)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    run(args.rows, args.features, args.repeats, args.seed)


if __name__ == "__main__":
    main()
