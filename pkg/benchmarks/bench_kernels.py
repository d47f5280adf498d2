"""Time the numba kernels against their numpy fallbacks on representative inputs.

Run with ``python3 benchmarks/bench_kernels.py``. With SHEAFLTC_DISABLE_NUMBA=1 both
columns use numpy.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sheafltc import _kernels as K


def _timeit(fn, repeat):
    fn()  # warm-up (includes JIT compilation)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def _cases(rng):
    p = 2
    A = rng.integers(0, p, size=(120, 200)).astype(np.int64)
    n = 40
    groups = np.repeat(np.arange(n // 2), 2).astype(np.int64)
    weights = rng.integers(1, 4, size=n // 2).astype(np.int64)
    basis = rng.integers(0, p, size=(14, n)).astype(np.int64)
    off = rng.integers(0, p, size=n).astype(np.int64)
    outer = rng.integers(0, p, size=(7, n)).astype(np.int64)
    inner = rng.integers(0, p, size=(7, n)).astype(np.int64)
    D = rng.integers(0, p, size=(30, n)).astype(np.int64)
    dg = np.arange(30, dtype=np.int64)
    dw = np.ones(30, dtype=np.int64)
    nv = 16
    pairs = [(i, j) for i in range(nv) for j in range(i + 1, nv) if rng.random() < 0.4]
    eu = np.array([a for a, _ in pairs], dtype=np.int64)
    ev = np.array([b for _, b in pairs], dtype=np.int64)
    ew = np.ones(len(pairs), dtype=np.int64)
    vw = rng.integers(1, 5, size=nv).astype(np.int64)
    D0, D1 = int(vw.sum()), len(pairs)
    return {
        "rref 120x200": (lambda: K.rref_inplace(A.copy(), p), lambda: K._rref_numpy(A.copy(), p)),
        "span_min_norm 2^14": (lambda: K.span_min_norm(off, basis, p, groups, weights),
                               lambda: K._span_min_norm_numpy(off, basis, p, groups, weights)),
        "coset_scan 2^7 x 2^7": (lambda: K.coset_scan(outer, inner, D, p, groups, weights, dg, dw),
                                 lambda: K._coset_scan_numpy(outer, inner, D, p, groups, weights, dg, dw)),
        "subset_scan 2^16": (lambda: K.subset_skeleton_scan(vw, eu, ev, ew, D0, D1),
                             lambda: K._subset_scan_numpy(vw, eu, ev, ew, D0, D1)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"backend: {K.backend_name()}")
    print(f"{'kernel':<24}{'default (s)':>14}{'numpy (s)':>14}{'speedup':>10}")
    for name, (fast, slow) in _cases(rng).items():
        a, b = _timeit(fast, args.repeat), _timeit(slow, args.repeat)
        print(f"{name:<24}{a:>14.5f}{b:>14.5f}{b / a:>10.1f}")


if __name__ == "__main__":
    main()
