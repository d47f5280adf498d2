from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sheafltc import _kernels as K


def _groups(n, rng):
    g = np.sort(rng.integers(0, max(1, n // 2), size=n)).astype(np.int64)
    _, g = np.unique(g, return_inverse=True)
    w = rng.integers(1, 5, size=int(g.max()) + 1 if n else 0).astype(np.int64)
    return g.astype(np.int64), w


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([2, 3, 5]))
def test_rref_backends_agree(seed, p):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, p, size=(int(rng.integers(1, 7)), int(rng.integers(1, 9)))).astype(np.int64)
    B, C = A.copy(), A.copy()
    piv_a = K.rref_inplace(B, p)
    piv_b = K._rref_numpy(C, p)
    assert np.array_equal(B, C) and np.array_equal(piv_a, piv_b)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([2, 3]))
def test_span_min_norm_backends_agree(seed, p):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    b = int(rng.integers(0, 5))
    basis = rng.integers(0, p, size=(b, n)).astype(np.int64)
    off = rng.integers(0, p, size=n).astype(np.int64)
    g, w = _groups(n, rng)
    ref = K._span_min_norm_numpy(off, basis, p, g, w)
    assert K.span_min_norm(off, basis, p, g, w) == ref
    assert tuple(map(int, K._span_min_norm_numba_impl(off, basis, p, g, w))) == ref


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_coset_scan_backends_agree(seed):
    rng = np.random.default_rng(seed)
    p = 2
    n = int(rng.integers(1, 8))
    outer = rng.integers(0, p, size=(int(rng.integers(0, 4)), n)).astype(np.int64)
    inner = rng.integers(0, p, size=(int(rng.integers(0, 4)), n)).astype(np.int64)
    D = rng.integers(0, p, size=(int(rng.integers(0, 5)), n)).astype(np.int64)
    g, w = _groups(n, rng)
    dg, dw = _groups(D.shape[0], rng)
    ref = K._coset_scan_numpy(outer, inner, D, p, g, w, dg, dw)
    for got in (K.coset_scan(outer, inner, D, p, g, w, dg, dw),
                K._coset_scan_numba_impl(outer, inner, D, p, g, w, dg, dw)):
        assert all(np.array_equal(np.asarray(x), np.asarray(y)) for x, y in zip(got, ref))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_subset_scan_backends_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5]
    eu = np.array([a for a, _ in pairs], dtype=np.int64)
    ev = np.array([b for _, b in pairs], dtype=np.int64)
    ew = rng.integers(1, 4, size=len(pairs)).astype(np.int64)
    vw = rng.integers(1, 6, size=n).astype(np.int64)
    D0, D1 = int(vw.sum()), max(1, int(ew.sum()))
    n1, d1, _ = K._subset_scan_numpy(vw, eu, ev, ew, D0, D1)
    for n2, d2, _ in (K.subset_skeleton_scan(vw, eu, ev, ew, D0, D1),
                      K._subset_scan_numba_impl(vw, eu, ev, ew, D0, D1)):
        assert int(n1) * int(d2) == int(n2) * int(d1)


def test_gray_coefficients_cover_everything():
    for b, p in [(0, 2), (3, 2), (2, 3)]:
        C = K.gray_coefficients(b, p)
        assert C.shape == (p ** b, b)
        assert len({tuple(r) for r in C.tolist()}) == p ** b
        assert all(np.count_nonzero(C[i] != C[i + 1]) == 1 for i in range(len(C) - 1))


def test_backend_name():
    assert K.backend_name() in ("numba", "numpy")
    assert (K.backend_name() == "numba") == K.USE_NUMBA


def test_numpy_fallback_in_subprocess():
    import os
    import subprocess
    import sys

    env = {**os.environ, "SHEAFLTC_DISABLE_NUMBA": "1"}
    out = subprocess.run([sys.executable, "-c", "from sheafltc import _kernels as K; print(K.backend_name())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
