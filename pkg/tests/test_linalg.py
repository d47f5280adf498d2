from __future__ import annotations

import itertools

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_span
from sheafltc import linalg as la

primes = st.sampled_from([2, 3, 5])


@st.composite
def matrices(draw, max_rows=4, max_cols=5):
    p = draw(primes)
    m = draw(st.integers(0, max_rows))
    n = draw(st.integers(1, max_cols))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=m * n, max_size=m * n))
    return np.array(vals, dtype=np.int64).reshape(m, n), p


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_rank_matches_span_size(Ap):
    A, p = Ap
    span = brute_span(A, p, A.shape[1])
    assert len(span) == p ** la.rank(A, p)


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_nullspace_is_kernel_of_full_dimension(Ap):
    A, p = Ap
    N = la.nullspace(A, p, A.shape[1])
    assert not la.matmul(A, N.T, p).any()
    assert N.shape[0] + la.rank(A, p) == A.shape[1]
    kernel = {v for v in itertools.product(range(p), repeat=A.shape[1]) if not ((A @ np.array(v)) % p).any()}
    assert len(kernel) == p ** N.shape[0]


@given(matrices(), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_solve_finds_solutions_when_they_exist(Ap, seed):
    A, p = Ap
    rng = np.random.default_rng(seed)
    x = rng.integers(0, p, size=A.shape[1])
    b = (A @ x) % p
    y = la.solve(A, b, p)
    assert y is not None and np.array_equal((A @ y) % p, b)


@given(matrices(), matrices())
@settings(max_examples=60, deadline=None)
def test_intersection_matches_bruteforce(Ap, Bp):
    A, p = Ap
    B, _ = Bp
    n = A.shape[1]
    B = np.asarray(B[:, :n] % p if B.shape[1] >= n else np.zeros((0, n), dtype=np.int64))
    I = la.intersect(A, B, p, n)
    want = brute_span(A, p, n) & brute_span(B, p, n)
    assert brute_span(I, p, n) == want


def test_inverse_and_random_full_rank():
    rng = np.random.default_rng(0)
    for p in (2, 3, 7):
        for n in range(1, 6):
            M = la.random_full_rank(rng, n, n, p)
            assert np.array_equal(la.matmul(M, la.inverse(M, p), p), np.eye(n, dtype=np.int64))


def test_complement_spans_whole_space():
    rng = np.random.default_rng(1)
    for p in (2, 3):
        U = la.random_matrix(rng, 2, 5, p)
        C = la.complement(U, p, 5)
        assert la.rank(np.concatenate([U, C]), p) == 5
        assert C.shape[0] == 5 - la.rank(U, p)


def test_in_span_and_reduce():
    B = np.array([[1, 1, 0], [0, 1, 1]])
    assert la.in_span(np.array([1, 0, 1]), B, 2)
    assert not la.in_span(np.array([1, 0, 0]), B, 2)
