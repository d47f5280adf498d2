"""Dense linear algebra over a prime field F_p on int64 numpy arrays."""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from ._kernels import rref_inplace

__all__ = [
    "as_mat",
    "rref",
    "rank",
    "row_basis",
    "nullspace",
    "solve",
    "in_span",
    "reduce_mod",
    "intersect",
    "complement",
    "inverse",
    "matmul",
    "coords_in",
    "random_matrix",
    "random_full_rank",
]


def as_mat(A, p: int, ncols: Optional[int] = None) -> np.ndarray:
    """Copy A into a contiguous int64 matrix reduced mod p."""
    M = np.array(A, dtype=np.int64, copy=True)
    if M.ndim == 1:
        M = M.reshape(1, -1) if M.size else np.zeros((0, ncols or 0), dtype=np.int64)
    if ncols is not None and M.shape[0] == 0:
        M = M.reshape(0, ncols)
    return np.ascontiguousarray(M % p)


def matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    return (A @ B) % p


def rref(A, p: int) -> Tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form with zero rows dropped, and pivot columns."""
    M = as_mat(A, p)
    piv = rref_inplace(M, p)
    return M[: piv.size].copy(), piv


def rank(A, p: int) -> int:
    M = as_mat(A, p)
    if M.size == 0:
        return 0
    return int(rref_inplace(M, p).size)


def row_basis(V, p: int, ncols: Optional[int] = None) -> np.ndarray:
    """Canonical (RREF) basis of the row space of V."""
    M = as_mat(V, p, ncols)
    if M.shape[0] == 0:
        return M.reshape(0, M.shape[1] if ncols is None else ncols)
    return rref(M, p)[0]


def nullspace(A, p: int, ncols: Optional[int] = None) -> np.ndarray:
    """RREF basis (as rows) of {x : A x = 0}."""
    M = as_mat(A, p, ncols)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(M, p)
    free = [c for c in range(n) if c not in set(piv.tolist())]
    N = np.zeros((len(free), n), dtype=np.int64)
    for i, c in enumerate(free):
        N[i, c] = 1
        for r, pc in enumerate(piv):
            N[i, pc] = (-R[r, c]) % p
    return row_basis(N, p, n)


def solve(A, b, p: int) -> Optional[np.ndarray]:
    """Canonical solution of A x = b (free variables zero), or None."""
    M = as_mat(A, p)
    m, n = M.shape
    b = np.asarray(b, dtype=np.int64).reshape(m) % p
    aug = np.concatenate([M, b.reshape(m, 1)], axis=1)
    R, piv = rref(aug, p)
    if piv.size and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for r, c in enumerate(piv):
        x[c] = R[r, n]
    return x


def reduce_mod(v, R: np.ndarray, piv: np.ndarray, p: int) -> np.ndarray:
    """Reduce v against an RREF basis (R, piv): the canonical coset representative."""
    v = np.asarray(v, dtype=np.int64) % p
    if v.ndim == 1:
        v = v.copy()
        for r, c in enumerate(piv):
            if v[c]:
                v = (v - v[c] * R[r]) % p
        return v
    v = v.copy()
    for r, c in enumerate(piv):
        col = v[:, c].copy()
        nz = col != 0
        if nz.any():
            v[nz] = (v[nz] - np.outer(col[nz], R[r])) % p
    return v


def in_span(v, B, p: int) -> bool:
    R, piv = rref(B, p) if np.asarray(B).shape[0] else (np.zeros((0, len(v)), dtype=np.int64), np.zeros(0, dtype=np.int64))
    return not reduce_mod(v, R, piv, p).any()


def coords_in(v, R: np.ndarray, piv: np.ndarray, p: int) -> Optional[np.ndarray]:
    """Coordinates of v in an RREF basis (R, piv), or None if v is outside the span."""
    v = np.asarray(v, dtype=np.int64) % p
    c = v[piv].copy() if piv.size else np.zeros(0, dtype=np.int64)
    if ((v - c @ R) % p).any() if R.shape[0] else v.any():
        return None
    return c


def intersect(U, V, p: int, n: Optional[int] = None) -> np.ndarray:
    """RREF basis of span(U) ∩ span(V) (row spaces)."""
    U = as_mat(U, p, n)
    V = as_mat(V, p, n)
    n = U.shape[1] if U.shape[0] else V.shape[1]
    if U.shape[0] == 0 or V.shape[0] == 0:
        return np.zeros((0, n), dtype=np.int64)
    # x U = y V  <=>  [U; -V]^T [x; y] = 0
    K = nullspace(np.concatenate([U, (-V) % p], axis=0).T, p)
    if K.shape[0] == 0:
        return np.zeros((0, n), dtype=np.int64)
    W = matmul(K[:, : U.shape[0]], U, p)
    return row_basis(W, p, n)


def complement(U, p: int, n: int, within=None) -> np.ndarray:
    """Rows extending span(U) to span(within) (default the full space), chosen greedily."""
    U = as_mat(U, p, n)
    W = np.eye(n, dtype=np.int64) if within is None else as_mat(within, p, n)
    cur = U.copy()
    r = rank(cur, p) if cur.shape[0] else 0
    out = []
    for w in W:
        test = np.concatenate([cur, w.reshape(1, n)], axis=0)
        rr = rank(test, p)
        if rr > r:
            cur, r = test, rr
            out.append(w)
    return np.array(out, dtype=np.int64).reshape(len(out), n)


def inverse(A, p: int) -> np.ndarray:
    M = as_mat(A, p)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("matrix not square")
    aug = np.concatenate([M, np.eye(n, dtype=np.int64)], axis=1)
    R, piv = rref(aug, p)
    if piv.size < n or piv[n - 1] != n - 1:
        raise ValueError("matrix not invertible")
    return R[:, n:].copy()


def random_matrix(rng: np.random.Generator, m: int, n: int, p: int) -> np.ndarray:
    return rng.integers(0, p, size=(m, n), dtype=np.int64)


def random_full_rank(rng: np.random.Generator, m: int, n: int, p: int) -> np.ndarray:
    """Uniform m x n matrix of rank min(m, n), by rejection."""
    while True:
        M = random_matrix(rng, m, n, p)
        if rank(M, p) == min(m, n):
            return M
