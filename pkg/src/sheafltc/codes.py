"""Cocycle codes, their face-sum testers, the local decoder and cocycle CSS codes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional

import numpy as np

from . import _kernels
from . import linalg as la
from .config import enumeration_budget
from .expansion import INF, Norm, _get_link, enumerate_span
from .homology import (cocycle_basis, coboundary_basis, coboundary_matrix, cohomology, link_extend,
                       link_restrict_cochain)
from .sheaf import Sheaf

__all__ = [
    "CodeError",
    "CocycleCode",
    "TesterStats",
    "DecodeResult",
    "CSSCode",
    "build_code",
    "rejection_probability",
    "tester_stats",
    "code_distance",
    "decode",
    "decode_radius",
    "build_css",
    "css_x_decode",
    "perp",
]


class CodeError(ValueError):
    pass


@dataclass
class CocycleCode:
    """The k-cocycle code Z^k ⊆ C^k of (X, F) over the alphabet F_p^m."""

    F: Sheaf
    k: int
    m: int
    Z: np.ndarray = field(repr=False)
    coboundaries_vanish: bool = True

    @property
    def n(self) -> int:
        return self.F.X.n_faces(self.k)

    @property
    def dim(self) -> int:
        return self.Z.shape[0]

    @property
    def rate(self) -> Fraction:
        return Fraction(self.dim, self.F.cochain_dim(self.k))

    def contains(self, f: np.ndarray) -> bool:
        return not la.matmul(coboundary_matrix(self.F, self.k), np.asarray(f).reshape(-1, 1), self.F.p).any()


def build_code(F: Sheaf, k: int) -> CocycleCode:
    X = F.X
    if k < 0 or k > X.d or X.n_faces(k) == 0:
        raise CodeError(f"no {k}-faces")
    dims = {F.dim(x) for x in X.faces[k]}
    if len(dims) != 1:
        raise CodeError(f"fiber dimension is not constant on X({k}): {sorted(dims)}")
    m = dims.pop()
    if m == 0:
        raise CodeError("zero sheaf on X(k): length-0 code")
    return CocycleCode(F, k, m, cocycle_basis(F, k), coboundary_basis(F, k).shape[0] == 0)


def rejection_probability(code: CocycleCode, f: np.ndarray) -> Fraction:
    """Probability that the tester (uniform y ∈ X(k+1), check (d f)(y) = 0) rejects f."""
    F, k = code.F, code.k
    N = F.X.n_faces(k + 1)
    if N == 0:
        return Fraction(0)
    df = la.matmul(coboundary_matrix(F, k), np.asarray(f).reshape(-1, 1), F.p).ravel()
    return Fraction(Norm(F, k + 1, "ham").int_norm(df), N)


def _all_words(n: int, p: int) -> np.ndarray:
    return enumerate_span(np.eye(n, dtype=np.int64), p, n)


def _face_hamming(words: np.ndarray, groups: np.ndarray, nfaces: int) -> np.ndarray:
    return _kernels._group_norms_numpy(words, groups, np.ones(nfaces, dtype=np.int64))


def code_distance(code: CocycleCode, budget: Optional[int] = None):
    """Relative Hamming distance over Z^k − B^k (or Z^k − 0 when B^k = 0), with a witness."""
    budget = enumeration_budget() if budget is None else budget
    F, k, p = code.F, code.k, code.F.p
    n = F.cochain_dim(k)
    if float(p) ** code.dim > budget:
        raise CodeError("Z^k too large to enumerate")
    words = enumerate_span(code.Z, p, n)
    ham = _face_hamming(words, F.face_groups(k), code.n)
    B = coboundary_basis(F, k)
    if B.shape[0]:
        R, piv = la.rref(B, p)
        keep = np.array([la.reduce_mod(w, R, piv, p).any() for w in words], dtype=bool)
    else:
        keep = words.any(axis=1)
    if not keep.any():
        return INF, None
    idx = np.nonzero(keep)[0]
    j = idx[np.argmin(ham[idx])]
    return Fraction(int(ham[j]), code.n), words[j]


@dataclass
class TesterStats:
    """μ = min over f ∉ Z^k of P_reject(f) / d_Ham(f, Z^k), computed by double enumeration."""

    mu: object
    mode: str
    witness: Optional[np.ndarray] = field(default=None, repr=False)
    table: dict = field(default_factory=dict, repr=False)
    samples: int = 0


def tester_stats(code: CocycleCode, budget: Optional[int] = None, samples: int = 2000, seed: int = 0,
                 table: bool = False) -> TesterStats:
    """Exact soundness ratio of the tester; falls back to a sampled upper bound over budget.

    Distances to the code are computed by scanning every codeword (no coset machinery), so this
    is an independent route to the Hamming-norm cosystolic constant.
    """
    budget = enumeration_budget() if budget is None else budget
    F, k, p = code.F, code.k, code.F.p
    n = F.cochain_dim(k)
    if float(p) ** code.dim > budget:
        raise CodeError("Z^k too large to enumerate")
    codewords = enumerate_span(code.Z, p, n)
    groups = F.face_groups(k)
    D = coboundary_matrix(F, k)
    n_up = F.X.n_faces(k + 1)
    groups_up = F.face_groups(k + 1)
    exact = float(p) ** n * codewords.shape[0] <= budget
    if exact:
        words = _all_words(n, p)
    else:
        rng = np.random.default_rng(seed)
        words = rng.integers(0, p, size=(samples, n))
    best, best_w = None, None
    tab = {}
    chunk = max(1, (1 << 20) // max(1, codewords.shape[0]))
    for s in range(0, words.shape[0], chunk):
        W = words[s:s + chunk]
        dist = np.full(W.shape[0], np.iinfo(np.int64).max, dtype=np.int64)
        for c in codewords:
            dist = np.minimum(dist, _face_hamming((W - c) % p, groups, code.n))
        rej = _face_hamming((W @ D.T) % p, groups_up, n_up) if n_up else np.zeros(W.shape[0], dtype=np.int64)
        for t in np.nonzero(dist > 0)[0]:
            r = Fraction(int(rej[t]) * code.n, n_up * int(dist[t]))
            if table:
                tab[tuple(W[t].tolist())] = (Fraction(int(rej[t]), n_up), Fraction(int(dist[t]), code.n))
            if best is None or r < best:
                best, best_w = r, W[t].copy()
    return TesterStats(best if best is not None else INF, "exact" if exact else "sampled", best_w, tab,
                       0 if exact else samples)


# ---------------------------------------------------------------------------
# decoding


@dataclass
class DecodeResult:
    word: np.ndarray
    clean: bool
    corrections: int
    pops: int


def _local_correction(F: Sheaf, dfp: np.ndarray, k: int, z, budget: int) -> Optional[np.ndarray]:
    """Search h ∈ C^{k-1}(X_z, F_z) with ‖(d f')_z − d h‖ < ‖(d f')_z‖ over vanishing sets E ⊆ X_z(k).

    Sets E are tried by size then lexicographically; for each, the canonical solution of
    (d h)(x) = (d f')(x z) for x ∈ E is tested.  Returns None if no decrease exists.
    """
    p = F.p
    L = _get_link(F, z, k + 1)
    _, g = link_restrict_cochain(F, dfp, k + 1, z, L.Fz)
    target = L.norm.int_norm(g)
    if target == 0:
        return None
    D = L.D
    lo = L.Fz.offsets(k)
    nf = len(lo) - 1
    if 2.0 ** nf > budget:
        raise CodeError("link too large for the vanishing-set search")
    rows_of = [np.arange(lo[t], lo[t + 1]) for t in range(nf)]
    for r in range(1, nf + 1):
        for E in itertools.combinations(range(nf), r):
            rows = np.concatenate([rows_of[t] for t in E])
            h = la.solve(D[rows], g[rows], p)
            if h is None:
                continue
            res = (g - la.matmul(D, h.reshape(-1, 1), p).ravel()) % p
            if L.norm.int_norm(res) < target:
                return h
    return None


def decode(code: CocycleCode, f: np.ndarray, budget: Optional[int] = None, max_pops: Optional[int] = None) -> DecodeResult:
    """Queue-based local decoder: repeatedly shorten (d f')_z at vertices z by link corrections."""
    budget = enumeration_budget() if budget is None else budget
    F, k, p = code.F, code.k, code.F.p
    X = F.X
    dk = coboundary_matrix(F, k)
    fp = np.asarray(f, dtype=np.int64) % p
    nv = X.n_faces(0)
    queue = list(range(nv))
    inq = [True] * nv
    head = 0
    corrections = pops = 0
    max_pops = max_pops if max_pops is not None else 10 * nv * max(1, comb(X.d + 1, k + 2)) * max(1, X.n_faces(X.d)) + nv
    if k + 1 <= X.d:
        while head < len(queue) and pops < max_pops:
            zi = queue[head]
            head += 1
            inq[zi] = False
            pops += 1
            z = X.faces[0][zi]
            dfp = la.matmul(dk, fp.reshape(-1, 1), p).ravel()
            h = _local_correction(F, dfp, k, z, budget)
            if h is None or not h.any():
                continue
            L = _get_link(F, z, k + 1)
            fp = (fp - link_extend(F, h, k, z, L.Fz)) % p
            corrections += 1
            for nb in X.adjacency_lists[zi]:
                if not inq[nb]:
                    queue.append(nb)
                    inq[nb] = True
    clean = not la.matmul(dk, fp.reshape(-1, 1), p).any() if dk.size else True
    return DecodeResult(fp, bool(clean), corrections, pops)


def decode_radius(F: Sheaf, k: int, gamma, gamma_prime, css: bool = False):
    """η = min{(((k+1)Q/(d+1)) C(d+1,k+2) + 1)^{-1} γ, γ'} / ((k+2) P), divided by M_k for CSS."""
    X = F.X
    d, Q, P = X.d, X.Q, X.degree(k, X.d)
    c = Fraction((k + 1) * Q, d + 1) * comb(d + 1, k + 2) + 1
    first = INF if gamma == INF else Fraction(gamma) / c
    second = INF if gamma_prime == INF else Fraction(gamma_prime)
    m = min(first, second)
    if m == INF:
        return INF
    eta = Fraction(m) / ((k + 2) * P)
    if css:
        eta /= max(F.dim(x) for x in X.faces[k])
    return eta


# ---------------------------------------------------------------------------
# CSS codes


def perp(V: np.ndarray, p: int, n: int) -> np.ndarray:
    """RREF basis of V^⊥ for the standard bilinear form."""
    V = la.as_mat(V, p, n)
    if V.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    return la.nullspace(V, p, n)


def _same_space(U: np.ndarray, V: np.ndarray, p: int, n: int) -> bool:
    ru, rv = la.rank(U, p), la.rank(V, p)
    return ru == rv == la.rank(np.concatenate([la.as_mat(U, p, n), la.as_mat(V, p, n)]), p)


@dataclass
class CSSCode:
    """C_X = Z^k and C_Z = Z_k = ker ∂_k inside C^k, with the face-generator checks."""

    F: Sheaf
    k: int
    CX: np.ndarray = field(repr=False)
    CZ: np.ndarray = field(repr=False)
    HX: np.ndarray = field(repr=False)  # rows = X-checks φ_{y,b}
    HZ: np.ndarray = field(repr=False)  # rows = Z-checks φ'_{z,b}
    orthogonality: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.F.cochain_dim(self.k)

    @property
    def logical_dim(self) -> int:
        return self.CX.shape[0] + self.CZ.shape[0] - self.n

    @property
    def rate(self) -> Fraction:
        return Fraction(self.logical_dim, self.n)

    def max_check_weights(self):
        return (int((self.HX % self.F.p != 0).sum(axis=1).max()) if self.HX.size else 0,
                int((self.HZ % self.F.p != 0).sum(axis=1).max()) if self.HZ.size else 0)


def build_css(F: Sheaf, k: int) -> CSSCode:
    X, p = F.X, F.p
    if not 1 <= k <= X.d - 1:
        raise CodeError("CSS codes need 1 ≤ k ≤ d − 1")
    n = F.cochain_dim(k)
    dk = coboundary_matrix(F, k)
    dk1 = coboundary_matrix(F, k - 1)
    CX = cocycle_basis(F, k)
    CZ = la.nullspace(dk1.T, p, n)  # Z_k = ker ∂_k, ∂_k = d_{k-1}^T
    B_low = la.row_basis(dk, p, n)  # B_k = im ∂_{k+1} = row space of d_k
    B_up = coboundary_basis(F, k)
    orth = {
        "Zk_perp_eq_Bk": _same_space(perp(CX, p, n), B_low, p, n),
        "Zlowk_perp_eq_Bupk": _same_space(perp(CZ, p, n), B_up, p, n),
    }
    orth["CX_perp_in_CZ"] = la.rank(np.concatenate([CZ, perp(CX, p, n)]), p) == CZ.shape[0]
    if not all(orth.values()):
        raise CodeError(f"orthogonality relations failed: {orth}")
    return CSSCode(F, k, CX, CZ, dk, dk1.T.copy(), orth)


def css_x_decode(css: CSSCode, f: np.ndarray, budget: Optional[int] = None) -> DecodeResult:
    """X-side decoding: the cocycle decoder, with success meaning recovery modulo B^k."""
    code = CocycleCode(css.F, css.k, max(css.F.dim(x) for x in css.F.X.faces[css.k]), css.CX,
                       coboundary_basis(css.F, css.k).shape[0] == 0)
    return decode(code, f, budget)
