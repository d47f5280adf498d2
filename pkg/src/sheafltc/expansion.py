"""Norms, coboundary/cosystolic expansion, locally minimal cochains, heavy faces, vines and
the constants of the local-to-global expansion theorems."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _kernels
from . import linalg as la
from .complex import Face, SimplicialComplex, weight_denominator
from .config import enumeration_budget
from .homology import (coboundary_basis, coboundary_matrix, cocycle_basis, link_extend,
                       link_restrict_cochain)
from .sheaf import Sheaf, restrict_to_link

INF = math.inf
Number = Union[Fraction, float]

__all__ = [
    "INF",
    "Norm",
    "ExpansionReport",
    "coboundary_expansion",
    "cosystolic_expansion",
    "enumerate_span",
    "LinkData",
    "link_data",
    "is_locally_minimal_at",
    "is_locally_minimal",
    "is_minimal",
    "locally_minimal_approximation",
    "min_locally_minimal_cocycle_norm",
    "small_locally_minimal_expansion_check",
    "HeavyStructure",
    "heavy_structure",
    "local_skeleton_expansion",
    "bad_faces_bound",
    "vine_number",
    "vine_number_bruteforce",
    "terminal_count",
    "is_vine",
    "footnote_vine",
    "local_coboundary_expansion",
    "local_to_global_constants",
    "base_inequality_lhs",
]


# ---------------------------------------------------------------------------
# norms


class Norm:
    """A norm on C^k(X, F): weighted support (ws), normalized Hamming (ham) or basis Hamming (basis).

    Internally ‖f‖ = (Σ weights of groups touched by supp f) / den with integer weights.
    """

    def __init__(self, F: Sheaf, k: int, variant: str = "ws"):
        if variant not in ("ws", "ham", "basis"):
            raise ValueError(f"unknown norm {variant!r}")
        self.F, self.k, self.variant = F, k, variant
        X = F.X
        n = F.cochain_dim(k)
        if variant == "basis":
            self.groups = np.arange(n, dtype=np.int64)
            self.weights = np.ones(n, dtype=np.int64)
            self.den = 1
        else:
            self.groups = F.face_groups(k)
            nf = X.n_faces(k) if (k >= 0 or F.augmented) else 0
            if variant == "ws":
                self.weights = np.array(X.coface_count(k), dtype=np.int64)[:nf] if nf else np.zeros(0, dtype=np.int64)
                self.den = weight_denominator(X, k)
            else:
                self.weights = np.ones(nf, dtype=np.int64)
                self.den = max(1, X.n_faces(k))
        present = np.zeros(self.weights.shape[0], dtype=bool)
        present[self.groups] = True
        self.int_mass = int(self.weights[present].sum())

    @property
    def dim(self) -> int:
        return self.groups.shape[0]

    def int_norm(self, f: np.ndarray) -> int:
        f = np.asarray(f)
        if f.ndim == 2:
            return _kernels._group_norms_numpy(f % self.F.p, self.groups, self.weights)
        nz = np.nonzero(f % self.F.p)[0]
        if nz.size == 0:
            return 0
        return int(self.weights[np.unique(self.groups[nz])].sum())

    def __call__(self, f: np.ndarray) -> Fraction:
        return Fraction(self.int_norm(f), self.den)

    @property
    def mass(self) -> Fraction:
        """m(k): the largest norm of a k-cochain."""
        return Fraction(self.int_mass, self.den)


# ---------------------------------------------------------------------------
# enumeration helpers


def _key_to_coeffs(key: int, b: int, p: int) -> np.ndarray:
    c = np.zeros(b, dtype=np.int64)
    for j in range(b - 1, -1, -1):
        c[j] = key % p
        key //= p
    return c


def enumerate_span(basis: np.ndarray, p: int, n: int) -> np.ndarray:
    """All vectors of span(basis) (p^b rows, modular Gray order)."""
    basis = la.as_mat(basis, p, n)
    coef = _kernels.gray_coefficients(basis.shape[0], p)
    if basis.shape[0] == 0:
        return np.zeros((1, n), dtype=np.int64)
    return (coef @ basis) % p


def min_coset(v: np.ndarray, basis: np.ndarray, norm: Norm) -> Tuple[int, np.ndarray]:
    """Minimum-norm element of v + span(basis); ties go to the lexicographically least
    coefficient vector over the given basis."""
    p = norm.F.p
    basis = la.as_mat(basis, p, v.shape[0])
    best, key = _kernels.span_min_norm(v, basis, p, norm.groups, norm.weights)
    c = _key_to_coeffs(key, basis.shape[0], p)
    w = (v + c @ basis) % p if basis.shape[0] else v % p
    return best, w


def _space_size(p: int, dim: int) -> float:
    return float(p) ** dim


# ---------------------------------------------------------------------------
# coboundary and cosystolic expansion


@dataclass
class ExpansionReport:
    """Expansion constants with witnesses; exact mode means the value is attained by the witness."""

    mode: str
    eps: Number
    delta: Optional[Number] = None
    witness: Optional[np.ndarray] = field(default=None, repr=False)
    delta_witness: Optional[np.ndarray] = field(default=None, repr=False)
    samples: int = 0
    seed: Optional[int] = None
    note: str = ""

    def as_dict(self) -> dict:
        def num(x):
            if x is None:
                return None
            if isinstance(x, Fraction):
                return {"num": x.numerator, "den": x.denominator, "float": float(x)}
            return {"float": float(x)}

        return {"mode": self.mode, "eps": num(self.eps), "delta": num(self.delta),
                "witness": None if self.witness is None else self.witness.tolist(),
                "delta_witness": None if self.delta_witness is None else self.delta_witness.tolist(),
                "samples": self.samples, "seed": self.seed, "note": self.note}


def _ratio_min(dn: np.ndarray, mn: np.ndarray, skip_zero_row: bool = True):
    """Index of min dn/mn over rows with mn > 0 (exact comparison); returns (idx, Fraction)."""
    idx = np.nonzero(mn > 0)[0]
    if idx.size == 0:
        return None, INF
    vals = dn[idx] / mn[idx]
    m = vals.min()
    cand = idx[vals <= m * (1 + 1e-12) + 1e-15]
    best_i, best = None, None
    for i in cand:
        r = Fraction(int(dn[i]), int(mn[i]))
        if best is None or r < best:
            best_i, best = int(i), r
    return best_i, best


def _coset_expansion(F: Sheaf, k: int, sub: np.ndarray, variant: str, budget: int,
                     mode: str, samples: int, seed: int) -> ExpansionReport:
    """min over f ∉ span(sub) of ‖d f‖ m(k) / (‖f + span(sub)‖ m(k+1))."""
    p = F.p
    n = F.cochain_dim(k)
    nk = Norm(F, k, variant)
    nk1 = Norm(F, k + 1, variant)
    if nk.int_mass == 0 or nk1.int_mass == 0:
        return ExpansionReport("exact", INF, note="zero mass")
    D = coboundary_matrix(F, k)
    outer = la.complement(sub, p, n)
    if outer.shape[0] == 0:
        return ExpansionReport("exact", INF, note="no cochains outside the subspace")
    scale = Fraction(nk.int_mass, nk1.int_mass)
    if mode == "exact" and _space_size(p, n) > budget:
        mode = "sampled"
    if mode == "exact":
        coef, dn, mn = _kernels.coset_scan(outer, sub, D, p, nk.groups, nk.weights, nk1.groups, nk1.weights)
        coef, dn, mn = np.asarray(coef), np.asarray(dn), np.asarray(mn)
        nonzero = coef.any(axis=1)
        mn = np.where(nonzero, mn, 0)
        i, r = _ratio_min(dn, mn)
        rep = (coef[i] @ outer) % p
        _, w = min_coset(rep, sub, nk)
        return ExpansionReport("exact", r * scale, witness=w)
    if _space_size(p, sub.shape[0]) > budget:
        raise ValueError("subspace too large to enumerate even in sampled mode")
    rng = np.random.default_rng(seed)
    best, best_w = None, None
    for _ in range(samples):
        c = rng.integers(0, p, size=outer.shape[0])
        if not c.any():
            continue
        rep = (c @ outer) % p
        mnorm, w = min_coset(rep, sub, nk)
        r = Fraction(nk1.int_norm(la.matmul(D, w.reshape(-1, 1), p).ravel()), mnorm) * scale
        if best is None or r < best:
            best, best_w = r, w
    return ExpansionReport("sampled", best if best is not None else INF, witness=best_w, samples=samples,
                           seed=seed, note="upper bound")


def coboundary_expansion(F: Sheaf, k: int, variant: str = "ws", mode: str = "exact",
                         budget: Optional[int] = None, samples: int = 2000, seed: int = 0) -> ExpansionReport:
    """Largest ε with ‖d f‖ m(k) ≥ ε ‖f + B^k‖ m(k+1) for all f ∈ C^k (∞ if vacuous)."""
    budget = enumeration_budget() if budget is None else budget
    B = coboundary_basis(F, k)
    return _coset_expansion(F, k, B, variant, budget, mode, samples, seed)


def cosystolic_expansion(F: Sheaf, k: int, variant: str = "ws", mode: str = "exact",
                         budget: Optional[int] = None, samples: int = 2000, seed: int = 0) -> ExpansionReport:
    """(ε, δ): ε over cosets of Z^k and δ = min ‖f‖/m(k) over Z^k − B^k."""
    budget = enumeration_budget() if budget is None else budget
    p = F.p
    n = F.cochain_dim(k)
    Z = cocycle_basis(F, k)
    rep = _coset_expansion(F, k, Z, variant, budget, mode, samples, seed)
    nk = Norm(F, k, variant)
    B = coboundary_basis(F, k)
    H = la.complement(B, p, n, within=Z)
    if H.shape[0] == 0 or nk.int_mass == 0:
        rep.delta = INF
        return rep
    if _space_size(p, Z.shape[0]) > budget:
        raise ValueError("Z^k too large to enumerate for δ")
    coef, _, mn = _kernels.coset_scan(H, B, np.zeros((0, n), dtype=np.int64), p, nk.groups, nk.weights,
                                      np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    coef, mn = np.asarray(coef), np.asarray(mn)
    nonzero = np.nonzero(coef.any(axis=1))[0]
    j = nonzero[np.argmin(mn[nonzero])]
    _, w = min_coset((coef[j] @ H) % p, B, nk)
    rep.delta = Fraction(int(mn[j]), nk.int_mass)
    rep.delta_witness = w
    return rep


# ---------------------------------------------------------------------------
# locally minimal cochains


@dataclass
class LinkData:
    """Cached data of the link at a vertex for degree-k cochains of X."""

    z: Face
    Fz: Sheaf
    k: int
    D: np.ndarray  # d_{k-2} on the link: C^{k-2}(X_z) -> C^{k-1}(X_z)
    B: np.ndarray  # RREF basis of its image
    norm: Norm


def link_data(F: Sheaf, z: Face, k: int) -> LinkData:
    """Link data at a face z for testing/correcting k-cochains of X (k ≥ |z|)."""
    Fz, _ = restrict_to_link(F, z)
    kk = k - len(z)
    D = coboundary_matrix(Fz, kk - 1)
    B = la.row_basis(D.T, F.p, Fz.cochain_dim(kk)) if D.size else np.zeros((0, Fz.cochain_dim(kk)), dtype=np.int64)
    return LinkData(z, Fz, k, D, B, Norm(Fz, kk, "ws"))


def _link_cache(F: Sheaf, k: int) -> Dict[Face, LinkData]:
    cache = F.__dict__.setdefault("_link_cache", {})
    if k not in cache:
        cache[k] = {}
    return cache[k]


def _get_link(F: Sheaf, z: Face, k: int) -> LinkData:
    c = _link_cache(F, k)
    if z not in c:
        c[z] = link_data(F, z, k)
    return c[z]


def is_minimal(F: Sheaf, f: np.ndarray, k: int, variant: str = "ws") -> bool:
    """‖f‖ ≤ ‖f + b‖ for all b ∈ B^k."""
    nk = Norm(F, k, variant)
    best, _ = min_coset(np.asarray(f) % F.p, coboundary_basis(F, k), nk)
    return best >= nk.int_norm(f)


def is_locally_minimal_at(F: Sheaf, f: np.ndarray, k: int, z: Sequence[int]) -> bool:
    """f_z is minimal in its coset of B^{k-|z|}(X_z, F_z) for the link ws norm."""
    z = tuple(sorted(z))
    if len(z) > k:
        return True
    L = _get_link(F, z, k)
    _, fz = link_restrict_cochain(F, f, k, z, L.Fz)
    if L.B.shape[0] == 0:
        return True
    best, _ = min_coset(fz, L.B, L.norm)
    return best >= L.norm.int_norm(fz)


def is_locally_minimal(F: Sheaf, f: np.ndarray, k: int) -> bool:
    """Locally minimal at every 0-face (equivalently at every nonempty face)."""
    if k <= 0:
        return True
    return all(is_locally_minimal_at(F, f, k, z) for z in F.X.faces[0])


def locally_minimal_approximation(F: Sheaf, f: np.ndarray, k: int) -> Tuple[np.ndarray, dict]:
    """Greedy correction of f ∈ C^{k+1}: returns g ∈ C^k with f − d_k g locally minimal.

    Vertices are scanned in L-order round-robin; at a vertex the minimal-norm element of the
    link coset is taken (ties: lexicographically least coefficients over the RREF basis) and
    the canonical solution h of the link system is lifted to h^x.  Stops after a full pass
    without a strict decrease.
    """
    p = F.p
    X = F.X
    g = np.zeros(F.cochain_dim(k), dtype=np.int64)
    cur = np.asarray(f, dtype=np.int64) % p
    steps = 0
    if k < 0:
        return g, {"steps": 0}
    verts = X.faces[0]
    dk = coboundary_matrix(F, k)
    idle = 0
    i = 0
    while idle < len(verts):
        z = verts[i]
        i = (i + 1) % len(verts)
        L = _get_link(F, z, k + 1)
        _, fz = link_restrict_cochain(F, cur, k + 1, z, L.Fz)
        if L.B.shape[0] == 0 or not fz.any():
            idle += 1
            continue
        best, w = min_coset(fz, L.B, L.norm)
        if best >= L.norm.int_norm(fz):
            idle += 1
            continue
        h = la.solve(L.D, (fz - w) % p, p)
        hz = link_extend(F, h, k, z, L.Fz)
        g = (g + hz) % p
        cur = (cur - la.matmul(dk, hz.reshape(-1, 1), p).ravel()) % p
        steps += 1
        idle = 0
    return g, {"steps": steps}


def min_locally_minimal_cocycle_norm(F: Sheaf, k: int, budget: Optional[int] = None,
                                     modulo_coboundaries: bool = False):
    """Least ws norm of a nonzero locally minimal k-cocycle (∞ if none), with a witness.

    With ``modulo_coboundaries`` only cocycles outside B^k are considered.
    """
    budget = enumeration_budget() if budget is None else budget
    p = F.p
    n = F.cochain_dim(k)
    Z = cocycle_basis(F, k)
    if Z.shape[0] == 0:
        return INF, None
    if _space_size(p, Z.shape[0]) > budget:
        raise ValueError("Z^k too large to enumerate")
    allz = enumerate_span(Z, p, n)
    nk = Norm(F, k, "ws")
    norms = np.asarray(nk.int_norm(allz))
    order = np.lexsort((np.arange(len(norms)), norms))
    if modulo_coboundaries:
        B = coboundary_basis(F, k)
        R, piv = la.rref(B, p) if B.shape[0] else (np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64))
    for t in order:
        v = allz[t]
        if not v.any():
            continue
        if modulo_coboundaries and not la.reduce_mod(v, R, piv, p).any():
            continue
        if is_locally_minimal(F, v, k):
            return Fraction(int(norms[t]), nk.den), v
    return INF, None


def small_locally_minimal_expansion_check(F: Sheaf, k: int, alpha: Number, beta: Number,
                                          cocycles_only: bool = False, budget: Optional[int] = None,
                                          samples: int = 5000, seed: int = 0) -> dict:
    """Test ‖d f‖ ≥ β ‖f‖ for locally minimal f with 0 < ‖f‖ < α (exhaustive within budget)."""
    budget = enumeration_budget() if budget is None else budget
    p = F.p
    n = F.cochain_dim(k)
    nk = Norm(F, k, "ws")
    nk1 = Norm(F, k + 1, "ws")
    D = coboundary_matrix(F, k)
    space = cocycle_basis(F, k) if cocycles_only else np.eye(n, dtype=np.int64)
    exhaustive = _space_size(p, space.shape[0]) <= budget
    if exhaustive:
        vecs = enumerate_span(space, p, n)
    else:
        rng = np.random.default_rng(seed)
        vecs = (rng.integers(0, p, size=(samples, space.shape[0])) @ space) % p
    norms = np.asarray(nk.int_norm(vecs))
    checked = 0
    for t in np.nonzero((norms > 0) & (Fraction(1, 1) * norms < float(alpha) * nk.den + 1))[0]:
        if not Fraction(int(norms[t]), nk.den) < alpha:
            continue
        v = vecs[t]
        if not is_locally_minimal(F, v, k):
            continue
        checked += 1
        dv = la.matmul(D, v.reshape(-1, 1), p).ravel()
        if nk1(dv) < beta * Fraction(int(norms[t]), nk.den):
            return {"ok": False, "exhaustive": exhaustive, "checked": checked, "counterexample": v}
    return {"ok": True, "exhaustive": exhaustive, "checked": checked, "counterexample": None}


# ---------------------------------------------------------------------------
# heavy faces


@dataclass
class HeavyStructure:
    """Heavy faces A_i, bad (k+1)-faces Υ, terminal faces and descent sets."""

    k: int
    h: List[Fraction]
    A: Dict[int, set]
    upsilon: set
    terminal: set
    desc: Dict[Face, FrozenSet[Face]]
    D_top: Dict[Face, FrozenSet[Face]]

    def weight(self, X: SimplicialComplex, faces, dim: int) -> Fraction:
        c = X.coface_count(dim)
        return Fraction(int(sum(c[X.face_index(x)] for x in faces)), weight_denominator(X, dim))

    def unique_terminal_ok(self) -> bool:
        for y, Dy in self.D_top.items():
            if y in self.upsilon or not Dy:
                continue
            T = [z for z in Dy if z in self.terminal]
            if len(T) != 1:
                return False
            t = T[0]
            if any(t not in self.desc[x] for x in Dy):
                return False
        return True


def heavy_structure(F: Sheaf, f: np.ndarray, k: int, h: Sequence[Number]) -> HeavyStructure:
    """Heavy faces for f ∈ C^k and thresholds h = (h_{-1}, ..., h_{k-1})."""
    X = F.X
    p = F.p
    h = [Fraction(x) if not isinstance(x, Fraction) else x for x in h]
    if len(h) != k + 1:
        raise ValueError("need thresholds h_{-1..k-1}")
    o = F.offsets(k)
    A: Dict[int, set] = {k: {x for t, x in enumerate(X.faces_of(k)) if (np.asarray(f[o[t]:o[t + 1]]) % p).any()}}
    for i in range(k, 0 - 1, -1):
        c = X.coface_count(i)
        up = X.cofaces_up[i]  # (i-1)-faces -> i-faces
        Ai_idx = {X.face_index(x) for x in A[i]}
        nxt = set()
        for t, x in enumerate(X.faces_of(i - 1)):
            tot = sum(int(c[j]) for j in up[t])
            num = sum(int(c[j]) for j in up[t] if j in Ai_idx)
            if num >= h[i] * tot and tot > 0:
                nxt.add(x)
        A[i - 1] = nxt
    heavy = set().union(*A.values())
    desc: Dict[Face, FrozenSet[Face]] = {}
    terminal = set()
    for i in range(-1, k + 1):
        for x in sorted(A[i]):
            facets = [x[:j] + x[j + 1:] for j in range(len(x))]
            hf = [y for y in facets if y in heavy]
            s = {x}
            for y in hf:
                s |= desc[y]
            desc[x] = frozenset(s)
            if not hf:
                terminal.add(x)
    upsilon = set()
    D_top = {}
    if k < X.d:
        for y in X.faces[k + 1]:
            s = set()
            for j in range(len(y)):
                x = y[:j] + y[j + 1:]
                if x in A[k]:
                    s |= desc[x]
            D_top[y] = frozenset(s)
            bad = False
            for i in range(0, k + 1):
                hv = [x for x in itertools.combinations(y, i + 1) if x in A[i]]
                for a, b in itertools.combinations(hv, 2):
                    inter = tuple(sorted(set(a) & set(b)))
                    if len(inter) == i and inter not in A[i - 1]:
                        bad = True
                        break
                if bad:
                    break
            if bad:
                upsilon.add(y)
    return HeavyStructure(k, h, A, upsilon, terminal, desc, D_top)


def local_skeleton_expansion(X: SimplicialComplex, i: int) -> Fraction:
    """max over z ∈ X(i) of the exact skeleton expansion of the link X_z (i = -1 gives X)."""
    from .complex import skeleton_expansion_exact
    best = Fraction(0)
    for z in X.faces_of(i):
        L = X.link(z)[0] if z else X
        if L.d < 1:
            continue
        best = max(best, skeleton_expansion_exact(L))
    return best


def bad_faces_bound(k: int, alphas: Sequence[Number], h: Sequence[Number], norm_f: Number) -> Number:
    """Σ_{i=0}^k C(k+2,i+2)(i+1)(α_{i-1}+h_{i-1}) h_i^{-1}···h_{k-1}^{-1} ‖f‖ (lists indexed from -1)."""
    tot = 0
    for i in range(0, k + 1):
        prod = 1
        for j in range(i, k):
            prod *= h[j + 1]
        tot += comb(k + 2, i + 2) * (i + 1) * (alphas[i] + h[i]) / prod
    return tot * norm_f


# ---------------------------------------------------------------------------
# vines


def _subsets_of_size(n: int, r: int) -> List[int]:
    return [sum(1 << i for i in c) for c in itertools.combinations(range(n), r)]


def terminal_count(E: set, n: int) -> int:
    """Number of s ∈ E none of whose (|s|−1)-subsets lie in E (E given as bitmasks)."""
    cnt = 0
    for s in E:
        if not any((s & ~(1 << i)) in E for i in range(n) if s >> i & 1):
            cnt += 1
    return cnt


def is_vine(E: set, n: int) -> bool:
    full = (1 << n) - 1
    if full not in E:
        return False
    ok = {full}
    for r in range(n - 1, -1, -1):
        for s in E:
            if bin(s).count("1") == r and any((s | (1 << i)) in ok for i in range(n) if not s >> i & 1):
                ok.add(s)
    return ok == set(E)


def vine_number(n: int) -> int:
    """U(n) by dynamic programming over levels (state = chosen sets of one size)."""
    if n < 1:
        raise ValueError("n ≥ 1")
    levels = [_subsets_of_size(n, r) for r in range(n + 1)]
    pos = [{s: i for i, s in enumerate(L)} for L in levels]
    # shadow[r][i] = bitmask (over level r-1) of the facets of the i-th r-set
    shadow = [None] + [[sum(1 << pos[r - 1][s & ~(1 << b)] for b in range(n) if s >> b & 1)
                        for s in levels[r]] for r in range(1, n + 1)]

    @lru_cache(maxsize=None)
    def best(r: int, state: int) -> int:
        # state: bitmask over levels[r] of the chosen r-sets (each has a chain upward)
        if r == 0:
            return bin(state).count("1")
        avail = 0
        for i in range(len(levels[r])):
            if state >> i & 1:
                avail |= shadow[r][i]
        out = 0
        sub = avail
        while True:
            term = sum(1 for i in range(len(levels[r])) if state >> i & 1 and not shadow[r][i] & sub)
            out = max(out, term + best(r - 1, sub))
            if sub == 0:
                break
            sub = (sub - 1) & avail
        return out

    return best(n, 1)


def vine_number_bruteforce(n: int) -> int:
    """U(n) by enumerating every family containing [n] (n ≤ 4)."""
    full = (1 << n) - 1
    others = [s for s in range(1 << n) if s != full]
    best = 0
    for mask in range(1 << len(others)):
        E = {full} | {others[i] for i in range(len(others)) if mask >> i & 1}
        if is_vine(E, n):
            best = max(best, terminal_count(E, n))
    return best


def footnote_vine(n: int) -> set:
    """{s : |s| ≥ n/2} ∪ {s ⊆ first n/2 elements : |s| ≥ n/4} for n divisible by 4."""
    if n % 4:
        raise ValueError("n must be divisible by 4")
    k = n // 4
    low = (1 << (2 * k)) - 1
    return {s for s in range(1 << n)
            if bin(s).count("1") >= 2 * k or (s & ~low == 0 and bin(s).count("1") >= k)}


# ---------------------------------------------------------------------------
# local expansion and local-to-global constants


def local_coboundary_expansion(F: Sheaf, i: int, k: int, budget: Optional[int] = None) -> Tuple[Number, dict]:
    """min over z ∈ X(i) of the ws coboundary expansion of (X_z, F_z) in dimension k − i − 1."""
    best: Number = INF
    table = {}
    for z in F.X.faces_of(i):
        Fz = restrict_to_link(F, z)[0] if z else F
        r = coboundary_expansion(Fz, k - i - 1, "ws", budget=budget)
        table["-".join(map(str, z))] = r.eps
        if r.eps < best:
            best = r.eps
    return best, table


def base_inequality_lhs(k: int, alphas: Sequence[Number], h: Sequence[Number], U: Optional[int] = None) -> Number:
    """U(k+2) Σ_i C(k+2,i+2)(i+1)(α_{i-1}+h_{i-1})/(h_i···h_{k-1}) (lists indexed from -1)."""
    U = vine_number(k + 2) if U is None else U
    return U * bad_faces_bound(k, alphas, h, 1)


def _eps_combined(k: int, eps: Sequence[Number]) -> Number:
    return min((k + 2) * Fraction(e) / (k + 1 - i) if not isinstance(e, float) else (k + 2) * e / (k + 1 - i)
               for i, e in enumerate(eps))


def local_to_global_constants(k: int, eps: Sequence[Number], eps_prime: Sequence[Number], Q: int, d: int,
                              lam: Optional[float] = None, alphas: Optional[Sequence[Number]] = None,
                              alphas_prime: Optional[Sequence[Number]] = None,
                              h: Optional[Sequence[Number]] = None, grid: int = 24) -> dict:
    """Evaluate the closed-form constants and feasibility flags of the local-to-global theorems.

    ``eps`` are the i-local coboundary expansions in dimension k (i = 0..k), ``eps_prime``
    those in dimension k+1 (i = 0..k+1); ``alphas`` are i-local skeleton expansions (i = -1..k-1).
    """
    e = _eps_combined(k, eps)
    ep = _eps_combined(k + 1, eps_prime) if eps_prime is not None else None
    out: dict = {"k": k, "eps": e, "eps_prime": ep}
    c1 = (k + 1) ** 2 * 2 ** (2 * k + 6)
    c2 = (k + 2) ** 2 * 2 ** (2 * k + 8)
    gamma_i = (Fraction(e) / c1) ** (2 ** (k + 1) - 1) if e != INF else INF
    out["small_k"] = {"beta": Fraction(e) / 2 if e != INF else INF, "gamma": gamma_i}
    if ep is not None:
        out["small_k1"] = {"beta": Fraction(ep) / 2 if ep != INF else INF,
                           "gamma": (Fraction(ep) / c2) ** (2 ** (k + 2) - 1) if ep != INF else INF}
        cap = Fraction(d + 1, (k + 1) * Q) / comb(d + 1, k + 2)
        out["cosystolic"] = {"eps": min(out["small_k1"]["gamma"], cap), "delta": gamma_i}
        lam_thr = min((float(e) / c1) ** (2 ** k), (float(ep) / c2) ** (2 ** (k + 1)), 1.0) / d
    else:
        lam_thr = min((float(e) / c1) ** (2 ** k), 1.0) / d
    out["lambda_threshold"] = lam_thr
    if lam is not None:
        out["lambda"] = lam
        out["lambda_ok"] = lam <= lam_thr
    U = vine_number(k + 2)
    out["U"] = U
    if alphas is not None:
        alphas = [Fraction(a) for a in alphas]
        nec = [alphas[i + 1] < (Fraction(e) / U) ** (2 ** (k - 1 - i)) for i in range(-1, k)]
        out["necessary_bound_ok"] = all(nec)
        cand = []
        closed = [(Fraction(e) / c1) ** (2 ** (k - 1 - i)) for i in range(-1, k)]
        cand.append(("closed_form", closed))
        cand.append(("alpha", list(alphas)))
        if h is not None:
            cand.insert(0, ("given", [Fraction(x) for x in h]))
        # geometric grid on each h_i
        vals = [Fraction(1, 2 ** j) for j in range(grid)]
        if k <= 1:
            for combo in itertools.product(vals, repeat=k + 1):
                cand.append(("grid", list(combo)))
        best = None
        for name, hv in cand:
            if any(x <= 0 for x in hv):
                continue
            lhs = base_inequality_lhs(k, alphas, hv, U)
            if lhs < e and (best is None or hv_gamma(hv) > hv_gamma(best[1])):
                best = (name, hv, lhs)
        out["base_feasible"] = best is not None
        if best is not None:
            name, hv, lhs = best
            out["h"] = hv
            out["h_source"] = name
            out["beta"] = e - lhs
            out["gamma"] = hv_gamma(hv)
    if k == 0 and alphas is not None:
        a = Fraction(alphas[0])
        out["k0_corollary"] = {"feasible": a < e, "max_h": max(Fraction(0), e - a)}
    if k == 1 and alphas is not None:
        m = min(Fraction(eps[0]) / 4, Fraction(eps[1]) / 2)
        a_m1, a_0 = Fraction(alphas[0]), Fraction(alphas[1])
        out["k1_corollary"] = {"feasible": a_0 < m and a_m1 < (m - a_0) ** 2 / 6, "threshold": m}
    return out


def hv_gamma(hv: Sequence[Number]) -> Number:
    g = Fraction(1)
    for x in hv:
        g *= x
    return g


def dim2_conditions(eps0: Number, eps_p0: Number, eps_p1: Number, alpha_m1: Number, alpha_0: Number,
                    lam: Optional[float] = None) -> dict:
    """Inequalities of the dimension-2 corollary and of its spectral (trickling-down) variant."""
    m = min(Fraction(eps_p0) / 4, Fraction(eps_p1) / 2)
    a0, am1 = Fraction(alpha_0), Fraction(alpha_m1)
    out = {"skeleton": bool(a0 < m and am1 < min(Fraction(eps0), (m - a0) ** 2 / 6)), "threshold": m}
    if lam is not None:
        lam_f = float(lam)
        mf = float(m)
        out["spectral"] = bool(lam_f < mf and lam_f < 1 and lam_f / (1 - lam_f) < min(float(eps0), (mf - lam_f) ** 2 / 6))
    return out
