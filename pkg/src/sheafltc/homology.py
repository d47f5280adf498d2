"""Cochains, coboundary/boundary matrices, cohomology and cup products over F_p."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg as la
from .complex import Face, SimplicialComplex
from .sheaf import Sheaf, SheafMorphism, restrict_to_link

__all__ = [
    "coboundary_matrix",
    "boundary_matrix",
    "CohomologySummary",
    "cohomology",
    "betti",
    "cocycle_basis",
    "coboundary_basis",
    "cup_product",
    "merge_sign",
    "link_restrict_cochain",
    "link_extend",
    "les_dimension_check",
    "induced_rank",
]


def coboundary_matrix(F: Sheaf, k: int) -> np.ndarray:
    """Matrix of d_k : C^k -> C^{k+1}; (d f)(y) = Σ_i (-1)^i res f(y minus its i-th vertex)."""
    X, p = F.X, F.p
    rows = F.cochain_dim(k + 1)
    cols = F.cochain_dim(k)
    D = np.zeros((rows, cols), dtype=np.int64)
    if rows == 0 or cols == 0:
        return D
    ro = F.offsets(k + 1)
    co = F.offsets(k)
    for j, y in enumerate(X.faces_of(k + 1)):
        if ro[j + 1] == ro[j]:
            continue
        for i in range(len(y)):
            x = y[:i] + y[i + 1:]
            xi = X.face_index(x)
            if co[xi + 1] == co[xi]:
                continue
            R = F.res[(x, y)]
            if i % 2:
                R = (-R) % p
            D[ro[j]:ro[j + 1], co[xi]:co[xi + 1]] = (D[ro[j]:ro[j + 1], co[xi]:co[xi + 1]] + R) % p
    return D


def boundary_matrix(F: Sheaf, i: int) -> np.ndarray:
    """∂_i : C^i -> C^{i-1}, the transpose of d_{i-1} for the standard bilinear forms."""
    return coboundary_matrix(F, i - 1).T.copy()


@dataclass
class CohomologySummary:
    """Per-degree dimensions of C^k, Z^k, B^k, H^k with echelon representatives of H^k."""

    degrees: List[int]
    dim_C: Dict[int, int]
    dim_Z: Dict[int, int]
    dim_B: Dict[int, int]
    reps: Dict[int, np.ndarray] = field(repr=False)

    @property
    def h(self) -> Dict[int, int]:
        return {k: self.dim_Z[k] - self.dim_B[k] for k in self.degrees}

    def h_list(self) -> List[int]:
        return [self.h[k] for k in self.degrees if k >= 0]

    def euler_ok(self) -> bool:
        a = sum((-1) ** k * self.dim_C[k] for k in self.degrees)
        b = sum((-1) ** k * self.h[k] for k in self.degrees)
        return a == b


def _degrees(F: Sheaf) -> List[int]:
    return list(range(-1 if F.augmented else 0, F.X.d + 1))


def cocycle_basis(F: Sheaf, k: int) -> np.ndarray:
    """RREF basis (rows) of Z^k."""
    n = F.cochain_dim(k)
    if k >= F.X.d:
        return np.eye(n, dtype=np.int64)
    return la.nullspace(coboundary_matrix(F, k), F.p, n)


def coboundary_basis(F: Sheaf, k: int) -> np.ndarray:
    """RREF basis (rows) of B^k = im d_{k-1}."""
    n = F.cochain_dim(k)
    if k <= (-1 if F.augmented else 0):
        return np.zeros((0, n), dtype=np.int64)
    return la.row_basis(coboundary_matrix(F, k - 1).T, F.p, n)


def cohomology(F: Sheaf) -> CohomologySummary:
    degs = _degrees(F)
    dC, dZ, dB, reps = {}, {}, {}, {}
    for k in degs:
        n = F.cochain_dim(k)
        Z = cocycle_basis(F, k)
        B = coboundary_basis(F, k)
        dC[k], dZ[k], dB[k] = n, Z.shape[0], B.shape[0]
        if B.shape[0]:
            R, piv = la.rref(B, F.p)
            Zr = la.reduce_mod(Z, R, piv, F.p)
        else:
            Zr = Z
        reps[k] = la.row_basis(Zr, F.p, n)
    return CohomologySummary(degs, dC, dZ, dB, reps)


def betti(F: Sheaf) -> List[int]:
    """(h^0, ..., h^d)."""
    return cohomology(F).h_list()


# ---------------------------------------------------------------------------
# cup product


def cup_product(alpha: np.ndarray, i: int, f: np.ndarray, j: int, G: Sheaf) -> np.ndarray:
    """(α ∪ f)(v0..v_{i+j}) = α(v0..vi) · res f(vi..v_{i+j}) for α a scalar i-cochain on X."""
    X, p = G.X, G.p
    out = np.zeros(G.cochain_dim(i + j), dtype=np.int64)
    o = G.offsets(i + j)
    fo = G.offsets(j)
    for t, y in enumerate(X.faces_of(i + j)):
        if o[t + 1] == o[t]:
            continue
        a = int(alpha[X.face_index(y[: i + 1])]) % p
        if not a:
            continue
        back = y[i:]
        bi = X.face_index(back)
        val = f[fo[bi]:fo[bi + 1]]
        out[o[t]:o[t + 1]] = (a * la.matmul(G.restriction(back, y), val.reshape(-1, 1), p).ravel()) % p
    return out


# ---------------------------------------------------------------------------
# link cochains


def merge_sign(x: Sequence[int], z: Sequence[int]) -> int:
    """Sign of the permutation sorting the concatenation x·z."""
    inv = sum(1 for a in x for b in z if a > b)
    return -1 if inv % 2 else 1


def _link_parent(L: SimplicialComplex, x: Face) -> Tuple[int, ...]:
    par = getattr(L, "_parent_vertices", None)
    return tuple(par[v] for v in x) if par is not None else x


def link_restrict_cochain(F: Sheaf, f: np.ndarray, k: int, z: Sequence[int], Fz: Optional[Sheaf] = None):
    """f_z(x) = f(x z) in C^{k-i-1}(X_z, F_z); returns (F_z, f_z)."""
    z = tuple(sorted(z))
    corr = None
    if Fz is None:
        Fz, corr = restrict_to_link(F, z)
    L = Fz.X
    kk = k - len(z)
    out = np.zeros(Fz.cochain_dim(kk), dtype=np.int64)
    lo = Fz.offsets(kk)
    fo = F.offsets(k)
    for t, x in enumerate(L.faces_of(kk)):
        xp = _link_parent(L, x)
        xz = tuple(sorted(xp + z))
        s = merge_sign(xp, z)
        xi = F.X.face_index(xz)
        v = f[fo[xi]:fo[xi + 1]]
        out[lo[t]:lo[t + 1]] = (s * v) % F.p
    return Fz, out


def link_extend(F: Sheaf, g: np.ndarray, k: int, z: Sequence[int], Fz: Sheaf) -> np.ndarray:
    """g^z in C^k(X, F): g^z(x z) = g(x) on the star of z, zero elsewhere (g has degree k - |z|)."""
    z = tuple(sorted(z))
    L = Fz.X
    kk = k - len(z)
    out = np.zeros(F.cochain_dim(k), dtype=np.int64)
    lo = Fz.offsets(kk)
    fo = F.offsets(k)
    for t, x in enumerate(L.faces_of(kk)):
        xp = _link_parent(L, x)
        xz = tuple(sorted(xp + z))
        s = merge_sign(xp, z)
        xi = F.X.face_index(xz)
        out[fo[xi]:fo[xi + 1]] = (s * g[lo[t]:lo[t + 1]]) % F.p
    return out


# ---------------------------------------------------------------------------
# exact sequences


def _cochain_map(phi: SheafMorphism, k: int) -> np.ndarray:
    F, G = phi.source, phi.target
    M = np.zeros((G.cochain_dim(k), F.cochain_dim(k)), dtype=np.int64)
    if k == -1 and not (F.augmented and G.augmented):
        return M
    fo, go = F.offsets(k), G.offsets(k)
    for t, x in enumerate(F.X.faces_of(k)):
        M[go[t]:go[t + 1], fo[t]:fo[t + 1]] = phi.maps[x]
    return M


def induced_rank(phi: SheafMorphism, k: int) -> int:
    """Rank of the induced map H^k(F) -> H^k(G)."""
    F, G, p = phi.source, phi.target, phi.source.p
    Z = cocycle_basis(F, k)
    BG = coboundary_basis(G, k)
    if Z.shape[0] == 0:
        return 0
    img = la.matmul(Z, _cochain_map(phi, k).T, p)
    return la.rank(np.concatenate([img, BG]), p) - BG.shape[0]


def les_dimension_check(phi: SheafMorphism, psi: SheafMorphism) -> dict:
    """Check that 0 -> F -> G -> H -> 0 is exact and its long exact sequence has consistent ranks."""
    F, G, H = phi.source, phi.target, psi.target
    p = F.p
    exact = True
    for x in F.dims:
        A, B = phi.maps[x], psi.maps[x]
        if la.rank(A, p) != F.dims[x] or la.rank(B, p) != H.dims[x]:
            exact = False
        elif la.matmul(B, A, p).any() or F.dims[x] + H.dims[x] != G.dims[x]:
            exact = False
    if not (phi.is_compatible() and psi.is_compatible()):
        exact = False
    if not exact:
        raise ValueError("input is not a short exact sequence of sheaves")
    hF, hG, hH = cohomology(F).h, cohomology(G).h, cohomology(H).h
    degs = sorted(hF)
    a = {k: induced_rank(phi, k) for k in degs}
    b = {k: induced_rank(psi, k) for k in degs}
    # the connecting map δ_k : H^k(H) -> H^{k+1}(F) has rank h^k(H) - b_k
    c = {k: hH[k] - b[k] for k in degs}
    ok = True
    for k in degs:
        ok &= hG[k] == a[k] + b[k]  # exactness at H^k(G)
        ok &= hF[k] == c.get(k - 1, 0) + a[k]  # exactness at H^k(F)
    ok &= c[degs[-1]] == 0  # nothing beyond the top degree
    alt = sum((-1) ** k * (hF[k] - hG[k] + hH[k]) for k in degs)
    return {"exact": True, "ranks_consistent": bool(ok), "alternating_sum": alt,
            "h_F": hF, "h_G": hG, "h_H": hH, "rank_phi": a, "rank_psi": b, "rank_delta": c}
