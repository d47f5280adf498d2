"""Sheaf modification: the subsheaf C_E, the iterative enlargement of E, the (a1)/(a2)
checks, the link identification of F/C_E and the cup-product predictor."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from . import linalg as la
from .complex import Face
from .homology import (coboundary_basis, cocycle_basis, coboundary_matrix, cohomology, cup_product,
                       _cochain_map)
from .sheaf import (Sheaf, SheafError, SheafMorphism, _facets, constant_sheaf, pushforward,
                    restrict_to_link, subquotient)

__all__ = [
    "edge_spaces",
    "c_e_spaces",
    "c_e_closure",
    "subsheaf_C_E",
    "quotient_F_E",
    "omega_kernel",
    "omega_kernel_dim_alt",
    "effect_of_E",
    "ModificationState",
    "process_step",
    "run_process",
    "default_max_e_dim",
    "check_a1_a2",
    "link_quotient_check",
    "CupPredictorReport",
    "cup_predictor",
    "er_dimension_threshold",
    "counit_kernel_sheaf",
]


def _edge_basis(F: Sheaf, E: np.ndarray, e: Face) -> np.ndarray:
    o = F.offsets(1)
    i = F.X.face_index(e)
    n = F.dim(e)
    E = la.as_mat(E, F.p, F.cochain_dim(1))
    return la.row_basis(E[:, o[i]:o[i + 1]], F.p, n)


def edge_spaces(F: Sheaf, E: np.ndarray) -> Dict[Face, np.ndarray]:
    """E(e) = projection of E to F(e), as RREF rows."""
    return {e: _edge_basis(F, E, e) for e in F.X.faces_of(1)}


def c_e_spaces(F: Sheaf, E: np.ndarray) -> Dict[Face, np.ndarray]:
    """C_E(x) = Σ_{e ⊆ x} res_{x<-e} E(e) (zero on vertices and on ∅)."""
    p = F.p
    Ee = edge_spaces(F, E)
    out = {}
    for x, n in F.dims.items():
        if len(x) < 2:
            out[x] = np.zeros((0, n), dtype=np.int64)
            continue
        rows = [la.matmul(Ee[e], F.restriction(e, x).T, p)
                for e in ((a, b) for i, a in enumerate(x) for b in x[i + 1:])]
        out[x] = la.row_basis(np.concatenate(rows + [np.zeros((0, n), dtype=np.int64)]), p, n)
    return out


def c_e_closure(F: Sheaf, E: np.ndarray) -> Dict[Face, np.ndarray]:
    """Smallest restriction-closed family containing E(e) on edges, by upward closure one
    codimension at a time (an independent route to C_E)."""
    p = F.p
    Ee = edge_spaces(F, E)
    cur = {x: np.zeros((0, n), dtype=np.int64) for x, n in F.dims.items()}
    for e, B in Ee.items():
        cur[e] = B
    for k in range(2, F.X.d + 1):
        for y in F.X.faces[k]:
            rows = [la.matmul(cur[x], F.res[(x, y)].T, p) for x in _facets(y)]
            cur[y] = la.row_basis(np.concatenate(rows + [np.zeros((0, F.dim(y)), dtype=np.int64)]), p, F.dim(y))
    return cur


def _require_locally_constant(F: Sheaf) -> None:
    if not F.is_locally_constant():
        raise SheafError("the modification needs a locally constant sheaf")


def subsheaf_C_E(F: Sheaf, E: np.ndarray) -> Sheaf:
    _require_locally_constant(F)
    return subquotient(F, c_e_spaces(F, E), {})


def quotient_F_E(F: Sheaf, E: np.ndarray) -> Sheaf:
    """F_E = F / C_E."""
    _require_locally_constant(F)
    return subquotient(F, {}, c_e_spaces(F, E))


def _inclusion(C: Sheaf, F: Sheaf) -> SheafMorphism:
    return SheafMorphism(C, F, {x: C._sub_bases[x].T for x in C.dims})


def _quotient_map(F: Sheaf, Q: Sheaf, spaces: Dict[Face, np.ndarray]) -> SheafMorphism:
    p = F.p
    maps = {}
    for x, n in F.dims.items():
        T = Q._sub_bases[x]
        stacked = np.concatenate([T, la.as_mat(spaces.get(x, np.zeros((0, n))), p, n)])
        M = np.zeros((T.shape[0], n), dtype=np.int64)
        if T.shape[0]:
            for j in range(n):
                c = la.solve(stacked.T, np.eye(n, dtype=np.int64)[j], p)
                M[:, j] = c[: T.shape[0]]
        maps[x] = M
    return SheafMorphism(F, Q, maps)


def omega_kernel(F: Sheaf, E: np.ndarray, C: Optional[Sheaf] = None) -> np.ndarray:
    """Cochains in C^2(X, C_E) whose classes form a basis of ker(H^2(C_E) -> H^2(F))."""
    p = F.p
    C = subsheaf_C_E(F, E) if C is None else C
    n2 = C.cochain_dim(2)
    if F.X.d < 2 or n2 == 0:
        return np.zeros((0, n2), dtype=np.int64)
    Z = cocycle_basis(C, 2)
    B = coboundary_basis(C, 2)
    R = la.complement(B, p, n2, within=Z)
    if R.shape[0] == 0:
        return np.zeros((0, n2), dtype=np.int64)
    I2 = _cochain_map(_inclusion(C, F), 2)
    img = la.matmul(R, I2.T, p)
    BF = coboundary_basis(F, 2)
    if BF.shape[0]:
        RB, piv = la.rref(BF, p)
        img = la.reduce_mod(img, RB, piv, p)
    coef = la.nullspace(img.T, p, R.shape[0])
    return la.matmul(coef, R, p) if coef.shape[0] else np.zeros((0, n2), dtype=np.int64)


def omega_kernel_dim_alt(F: Sheaf, E: np.ndarray) -> int:
    """dim ker ω as dim(Z^2(C_E) ∩ ι^{-1} B^2(F)) − dim B^2(C_E), eliminating in the other order."""
    p = F.p
    C = subsheaf_C_E(F, E)
    n2 = C.cochain_dim(2)
    if F.X.d < 2 or n2 == 0:
        return 0
    I2 = _cochain_map(_inclusion(C, F), 2)
    BF = coboundary_basis(F, 2)
    # c ∈ C^2(C) with ι c ∈ B^2(F): solve [I2 | -BF^T] (c, b) = 0
    A = np.concatenate([I2, (-BF.T) % p], axis=1) if BF.shape[0] else I2
    N = la.nullspace(A, p, A.shape[1])
    pre = la.row_basis(N[:, :n2], p, n2)
    Z = cocycle_basis(C, 2)
    return la.intersect(Z, pre, p, n2).shape[0] - coboundary_basis(C, 2).shape[0]


def effect_of_E(F: Sheaf, E: np.ndarray) -> dict:
    """Terms of the bounds h^0(F_E) ≥ h^0(F) + dim B_E and h^1(F_E) ≤ h^1(F) − dim H_E + dim ker ω_E.

    The second bound follows from exactness of H^1(F) → H^1(F_E) → H^2(C_E) → H^2(F), whose
    connecting image is ker ω_E. The variant with dim im ω_E is reported as ``bound_ii_im``;
    it can fail.
    """
    p = F.p
    n1 = F.cochain_dim(1)
    E = la.row_basis(E, p, n1)
    hF = cohomology(F).h
    hFE = cohomology(quotient_F_E(F, E)).h
    C = subsheaf_C_E(F, E)
    dimB = la.intersect(E, coboundary_basis(F, 1), p, n1).shape[0]
    dimZ = la.intersect(E, cocycle_basis(F, 1), p, n1).shape[0]
    h2C = cohomology(C).h.get(2, 0)
    kerw = omega_kernel(F, E, C).shape[0]
    imw = h2C - kerw
    out = {"h0_F": hF[0], "h1_F": hF.get(1, 0), "h0_FE": hFE[0], "h1_FE": hFE.get(1, 0),
           "dim_B_E": dimB, "dim_H_E": dimZ - dimB, "dim_im_omega": imw, "dim_ker_omega": kerw}
    out["bound_i"] = out["h0_FE"] >= out["h0_F"] + dimB
    out["bound_ii"] = out["h1_FE"] <= out["h1_F"] - (dimZ - dimB) + kerw
    out["bound_ii_im"] = out["h1_FE"] <= out["h1_F"] - (dimZ - dimB) + imw
    return out


# ---------------------------------------------------------------------------
# the iterative process


@dataclass
class ModificationState:
    """State of the enlargement E_0 ⊆ E_1 ⊆ ... with its dimension trace."""

    F: Sheaf
    E: np.ndarray = field(repr=False)
    E1: np.ndarray = field(repr=False)
    r: int = 1
    trace: List[dict] = field(default_factory=list)
    stop: Optional[str] = None
    seed: Optional[int] = None
    e0_dim: int = 0
    invariants_ok: bool = True

    @property
    def dim_E(self) -> int:
        return self.E.shape[0]


def _random_subspace(rng: np.random.Generator, basis: np.ndarray, dim: int, p: int) -> np.ndarray:
    if dim > basis.shape[0]:
        raise ValueError("requested subspace larger than the ambient space")
    if dim == 0:
        return np.zeros((0, basis.shape[1]), dtype=np.int64)
    c = la.random_full_rank(rng, dim, basis.shape[0], p)
    return la.matmul(c, basis, p)


def _invariants(state: ModificationState) -> bool:
    F, p = state.F, state.F.p
    n1 = F.cochain_dim(1)
    Z, B = cocycle_basis(F, 1), coboundary_basis(F, 1)
    a = la.intersect(state.E, Z, p, n1)
    b = la.intersect(state.E1, Z, p, n1)
    ok = a.shape[0] == b.shape[0] and la.rank(np.concatenate([a, b]), p) == a.shape[0]
    a = la.intersect(state.E, B, p, n1)
    b = la.intersect(state.E1, B, p, n1)
    ok &= a.shape[0] == b.shape[0] and la.rank(np.concatenate([a, b]), p) == a.shape[0]
    return bool(ok)


def _record(state: ModificationState, kerdim: int) -> None:
    h = cohomology(quotient_F_E(state.F, state.E)).h
    state.trace.append({"r": state.r, "dim_E": state.dim_E, "dim_ker_omega": kerdim,
                        "h0_FE": h[0], "h1_FE": h.get(1, 0)})


def process_step(state: ModificationState, rng: np.random.Generator, K: Optional[np.ndarray] = None) -> ModificationState:
    """E_{r+1} = E_r ⊕ E'_r where d_1 maps E'_r bijectively onto representatives of ker ω_r.

    Each lift is the canonical solution of d_1 h = k plus a uniform element of Z^1(X, F).
    """
    F, p = state.F, state.F.p
    C = subsheaf_C_E(F, state.E)
    K = omega_kernel(F, state.E, C) if K is None else K
    if K.shape[0] == 0:
        state.stop = "converged"
        return state
    I2 = _cochain_map(_inclusion(C, F), 2)
    D1 = coboundary_matrix(F, 1)
    Z = cocycle_basis(F, 1)
    lifts = []
    for k in la.matmul(K, I2.T, p):
        h = la.solve(D1, k, p)
        if h is None:
            raise RuntimeError("kernel class is not a coboundary in F: internal inconsistency")
        if Z.shape[0]:
            h = (h + rng.integers(0, p, size=Z.shape[0]) @ Z) % p
        lifts.append(h)
    Ep = np.array(lifts, dtype=np.int64)
    before = state.dim_E
    state.E = la.row_basis(np.concatenate([state.E, Ep]), p, F.cochain_dim(1))
    if state.dim_E != before + K.shape[0]:
        state.invariants_ok = False
    state.r += 1
    state.invariants_ok &= _invariants(state)
    return state


def default_max_e_dim(F: Sheaf) -> float:
    """Q^{-1}(dim F − log_p dim F − log_p |X(0)|) with Q = D_{0,1}."""
    X, p = F.X, F.p
    m = max(F.dim(v) for v in X.faces[0])
    Q = X.degree(0, 1)
    return (m - math.log(m, p) - math.log(X.n_faces(0), p)) / Q


def run_process(F: Sheaf, seed: int = 0, e0_dim: Optional[int] = None, max_E_dim="auto",
                E0: Optional[np.ndarray] = None, max_steps: int = 1000) -> ModificationState:
    """Run the modification process from a random E'_0 ⊆ Z^1(X, F).

    ``max_E_dim`` = "auto" uses :func:`default_max_e_dim`, None disables the cap.
    """
    _require_locally_constant(F)
    rng = np.random.default_rng(seed)
    p = F.p
    n1 = F.cochain_dim(1)
    h = cohomology(F).h
    h0, h1 = h[0], h.get(1, 0)
    empty = np.zeros((0, n1), dtype=np.int64)
    if h1 < h0:
        st = ModificationState(F, empty, empty, r=0, seed=seed, stop="not-needed")
        st.trace.append({"r": 0, "dim_E": 0, "dim_ker_omega": 0, "h0_FE": h0, "h1_FE": h1})
        return st
    s = h1 - h0 + 1 if e0_dim is None else e0_dim
    cap = default_max_e_dim(F) if max_E_dim == "auto" else max_E_dim
    E1 = la.row_basis(E0, p, n1) if E0 is not None else la.row_basis(_random_subspace(rng, cocycle_basis(F, 1), s, p), p, n1)
    st = ModificationState(F, E1.copy(), E1.copy(), r=1, seed=seed, e0_dim=E1.shape[0])
    for _ in range(max_steps):
        C = subsheaf_C_E(F, st.E)
        K = omega_kernel(F, st.E, C)
        _record(st, K.shape[0])
        if K.shape[0] == 0:
            st.stop = "converged"
            break
        if cap is not None and st.dim_E + K.shape[0] > cap:
            st.stop = "max-dim-cap"
            break
        process_step(st, rng, K)
    else:
        st.stop = "budget"
    if st.stop == "converged":
        last = st.trace[-1]
        if not last["h0_FE"] - last["h1_FE"] >= st.e0_dim - (h1 - h0) > 0:
            st.invariants_ok = False
    return st


# ---------------------------------------------------------------------------
# (a1), (a2) and the link identification


def check_a1_a2(F: Sheaf, E: np.ndarray) -> dict:
    """(a1): ⊕_e res_{e<-v}^{-1} E(e) -> F(v) injective at every vertex;
    (a2): E(e)|_t ⊆ E(e')|_t + E(e'')|_t for every triangle t and edge e of t."""
    _require_locally_constant(F)
    p = F.p
    Ee = edge_spaces(F, E)
    a1_bad, a2_bad = [], []
    for (v,) in F.X.faces[0]:
        rows = []
        for e in F.X.cofaces((v,), 1):
            if Ee[e].shape[0]:
                inv = la.inverse(F.restriction((v,), e), p)
                rows.append(la.matmul(Ee[e], inv.T, p))
        if rows:
            S = np.concatenate(rows)
            if la.rank(S, p) != S.shape[0]:
                a1_bad.append((v,))
    if F.X.d >= 2:
        for t in F.X.faces[2]:
            ed = _facets(t)
            img = {e: la.matmul(Ee[e], F.restriction(e, t).T, p) for e in ed}
            for e in ed:
                others = np.concatenate([img[o] for o in ed if o != e])
                if la.rank(np.concatenate([others, img[e]]), p) != la.rank(others, p):
                    a2_bad.append((t, e))
    return {"a1": not a1_bad, "a2": not a2_bad, "a1_witnesses": a1_bad, "a2_witnesses": a2_bad}


def link_quotient_check(F: Sheaf, E: np.ndarray, v: int) -> dict:
    """Compare (F/C_E)_v with A^+/C' (A = F(v), C'(x) = Σ_{u ∈ x} A_u) through φ_x(f) = res_{xv<-v} f."""
    p = F.p
    hyp = check_a1_a2(F, E)
    z = (v,)
    FE = quotient_F_E(F, E)
    spaces = c_e_spaces(F, E)
    FEv, corr = restrict_to_link(FE, z)
    L = FEv.X
    par = L._parent_vertices
    m = F.dim(z)
    Ee = edge_spaces(F, E)
    A_u = {}
    for (u,) in L.faces[0]:
        e = tuple(sorted((v, par[u])))
        inv = la.inverse(F.restriction(z, e), p)
        A_u[u] = la.matmul(Ee[e], inv.T, p) if Ee[e].shape[0] else np.zeros((0, m), dtype=np.int64)
    summ = np.concatenate([A_u[u] for u in A_u] + [np.zeros((0, m), dtype=np.int64)])
    injective_sum = la.rank(summ, p) == summ.shape[0]
    Aplus = constant_sheaf(L, m, p, augmented=True)
    Cp = {x: la.row_basis(np.concatenate([A_u[u] for u in x] + [np.zeros((0, m), dtype=np.int64)]), p, m)
          for x in Aplus.dims}
    Aq = subquotient(Aplus, {}, Cp)
    table, maps = {}, {}
    for k in range(-1, L.d + 1):
        for x, xz in zip(L.faces_of(k), corr[k + 1]):
            T = Aq._sub_bases[x]
            R = F.restriction(z, xz)
            img = la.matmul(T, R.T, p)  # rows: images in F(xz)
            Ty = FE._sub_bases[xz]
            stacked = np.concatenate([Ty, spaces[xz]]) if spaces[xz].shape[0] else Ty
            M = np.zeros((Ty.shape[0], T.shape[0]), dtype=np.int64)
            for j, w in enumerate(img):
                c = la.solve(stacked.T, w, p)
                M[:, j] = c[: Ty.shape[0]]
            maps[x] = M
            r = la.rank(M, p)
            table["-".join(str(par[a]) for a in x) or "()"] = {
                "dim_source": T.shape[0], "dim_target": Ty.shape[0],
                "injective": r == T.shape[0], "surjective": r == Ty.shape[0]}
    phi = SheafMorphism(Aq, FEv, maps)
    bij = all(t["injective"] and t["surjective"] for t in table.values())
    witness = next((k for k, t in table.items() if not t["surjective"] or not t["injective"]), None)
    return {"a1": hyp["a1"], "a2": hyp["a2"], "sum_injective": injective_sum, "compatible": phi.is_compatible(),
            "bijective": bij, "table": table, "witness": witness}


# ---------------------------------------------------------------------------
# cup-product predictor


def er_dimension_threshold(F: Sheaf) -> Fraction:
    """((|X(2)|−|X(1)|+|X(0)|−1) dim F − (h^1−h^0+1)) / (2|X(2)| − |X(1)|)."""
    X = F.X
    h = cohomology(F).h
    m = max(F.dim(v) for v in X.faces[0])
    n0, n1, n2 = X.n_faces(0), X.n_faces(1), X.n_faces(2)
    den = 2 * n2 - n1
    num = (n2 - n1 + n0 - 1) * m - (h.get(1, 0) - h[0] + 1)
    if den == 0:
        raise ValueError("threshold undefined when 2|X(2)| = |X(1)|")
    return Fraction(num, den)


@dataclass
class CupPredictorReport:
    """Kernel of [α] ⊗ f ↦ [α ∪ f] on H^1(X, F_p) ⊗ E'_0 with the cochain-level V_1/U_1 count."""

    kernel_dim: int
    kernel_dim_alt: int
    h1_scalar: int
    e0_dim: int
    threshold: Fraction
    M: Fraction
    V1: Optional[int] = None
    U1: Optional[int] = None
    left_radical_dim: Optional[int] = None
    observed_E1_prime: Optional[int] = None

    @property
    def predicted(self) -> int:
        return self.kernel_dim

    def as_dict(self) -> dict:
        return {"kernel_dim": self.kernel_dim, "kernel_dim_alt": self.kernel_dim_alt, "h1_scalar": self.h1_scalar,
                "e0_dim": self.e0_dim, "threshold": str(self.threshold), "M": str(self.M), "V1": self.V1,
                "U1": self.U1, "V1_minus_U1": None if self.V1 is None else self.V1 - self.U1,
                "left_radical_dim": self.left_radical_dim, "observed_dim_E1_prime": self.observed_E1_prime}


def _mod_B2(F: Sheaf, V: np.ndarray) -> np.ndarray:
    B = coboundary_basis(F, 2)
    if B.shape[0] == 0:
        return V % F.p
    R, piv = la.rref(B, F.p)
    return la.reduce_mod(V, R, piv, F.p)


def _cup_kernel_dim(F: Sheaf, alphas: np.ndarray, fs: np.ndarray) -> int:
    p = F.p
    cols = [cup_product(a, 1, f, 1, F) for a in alphas for f in fs]
    if not cols:
        return 0
    M = _mod_B2(F, np.array(cols, dtype=np.int64))
    return len(cols) - la.rank(M, p)


def cup_predictor(F: Sheaf, E0p: np.ndarray, cochain_level: bool = True, seed: int = 0) -> CupPredictorReport:
    """Predicted dim E'_1 from the cup product, cross-checked with a second set of representatives."""
    p = F.p
    X = F.X
    E0p = la.row_basis(E0p, p, F.cochain_dim(1))
    if la.matmul(E0p, coboundary_matrix(F, 1).T, p).any():
        raise ValueError("E'_0 must consist of cocycles")
    S = constant_sheaf(X, 1, p)
    HS = cohomology(S)
    alphas = HS.reps.get(1, np.zeros((0, X.n_faces(1)), dtype=np.int64))
    kd = _cup_kernel_dim(F, alphas, E0p)
    rng = np.random.default_rng(seed)
    BS = coboundary_basis(S, 1)
    alt_alphas = alphas.copy()
    if BS.shape[0] and alphas.shape[0]:
        alt_alphas = (alphas + rng.integers(0, p, size=(alphas.shape[0], BS.shape[0])) @ BS) % p
    kd_alt = _cup_kernel_dim(F, alt_alphas[::-1], E0p[::-1])
    thr = er_dimension_threshold(F)
    rep = CupPredictorReport(kd, kd_alt, alphas.shape[0], E0p.shape[0], thr, thr - E0p.shape[0])
    if cochain_level and X.d >= 2:
        n1s = X.n_faces(1)
        s = E0p.shape[0]
        # V_1: (α'_1..α'_s) ∈ C^1(X,F_p)^s with Σ α'_j ∪ f'_j ∈ B^2(F)
        basis_alpha = np.eye(n1s, dtype=np.int64)
        cols = [cup_product(a, 1, f, 1, F) for f in E0p for a in basis_alpha]
        M = _mod_B2(F, np.array(cols, dtype=np.int64)) if cols else np.zeros((0, F.cochain_dim(2)), dtype=np.int64)
        V = la.nullspace(M.T, p, s * n1s) if cols else np.zeros((0, 0), dtype=np.int64)
        # left radical L(F): α with α ∪ f = 0 for every f ∈ C^1(X, F)
        n1 = F.cochain_dim(1)
        big = np.array([[cup_product(a, 1, e, 1, F) for e in np.eye(n1, dtype=np.int64)] for a in basis_alpha])
        Lrad = la.nullspace(big.reshape(n1s, -1).T % p, p, n1s)
        W = la.row_basis(np.concatenate([BS, Lrad]), p, n1s)
        Ws = np.zeros((s * W.shape[0], s * n1s), dtype=np.int64)
        for j in range(s):
            Ws[j * W.shape[0]:(j + 1) * W.shape[0], j * n1s:(j + 1) * n1s] = W
        U = la.intersect(V, Ws, p, s * n1s) if V.shape[0] and Ws.shape[0] else np.zeros((0, s * n1s), dtype=np.int64)
        rep.V1, rep.U1, rep.left_radical_dim = V.shape[0], U.shape[0], Lrad.shape[0]
    return rep


# ---------------------------------------------------------------------------
# counit kernel


def counit_kernel_sheaf(u, p: int = 2) -> Sheaf:
    """ker(u_* F_Y -> F_X), the fiberwise sum map, for a covering u of connected complexes."""
    G = constant_sheaf(u.source, 1, p)
    P = pushforward(u, G)
    target = constant_sheaf(u.target, 1, p)
    maps = {x: (np.ones((target.dims[x], P.dims[x]), dtype=np.int64)) for x in P.dims}
    return SheafMorphism(P, target, maps).kernel()
