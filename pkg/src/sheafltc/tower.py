"""Rate conservation along towers of double covers, the diagonal filtration of u_*u^*F
and the three-condition audit at k = 0."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np

from . import linalg as la
from .codes import decode_radius
from .complex import spectral_expansion
from .covering import CoveringError, Tower, TowerError, build_tower
from .expansion import (INF, cosystolic_expansion, dim2_conditions, local_coboundary_expansion,
                        local_skeleton_expansion, local_to_global_constants)
from .homology import cocycle_basis, cohomology, les_dimension_check
from .sheaf import Sheaf, SheafMorphism, pullback, pushforward, subsheaf

__all__ = [
    "filtration_check",
    "RateTrace",
    "rate_conservation",
    "AuditReport",
    "audit",
]


def _num(x):
    if x == INF:
        return "inf"
    if isinstance(x, Fraction):
        return str(x)
    return x


def filtration_check(u, F: Sheaf) -> dict:
    """0 -> F -> u_*u^*F -> F -> 0 with φ(f) = (f, f) and ψ(f, g) = f − g, for a double cover u."""
    if F.p != 2:
        raise ValueError("the diagonal filtration needs characteristic 2")
    if getattr(u, "degree", None) != 2:
        raise CoveringError("filtration needs a degree-2 (hence C_2-Galois) covering")
    G = pushforward(u, pullback(u, F))
    phi, psi = {}, {}
    for x, n in F.dims.items():
        I = np.eye(n, dtype=np.int64)
        phi[x] = np.concatenate([I, I], axis=0)
        psi[x] = np.concatenate([I, I], axis=1)  # f − g = f + g over F_2
    Phi = SheafMorphism(F, G, phi)
    Psi = SheafMorphism(G, F, psi)
    F1 = subsheaf(G, {x: phi[x].T for x in F.dims})
    # F_1 ≅ F via φ co-restricted, G/F_1 ≅ F via ψ
    incl = SheafMorphism(F, F1, {x: np.eye(F.dims[x], dtype=np.int64) for x in F.dims})
    les = les_dimension_check(Phi, Psi)
    hG, hF = cohomology(G).h, cohomology(F).h
    additive = all(hG.get(i, 0) <= 2 * hF.get(i, 0) for i in hG)
    return {
        "dims": {"-".join(map(str, x)) or "()": [G.dims[x], F1.dims[x], G.dims[x] - F1.dims[x]] for x in F.dims},
        "phi_compatible": Phi.is_compatible(),
        "psi_compatible": Psi.is_compatible(),
        "F1_iso_F": incl.is_isomorphism() and incl.is_compatible(),
        "quotient_iso_F": Psi.is_compatible() and all(la.rank(psi[x], 2) == F.dims[x] for x in F.dims),
        "exact": les["exact"],
        "les": les,
        "h_additive": additive,
        "h": {"F2prime": hG, "F": hF},
    }


@dataclass
class RateTrace:
    """Per-level dims of C^k, h^k and h^{k+1} for the pulled-back sheaves along a tower."""

    k: int
    levels: List[dict] = field(default_factory=list)
    rho: Fraction = Fraction(0)
    base_gap: int = 0
    ok: bool = True
    failure: Optional[str] = None

    def as_dict(self) -> dict:
        return {"k": self.k, "rho": str(self.rho), "base_gap": self.base_gap, "ok": self.ok,
                "failure": self.failure, "levels": self.levels}


def rate_conservation(X, F: Sheaf, tower: Tower, k: int = 0) -> RateTrace:
    """Check h^k − h^{k+1} ≥ 2^r (h^k − h^{k+1})(X) and dim Z^k ≥ ρ dim C^k at every level."""
    tr = RateTrace(k)
    Fr = F
    for r in range(len(tower.maps) + 1):
        if r > 0:
            Fr = pullback(tower.maps[r - 1], Fr)
        h = cohomology(Fr).h
        if k >= 1 and h.get(k - 1, 0) != 0:
            tr.ok = False
            tr.failure = f"h^{k - 1} != 0 at level {r}"
            break
        n = Fr.cochain_dim(k)
        gap = h.get(k, 0) - h.get(k + 1, 0)
        dimZ = cocycle_basis(Fr, k).shape[0]
        if r == 0:
            tr.base_gap = gap
            tr.rho = Fraction(gap, n) if n else Fraction(0)
        lv = {"r": r, "dim_C": n, "h_k": h.get(k, 0), "h_k1": h.get(k + 1, 0), "gap": gap,
              "bound": 2 ** r * tr.base_gap, "dim_Z": dimZ}
        lv["gap_ok"] = gap >= 2 ** r * tr.base_gap
        lv["rate_ok"] = tr.rho <= 0 or dimZ >= tr.rho * n
        lv["doubling_ok"] = r == 0 or n == 2 * tr.levels[-1]["dim_C"]
        tr.levels.append(lv)
        tr.ok &= lv["gap_ok"] and lv["rate_ok"] and lv["doubling_ok"]
    return tr


@dataclass
class AuditReport:
    """Verdicts on the three conditions, each with its evidence."""

    t1: dict
    t2: dict
    t3: dict
    eps: object = None
    delta: object = None
    eta: object = None

    @property
    def overall(self) -> bool:
        return bool(self.t1["ok"] and self.t2["strict"] and self.t3["ok"])

    @property
    def overall_measured(self) -> bool:
        return bool(self.t1["ok"] and self.t2["measured"] and self.t3["ok"])

    def verdicts(self) -> dict:
        return {"t1": self.t1["ok"], "t2": self.t2["measured"], "t3": self.t3["ok"]}

    def as_dict(self) -> dict:
        return {"t1": self.t1, "t2": self.t2, "t3": self.t3, "overall": self.overall,
                "overall_measured": self.overall_measured,
                "granted": {"eps": _num(self.eps), "delta": _num(self.delta), "eta": _num(self.eta)}}


def audit(X, F: Sheaf, depth: int = 3, seed: int = 0, budget: Optional[int] = None) -> AuditReport:
    """Audit (t1) tower, (t2) local expansion, (t3) h^0 > h^1 for k = 0 over F_2.

    t2 is reported twice: ``strict`` feeds measured local constants into the local-to-global
    inequalities (or the dimension-2 corollary); ``measured`` asks that every link be a
    coboundary expander at all and that (X, F) itself expand cosystolically in dimension 0.
    """
    if F.p != 2:
        raise ValueError("the audit works over F_2")
    vd = {F.dim(v) for v in X.faces[0]}
    if len(vd) != 1:
        raise ValueError("dim F(v) must be constant on vertices")
    # t1
    try:
        tw = build_tower(X, depth, seed)
        t1 = {"ok": True, "depth": depth, "classes": tw.classes,
              "f_vectors": [L.f_vector() for L in tw.levels]}
    except TowerError as e:
        t1 = {"ok": False, "stage": e.stage, "reason": str(e)}
    # t2: local constants (k = 0)
    eps0, tab0 = local_coboundary_expansion(F, 0, 0, budget)
    epsp0, tabp0 = local_coboundary_expansion(F, 0, 1, budget)
    epsp1, tabp1 = local_coboundary_expansion(F, 1, 1, budget)
    lam = -np.inf
    for z in X.faces[0]:
        L = X.link(z)[0]
        if L.d >= 1:
            lam = max(lam, spectral_expansion(L).lam_max)
    a_m1 = local_skeleton_expansion(X, -1)
    a_0 = local_skeleton_expansion(X, 0)
    lg = local_to_global_constants(0, [eps0], [epsp0, epsp1], X.Q, X.d, lam=float(lam), alphas=[a_m1])
    d2 = dim2_conditions(eps0, epsp0, epsp1, a_m1, a_0, lam=float(lam))
    strict_thm = bool(lg.get("lambda_ok")) and all(e != 0 for e in (eps0, epsp0, epsp1))
    strict = strict_thm or d2["skeleton"] or bool(d2.get("spectral"))
    local_ok = all(e > 0 for e in (eps0, epsp0, epsp1)) and lam < 1
    measured, direct = local_ok, {"skipped": "local expansion already fails"}
    if local_ok:
        try:
            cse = cosystolic_expansion(F, 0, "ws", budget=budget)
            direct = {"eps": _num(cse.eps), "delta": _num(cse.delta)}
            measured = cse.eps > 0 and cse.delta > 0
        except ValueError as e:
            direct = {"skipped": str(e)}
    t2 = {"strict": strict, "measured": bool(measured),
          "strict_theorem": strict_thm, "dim2_corollary": d2["skeleton"], "dim2_spectral": bool(d2.get("spectral")),
          "eps0": _num(eps0), "eps_prime0": _num(epsp0), "eps_prime1": _num(epsp1), "lambda": float(lam),
          "lambda_threshold": lg["lambda_threshold"], "alpha_m1": str(a_m1), "alpha_0": str(a_0),
          "measured_cosystolic": direct,
          "links": {"dim0": {k: _num(v) for k, v in tab0.items()}, "dim1_vertices": {k: _num(v) for k, v in tabp0.items()},
                    "dim1_edges": {k: _num(v) for k, v in tabp1.items()}}}
    h = cohomology(F).h
    t3 = {"ok": h[0] > h.get(1, 0), "h0": h[0], "h1": h.get(1, 0)}
    rep = AuditReport(t1, t2, t3)
    if strict and "cosystolic" in lg:
        rep.eps = lg["cosystolic"]["eps"]
        rep.delta = lg["cosystolic"]["delta"]
        rep.eta = decode_radius(F, 0, rep.delta, rep.delta)
    return rep
