"""Sheaves of F_p-vector spaces on simplicial complexes."""

from __future__ import annotations

import itertools
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg as la
from .complex import Face, SimplicialComplex

__all__ = [
    "Sheaf",
    "SheafError",
    "SheafMorphism",
    "constant_sheaf",
    "zero_restriction_sheaf",
    "subquotient",
    "quotient",
    "subsheaf",
    "product",
    "restrict_to_link",
    "random_sheaf",
    "expander_code_sheaf",
    "one_cocycle_sheaf",
    "general_position_ok",
    "pullback",
    "pushforward",
    "fibers",
]


class SheafError(ValueError):
    """Invalid sheaf data; ``witness`` holds the offending faces when known."""

    def __init__(self, msg: str, witness=None):
        super().__init__(msg)
        self.witness = witness


def _facets(y: Face) -> List[Face]:
    return [y[:i] + y[i + 1:] for i in range(len(y))]


class Sheaf:
    """A sheaf on X over F_p given by codimension-1 restriction matrices.

    ``dims[x]`` is dim F(x); ``res[(x, y)]`` is the dim F(y) x dim F(x) matrix of
    res_{y<-x} for every facet x of y.  An augmented sheaf also carries F(∅)
    (the face ``()``) and the maps F(∅) -> F(v).
    """

    def __init__(self, X: SimplicialComplex, p: int, dims: Dict[Face, int],
                 res: Dict[Tuple[Face, Face], np.ndarray], augmented: bool = False):
        self.X = X
        self.p = int(p)
        self.augmented = bool(augmented)
        self.dims: Dict[Face, int] = {}
        for k in range(-1, X.d + 1):
            for x in X.faces_of(k):
                self.dims[x] = int(dims.get(x, 0))
        if not augmented:
            self.dims[()] = 0
        self.res: Dict[Tuple[Face, Face], np.ndarray] = {}
        for k in range(0, X.d + 1):
            for y in X.faces[k]:
                for x in _facets(y):
                    shape = (self.dims[y], self.dims[x])
                    M = res.get((x, y)) if (x or augmented) else None
                    if M is None:
                        if 0 in shape:
                            M = np.zeros(shape, dtype=np.int64)
                        else:
                            raise SheafError(f"missing restriction {x} -> {y}", (x, y))
                    M = np.asarray(M, dtype=np.int64).reshape(shape) % self.p
                    self.res[(x, y)] = M
        self._full: Dict[Tuple[Face, Face], np.ndarray] = {}
        self._offsets: Dict[int, np.ndarray] = {}

    # -- data access -----------------------------------------------------
    def dim(self, x: Sequence[int]) -> int:
        return self.dims[tuple(x)]

    def restriction(self, x: Sequence[int], y: Sequence[int]) -> np.ndarray:
        """res_{y<-x} for x ⊆ y, composed by adding missing vertices in increasing order."""
        x, y = tuple(x), tuple(y)
        key = (x, y)
        M = self._full.get(key)
        if M is not None:
            return M
        if x == y:
            M = np.eye(self.dims[x], dtype=np.int64)
        elif len(y) == len(x) + 1:
            M = self.res[key]
        else:
            missing = sorted(set(y) - set(x))
            if len(missing) != len(y) - len(x):
                raise KeyError(f"{x} is not a subface of {y}")
            cur = x
            M = np.eye(self.dims[x], dtype=np.int64)
            for v in missing:
                nxt = tuple(sorted(cur + (v,)))
                M = la.matmul(self.res[(cur, nxt)], M, self.p)
                cur = nxt
        self._full[key] = M
        return M

    def offsets(self, k: int) -> np.ndarray:
        """Start index of each k-face block inside a k-cochain vector (length |X(k)|+1)."""
        o = self._offsets.get(k)
        if o is None:
            ds = [self.dims[x] for x in self.X.faces_of(k)]
            o = np.concatenate([[0], np.cumsum(ds)]).astype(np.int64) if ds else np.zeros(1, dtype=np.int64)
            self._offsets[k] = o
        return o

    def cochain_dim(self, k: int) -> int:
        if k == -1 and not self.augmented:
            return 0
        return int(self.offsets(k)[-1])

    def face_groups(self, k: int) -> np.ndarray:
        """Coordinate -> k-face index map for a k-cochain vector."""
        ds = [self.dims[x] for x in self.X.faces_of(k)] if (k >= 0 or self.augmented) else []
        return np.repeat(np.arange(len(ds), dtype=np.int64), ds)

    def value(self, f: np.ndarray, x: Sequence[int]) -> np.ndarray:
        x = tuple(x)
        k = len(x) - 1
        o = self.offsets(k)
        i = self.X.face_index(x)
        return f[o[i]:o[i + 1]]

    # -- checks ------------------------------------------------------------
    def validate(self) -> Optional[Tuple[Face, Face, Face, Face]]:
        """Return None if every codim-2 square commutes, else the (x, y1, y2, z) witness."""
        for k in range(-1 if self.augmented else 0, self.X.d - 1):
            for z in self.X.faces_of(k + 2):
                for i, j in itertools.combinations(range(len(z)), 2):
                    x = tuple(v for t, v in enumerate(z) if t not in (i, j))
                    y1 = z[:i] + z[i + 1:]
                    y2 = z[:j] + z[j + 1:]
                    a = la.matmul(self.res[(y1, z)], self.res[(x, y1)], self.p)
                    b = la.matmul(self.res[(y2, z)], self.res[(x, y2)], self.p)
                    if not np.array_equal(a, b):
                        return (x, y1, y2, z)
        return None

    def check(self) -> "Sheaf":
        w = self.validate()
        if w is not None:
            raise SheafError(f"restrictions do not commute on square {w}", w)
        return self

    def is_locally_constant(self) -> bool:
        for (x, y), M in self.res.items():
            if not x:
                continue
            if M.shape[0] != M.shape[1] or la.rank(M, self.p) != M.shape[0]:
                return False
        return True

    def __repr__(self) -> str:
        tot = [self.cochain_dim(k) for k in range(self.X.d + 1)]
        return f"Sheaf(p={self.p}, augmented={self.augmented}, dim C^k={tot})"


class SheafMorphism:
    """Per-face matrices phi_x : F(x) -> G(x) commuting with restrictions."""

    def __init__(self, source: Sheaf, target: Sheaf, maps: Dict[Face, np.ndarray]):
        self.source, self.target = source, target
        p = source.p
        self.maps = {x: np.asarray(maps.get(x, np.zeros((target.dims[x], source.dims[x]))), dtype=np.int64).reshape(
            target.dims[x], source.dims[x]) % p for x in source.dims}

    def is_compatible(self) -> bool:
        p = self.source.p
        for (x, y), R in self.source.res.items():
            if not x and not (self.source.augmented and self.target.augmented):
                continue
            a = la.matmul(self.maps[y], R, p)
            b = la.matmul(self.target.res[(x, y)], self.maps[x], p)
            if not np.array_equal(a, b):
                return False
        return True

    def is_isomorphism(self) -> bool:
        p = self.source.p
        for x, M in self.maps.items():
            if M.shape[0] != M.shape[1] or la.rank(M, p) != M.shape[0]:
                return False
        return self.is_compatible()

    def kernel(self) -> Sheaf:
        p = self.source.p
        S = {x: la.nullspace(M, p, self.source.dims[x]) for x, M in self.maps.items()}
        return subsheaf(self.source, S)


# ---------------------------------------------------------------------------
# constructors


def constant_sheaf(X: SimplicialComplex, m: int = 1, p: int = 2, augmented: bool = False) -> Sheaf:
    """F(x) = F_p^m with identity restrictions."""
    dims = {x: m for k in range(X.d + 1) for x in X.faces[k]}
    if augmented:
        dims[()] = m
    I = np.eye(m, dtype=np.int64)
    res = {(x, y): I for k in range(X.d + 1) for y in X.faces[k] for x in _facets(y)}
    return Sheaf(X, p, dims, res, augmented)


def zero_restriction_sheaf(X: SimplicialComplex, vertex_dim: int, p: int = 2, other_dim: int = 1) -> Sheaf:
    """F(v) = F_p^vertex_dim, F(x) = F_p^other_dim otherwise, all restriction maps zero."""
    dims = {x: (vertex_dim if k == 0 else other_dim) for k in range(X.d + 1) for x in X.faces[k]}
    res = {(x, y): np.zeros((dims[y], dims[x]), dtype=np.int64)
           for k in range(1, X.d + 1) for y in X.faces[k] for x in _facets(y)}
    return Sheaf(X, p, dims, res, False)


def _quotient_basis(S: np.ndarray, C: np.ndarray, p: int, n: int):
    """Rows T completing span(C) to span(S), and a solver for coordinates modulo C."""
    C = la.row_basis(C, p, n)
    T = la.complement(C, p, n, within=S)
    stacked = np.concatenate([T, C], axis=0) if C.shape[0] else T
    return T, C, stacked


def subquotient(F: Sheaf, S: Dict[Face, np.ndarray], C: Dict[Face, np.ndarray]) -> Sheaf:
    """The sheaf x -> S(x)/C(x) for restriction-closed subspaces C(x) ⊆ S(x) ⊆ F(x).

    Subspaces are given by spanning rows; quotient bases are completions of C in S.
    """
    p = F.p
    data = {}
    for x, n in F.dims.items():
        Sx = la.as_mat(S.get(x, np.eye(n, dtype=np.int64)), p, n)
        Cx = la.as_mat(C.get(x, np.zeros((0, n), dtype=np.int64)), p, n)
        if Cx.shape[0] and la.rank(np.concatenate([Sx, Cx]), p) != la.rank(Sx, p):
            raise SheafError(f"C not contained in S at {x}", x)
        data[x] = _quotient_basis(Sx, Cx, p, n)
    dims = {x: data[x][0].shape[0] for x in F.dims}
    res = {}
    for (x, y), R in F.res.items():
        Tx = data[x][0]
        Ty, Cy, stacked = data[y]
        img = la.matmul(Tx, R.T, p)  # rows: images of the basis vectors of S(x)/C(x)
        M = np.zeros((Ty.shape[0], Tx.shape[0]), dtype=np.int64)
        for j, v in enumerate(img):
            if not v.any():
                continue
            c = la.solve(stacked.T, v, p) if stacked.shape[0] else None
            if c is None:
                raise SheafError(f"subspace not closed under restriction {x} -> {y}", (x, y))
            M[:, j] = c[: Ty.shape[0]]
        res[(x, y)] = M
    out = Sheaf(F.X, p, dims, res, F.augmented)
    out._sub_bases = {x: data[x][0] for x in F.dims}
    return out


def subsheaf(F: Sheaf, S: Dict[Face, np.ndarray]) -> Sheaf:
    """Restriction-closed subsheaf with basis completions of 0 in S(x)."""
    return subquotient(F, S, {})


def quotient(F: Sheaf, C: Dict[Face, np.ndarray]) -> Sheaf:
    """F / C for a restriction-closed subsheaf C (given by spanning rows per face)."""
    return subquotient(F, {}, C)


def product(F: Sheaf, G: Sheaf) -> Sheaf:
    """F x G with block-diagonal restrictions."""
    if F.X is not G.X or F.p != G.p:
        raise SheafError("product needs the same complex and field")
    dims = {x: F.dims[x] + G.dims[x] for x in F.dims}
    res = {}
    for key, A in F.res.items():
        B = G.res[key]
        M = np.zeros((A.shape[0] + B.shape[0], A.shape[1] + B.shape[1]), dtype=np.int64)
        M[: A.shape[0], : A.shape[1]] = A
        M[A.shape[0]:, A.shape[1]:] = B
        res[key] = M
    return Sheaf(F.X, F.p, dims, res, F.augmented or G.augmented)


def restrict_to_link(F: Sheaf, z: Sequence[int]):
    """Augmented sheaf F_z on the link X_z, F_z(x) = F(x ∪ z); returns (F_z, corr)."""
    z = tuple(sorted(z))
    if not z:
        return F, [list(F.X.faces_of(k)) for k in range(-1, F.X.d + 1)]
    L, corr = F.X.link(z)
    up = {}
    for k in range(-1, L.d + 1):
        for x, xz in zip(L.faces_of(k), corr[k + 1]):
            up[x] = xz
    dims = {x: F.dims[up[x]] for x in up}
    res = {}
    for k in range(0, L.d + 1):
        for y in L.faces[k]:
            for x in _facets(y):
                res[(x, y)] = F.res[(up[x], up[y])]
    Fz = Sheaf(L, F.p, dims, res, augmented=True)
    return Fz, corr


def random_sheaf(X: SimplicialComplex, rng: np.random.Generator, p: int = 2, ambient: int = 3,
                 augmented: bool = False, density: float = 0.5) -> Sheaf:
    """Random valid sheaf: a subquotient of the constant sheaf F_p^ambient with random face bases.

    Subspaces S ⊇ C grow along inclusions, so every restriction is well defined.
    """
    faces = ([()] if augmented else []) + [x for k in range(X.d + 1) for x in X.faces[k]]
    gen_S, gen_C = {}, {}
    for x in faces:
        ns = int(rng.binomial(ambient, density / max(1, len(x)) ** 2))
        nc = int(rng.binomial(1, density / (2 + 2 * len(x))))
        gen_S[x] = la.random_matrix(rng, ns, ambient, p)
        gen_C[x] = la.random_matrix(rng, nc, ambient, p)
    S, C = {}, {}
    for x in faces:
        subs = [s for r in range(len(x) + 1) for s in itertools.combinations(x, r)]
        if not augmented:
            subs = [s for s in subs if s]
        Cx = np.concatenate([gen_C[s] for s in subs] + [np.zeros((0, ambient), dtype=np.int64)], axis=0)
        Sx = np.concatenate([gen_S[s] for s in subs] + [Cx], axis=0)
        S[x], C[x] = Sx, Cx
    base = constant_sheaf(X, ambient, p, augmented)
    G = subquotient(base, S, C)
    return change_bases(G, rng)


def change_bases(F: Sheaf, rng: np.random.Generator) -> Sheaf:
    """Conjugate every stalk by a random invertible matrix (an isomorphic sheaf)."""
    p = F.p
    P = {x: la.random_full_rank(rng, n, n, p) if n else np.zeros((0, 0), dtype=np.int64) for x, n in F.dims.items()}
    Pinv = {x: la.inverse(M, p) if M.size else M for x, M in P.items()}
    res = {(x, y): la.matmul(la.matmul(P[y], R, p), Pinv[x], p) for (x, y), R in F.res.items()}
    return Sheaf(F.X, p, F.dims, res, F.augmented)


def expander_code_sheaf(X: SimplicialComplex, T: Dict[int, np.ndarray], p: int = 2) -> Sheaf:
    """Sheaf of a sheafy expander code on a k-regular graph.

    ``T[v]`` is an injective k x m matrix whose rows are indexed by the edges at v
    in increasing order; F(v) = F^m, F(e) = F and res_{e<-v} is the row of T[v] for e.
    """
    if X.d != 1:
        raise SheafError("expander-code sheaves live on graphs")
    dims: Dict[Face, int] = {}
    res = {}
    for (v,) in X.faces[0]:
        M = la.as_mat(T[v], p)
        if la.rank(M, p) != M.shape[1]:
            raise SheafError(f"T[{v}] is not injective", (v,))
        edges = X.cofaces((v,), 1)
        if M.shape[0] != len(edges):
            raise SheafError(f"T[{v}] must have one row per edge at {v}", (v,))
        dims[(v,)] = M.shape[1]
        for row, e in zip(M, edges):
            dims[e] = 1
            res[((v,), e)] = row.reshape(1, -1)
    return Sheaf(X, p, dims, res, False)


def one_cocycle_sheaf(F: Sheaf, U: Dict[Face, np.ndarray]) -> Sheaf:
    """G ⊆ F with G(v) = 0, G(e) = U(e) and G(x) = F(x) for dim x ≥ 2."""
    S = {}
    for x, n in F.dims.items():
        if len(x) <= 1:
            S[x] = np.zeros((0, n), dtype=np.int64)
        elif len(x) == 2:
            S[x] = la.as_mat(U[x], F.p, n)
        else:
            S[x] = np.eye(n, dtype=np.int64)
    return subsheaf(F, S)


def general_position_ok(F: Sheaf, U: Dict[Face, np.ndarray], r: int) -> bool:
    """For every vertex v and edge set S at v with |S| r ≥ m: ∩_{e∈S} res^{-1}(U(e)) = 0."""
    p = F.p
    X = F.X
    for (v,) in X.faces[0]:
        m = F.dims[(v,)]
        edges = X.cofaces((v,), 1)
        pre = {}
        for e in edges:
            R = F.res[((v,), e)]
            # res^{-1}(U(e)) = {a : R a ∈ U(e)} = ker of (projection onto complement of U(e)) ∘ R
            Ue = la.row_basis(U[e], p, F.dims[e])
            Nperp = la.nullspace(Ue, p, F.dims[e]) if Ue.shape[0] else np.eye(F.dims[e], dtype=np.int64)
            pre[e] = la.nullspace(la.matmul(Nperp, R, p), p, m)
        for size in range(1, len(edges) + 1):
            if size * r < m:
                continue
            for Sset in itertools.combinations(edges, size):
                cur = np.eye(m, dtype=np.int64)
                for e in Sset:
                    cur = la.intersect(cur, pre[e], p, m)
                    if cur.shape[0] == 0:
                        break
                if cur.shape[0]:
                    return False
    return True


# ---------------------------------------------------------------------------
# transport along simplicial maps (duck-typed: ``source``, ``target``, ``image``)


def pullback(u, F: Sheaf) -> Sheaf:
    """(u^*F)(y) = F(u(y)) with restriction matrices copied along u."""
    Y = u.source
    dims = {}
    res = {}
    for k in range(-1, Y.d + 1):
        for y in Y.faces_of(k):
            dims[y] = F.dims[u.image(y)]
    for k in range(0, Y.d + 1):
        for y in Y.faces[k]:
            uy = u.image(y)
            if len(uy) != len(y):
                raise SheafError("pullback needs a dimension-preserving map", y)
            for x in _facets(y):
                res[(x, y)] = F.res[(u.image(x), uy)]
    return Sheaf(Y, F.p, dims, res, F.augmented)


def fibers(u) -> Dict[Face, List[Face]]:
    """Target face -> source faces over it, in source order."""
    out: Dict[Face, List[Face]] = {x: [] for k in range(-1, u.target.d + 1) for x in u.target.faces_of(k)}
    for k in range(-1, u.source.d + 1):
        for y in u.source.faces_of(k):
            uy = u.image(y)
            if len(uy) != len(y):
                raise SheafError("map is not dimension-preserving", y)
            out[uy].append(y)
    return out


def pushforward(u, G: Sheaf) -> Sheaf:
    """(u_*G)(x) = ⊕_{y over x} G(y); restrictions routed through the facet of y' over x."""
    X = u.target
    fib = fibers(u)
    dims = {x: sum(G.dims[y] for y in fib[x]) for x in fib}
    res = {}
    for k in range(0, X.d + 1):
        for x2 in X.faces[k]:
            off2 = np.cumsum([0] + [G.dims[y] for y in fib[x2]])
            for x in _facets(x2):
                off = np.cumsum([0] + [G.dims[y] for y in fib[x]])
                pos = {y: i for i, y in enumerate(fib[x])}
                M = np.zeros((dims[x2], dims[x]), dtype=np.int64)
                for j, y2 in enumerate(fib[x2]):
                    for y in _facets(y2):
                        if u.image(y) == x:
                            i = pos[y]
                            M[off2[j]:off2[j + 1], off[i]:off[i + 1]] = G.res[(y, y2)]
                res[(x, x2)] = M
    out = Sheaf(X, G.p, dims, res, G.augmented)
    out._fibers = fib
    return out
