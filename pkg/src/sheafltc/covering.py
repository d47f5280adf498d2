"""Simplicial maps, covering verification, double covers and towers of double covers."""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence

import numpy as np

from . import linalg as la
from .complex import Face, SimplicialComplex
from .homology import coboundary_matrix, cohomology
from .sheaf import constant_sheaf, fibers

__all__ = [
    "SimplicialMap",
    "CoveringMap",
    "CoveringError",
    "Tower",
    "identity_map",
    "verify_covering",
    "double_cover_from_cocycle",
    "cyclic_cover_from_cocycle",
    "build_tower",
    "deck_transformation",
    "compose",
]


class CoveringError(ValueError):
    def __init__(self, msg: str, witness=None):
        super().__init__(msg)
        self.witness = witness


class SimplicialMap:
    """Vertex map from ``source`` to ``target`` (label indices) sending faces to faces."""

    def __init__(self, source: SimplicialComplex, target: SimplicialComplex, vertex_map: Sequence[int]):
        self.source, self.target = source, target
        self.vmap = [int(v) for v in vertex_map]
        for k in range(source.d + 1):
            for y in source.faces[k]:
                if self.image(y) not in target:
                    raise CoveringError(f"image of {y} is not a face", y)

    def image(self, y: Sequence[int]) -> Face:
        return tuple(sorted({self.vmap[v] for v in y}))

    def is_dimension_preserving(self) -> bool:
        return all(len(self.image(y)) == len(y) for k in range(self.source.d + 1) for y in self.source.faces[k])


class CoveringMap(SimplicialMap):
    """A verified covering with its degree and fiber index."""

    degree: int
    fiber: Dict[Face, List[Face]]


def identity_map(X: SimplicialComplex) -> SimplicialMap:
    return SimplicialMap(X, X, range(X.n_vertices))


def compose(g: SimplicialMap, f: SimplicialMap) -> SimplicialMap:
    """g ∘ f."""
    return SimplicialMap(f.source, g.target, [g.vmap[v] for v in f.vmap])


def verify_covering(f: SimplicialMap) -> CoveringMap:
    """Check the star bijection at every vertex and return the covering with degree and fibers."""
    Y, X = f.source, f.target
    if not f.is_dimension_preserving():
        bad = next(y for k in range(Y.d + 1) for y in Y.faces[k] if len(f.image(y)) != len(y))
        raise CoveringError(f"map collapses face {bad}", bad)
    hit = {f.image(y) for k in range(Y.d + 1) for y in Y.faces[k]}
    for k in range(X.d + 1):
        for x in X.faces[k]:
            if x not in hit:
                raise CoveringError(f"face {x} of the target is not covered", x)
    for (v,) in Y.faces[0]:
        up = [y for k in range(1, Y.d + 1) for y in Y.faces[k] if v in y]
        img = [f.image(y) for y in up]
        fv = f.vmap[v]
        target_star = [x for k in range(1, X.d + 1) for x in X.faces[k] if fv in x]
        if len(set(img)) != len(img) or set(img) != set(target_star):
            raise CoveringError(f"star of vertex {v} does not map bijectively", (v,))
    fib = fibers(f)
    sizes = {len(fib[x]) for k in range(X.d + 1) for x in X.faces[k]}
    out = CoveringMap.__new__(CoveringMap)
    out.source, out.target, out.vmap = Y, X, f.vmap
    out.fiber = fib
    out.degree = min(sizes) if len(sizes) == 1 or not X.is_connected else -1
    if len(sizes) != 1 and X.is_connected:
        raise CoveringError("fiber sizes differ over a connected target", sorted(sizes))
    out.degree = min(sizes)
    return out


def _edge_value(X: SimplicialComplex, z: np.ndarray, a: int, b: int) -> int:
    if a == b:
        return 0
    return int(z[X.index[1][(min(a, b), max(a, b))]])


def cyclic_cover_from_cocycle(X: SimplicialComplex, z, m: int) -> CoveringMap:
    """Degree-m cyclic cover twisted by an integer-valued 1-cocycle mod m (vertex (v, s) -> index v*m + s).

    The lift of x = (v0 < ... < vk) on sheet s puts vj on sheet s + z(v0 vj) mod m; for
    m = 2 this is a C_2-Galois double cover.
    """
    z = np.asarray(z, dtype=np.int64) % m
    if X.d >= 2:
        for (a, b, c) in X.faces[2]:
            if (_edge_value(X, z, a, b) + _edge_value(X, z, b, c) - _edge_value(X, z, a, c)) % m:
                raise CoveringError(f"not a cocycle on triangle {(a, b, c)}", (a, b, c))
    labels = [(lab, s) for lab in X.labels for s in range(m)]
    faces = []
    for y in X.faces[X.d]:
        v0 = y[0]
        for s in range(m):
            faces.append(tuple(v * m + (s + _edge_value(X, z, v0, v)) % m for v in y))
    for k in range(X.d):
        for y in X.faces[k]:
            v0 = y[0]
            for s in range(m):
                faces.append(tuple(v * m + (s + _edge_value(X, z, v0, v)) % m for v in y))
    Y = SimplicialComplex(labels, faces)
    return verify_covering(SimplicialMap(Y, X, [v // m for v in range(len(labels))]))


def double_cover_from_cocycle(X: SimplicialComplex, z) -> CoveringMap:
    """Double cover whose sheets swap along edges e with z(e) = 1 (z ∈ Z^1(X, F_2))."""
    z = np.asarray(z, dtype=np.int64) % 2
    if X.d >= 2 and la.matmul(coboundary_matrix(constant_sheaf(X, 1, 2), 1), z.reshape(-1, 1), 2).any():
        raise CoveringError("z is not a 1-cocycle")
    return cyclic_cover_from_cocycle(X, z, 2)


def deck_transformation(u: CoveringMap) -> SimplicialMap:
    """The sheet swap σ of a degree-2 covering: σ exchanges the two vertices of every fiber."""
    if u.degree != 2:
        raise CoveringError("deck transformation needs a degree-2 covering")
    sigma = list(range(u.source.n_vertices))
    for (x,) in u.target.faces[0]:
        a, b = u.fiber[(x,)]
        sigma[a[0]], sigma[b[0]] = b[0], a[0]
    return SimplicialMap(u.source, u.source, sigma)


class Tower:
    """X_r -> ... -> X_0 as a list of double covers ``maps[i]: X_{i+1} -> X_i``."""

    def __init__(self, base: SimplicialComplex, maps: List[CoveringMap], classes: List[List[int]]):
        self.base = base
        self.maps = maps
        self.classes = classes

    @property
    def levels(self) -> List[SimplicialComplex]:
        return [self.base] + [u.source for u in self.maps]

    def projection(self, r: int) -> SimplicialMap:
        """Composite X_r -> X_0."""
        f = identity_map(self.base)
        for u in self.maps[:r]:
            f = compose(f, u)
        return f


class TowerError(CoveringError):
    def __init__(self, msg: str, stage: int):
        super().__init__(msg, stage)
        self.stage = stage


def build_tower(X: SimplicialComplex, r: int, seed: int = 0) -> Tower:
    """r connected double covers, each twisted by a uniformly random nonzero class of H^1(X_i, F_2)."""
    rng = np.random.default_rng(seed)
    maps, classes = [], []
    cur = X
    for stage in range(r):
        H = cohomology(constant_sheaf(cur, 1, 2))
        reps = H.reps.get(1, np.zeros((0, 0)))
        if reps.shape[0] == 0:
            raise TowerError(f"H^1(X_{stage}, F_2) = 0: no connected double cover", stage)
        while True:
            c = rng.integers(0, 2, size=reps.shape[0])
            if c.any():
                break
        z = la.matmul(c.reshape(1, -1), reps, 2).ravel()
        u = double_cover_from_cocycle(cur, z)
        maps.append(u)
        classes.append(c.tolist())
        cur = u.source
    return Tower(X, maps, classes)
