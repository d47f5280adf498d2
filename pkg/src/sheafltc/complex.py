"""Finite simplicial complexes with a fixed vertex order, canonical weights and links."""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .config import vertex_threshold

Face = Tuple[int, ...]

__all__ = [
    "Face",
    "SimplicialComplex",
    "SpectralReport",
    "from_maximal_faces",
    "face_key",
    "parse_face_key",
    "canonical_weight",
    "skeleton_expansion_exact",
    "spectral_expansion",
]


def face_key(x: Sequence[int]) -> str:
    """Canonical dash-joined key of a face ("" for the empty face)."""
    return "-".join(str(int(v)) for v in x)


def parse_face_key(s: str) -> Face:
    return tuple(sorted(int(t) for t in s.split("-"))) if s else ()


class SimplicialComplex:
    """A finite simplicial complex on vertices 0..n-1 (declaration order = L).

    ``faces[k]`` lists the k-faces as sorted tuples in lexicographic order;
    ``index[k]`` maps a k-face to its position.  The empty face is implicit.
    """

    def __init__(self, labels: Sequence, faces: Iterable[Face]):
        self.labels = list(labels)
        fs = set()
        for f in faces:
            f = tuple(sorted(int(v) for v in f))
            if len(set(f)) != len(f):
                raise ValueError(f"repeated vertex in face {f}")
            for v in f:
                if not 0 <= v < len(self.labels):
                    raise ValueError(f"vertex {v} not declared")
            for r in range(1, len(f) + 1):
                fs.update(itertools.combinations(f, r))
        if not fs:
            raise ValueError("empty complex")
        self.d = max(len(f) for f in fs) - 1
        self.faces: List[List[Face]] = [sorted(f for f in fs if len(f) == k + 1) for k in range(self.d + 1)]
        self.index: List[Dict[Face, int]] = [{f: i for i, f in enumerate(fk)} for fk in self.faces]

    # -- basic queries -------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    def n_faces(self, k: int) -> int:
        if k == -1:
            return 1
        if k < -1 or k > self.d:
            return 0
        return len(self.faces[k])

    def faces_of(self, k: int) -> List[Face]:
        if k == -1:
            return [()]
        if k < -1 or k > self.d:
            return []
        return self.faces[k]

    def face_index(self, x: Sequence[int]) -> int:
        x = tuple(x)
        if not x:
            return 0
        return self.index[len(x) - 1][x]

    def __contains__(self, x) -> bool:
        x = tuple(sorted(x))
        return not x or (len(x) - 1 <= self.d and x in self.index[len(x) - 1])

    def f_vector(self) -> List[int]:
        return [len(fk) for fk in self.faces]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    @cached_property
    def cofaces_up(self) -> List[List[List[int]]]:
        """cofaces_up[k][i] = indices of (k+1)-faces containing the i-th k-face (k = -1 allowed at slot 0)."""
        out: List[List[List[int]]] = []
        for k in range(-1, self.d):
            up: List[List[int]] = [[] for _ in range(self.n_faces(k))]
            for j, y in enumerate(self.faces_of(k + 1)):
                for v in range(len(y)):
                    x = y[:v] + y[v + 1:]
                    up[self.face_index(x)].append(j)
            out.append(up)
        return out

    def cofaces(self, x: Sequence[int], dim: int) -> List[Face]:
        """All faces of dimension ``dim`` containing x."""
        x = tuple(x)
        if dim < len(x) - 1:
            return []
        xs = set(x)
        return [y for y in self.faces_of(dim) if xs.issubset(y)]

    @cached_property
    def coface_counts(self) -> List[np.ndarray]:
        """c[k][i] = number of d-faces containing the i-th k-face (k = -1 .. d)."""
        out = []
        for k in range(-1, self.d + 1):
            c = np.zeros(self.n_faces(k), dtype=np.int64)
            for y in self.faces[self.d]:
                if k == -1:
                    c[0] += 1
                else:
                    for x in itertools.combinations(y, k + 1):
                        c[self.index[k][x]] += 1
            out.append(c)
        return out

    def coface_count(self, k: int) -> np.ndarray:
        return self.coface_counts[k + 1]

    @cached_property
    def is_pure(self) -> bool:
        return all((self.coface_count(k) > 0).all() for k in range(self.d + 1))

    @cached_property
    def is_strongly_connected(self) -> bool:
        top = self.faces[self.d]
        if self.d == 0:
            return len(top) == 1
        seen = {0}
        stack = [0]
        by_ridge: Dict[Face, List[int]] = {}
        for i, y in enumerate(top):
            for v in range(len(y)):
                by_ridge.setdefault(y[:v] + y[v + 1:], []).append(i)
        while stack:
            i = stack.pop()
            y = top[i]
            for v in range(len(y)):
                for j in by_ridge[y[:v] + y[v + 1:]]:
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
        return len(seen) == len(top)

    @cached_property
    def is_connected(self) -> bool:
        n = self.n_faces(0)
        adj = self.adjacency_lists
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == n

    @cached_property
    def adjacency_lists(self) -> List[List[int]]:
        """Neighbours of each vertex (vertex indices = 0-face indices)."""
        adj: List[List[int]] = [[] for _ in range(self.n_faces(0))]
        if self.d >= 1:
            for (a, b) in self.faces[1]:
                adj[self.index[0][(a,)]].append(self.index[0][(b,)])
                adj[self.index[0][(b,)]].append(self.index[0][(a,)])
        return [sorted(a) for a in adj]

    def vertex_of(self, i: int) -> int:
        """Vertex label index of the i-th 0-face."""
        return self.faces[0][i][0]

    # -- degrees -------------------------------------------------------
    def degree(self, i: int, j: int) -> int:
        """D_{i,j}: the maximum number of j-faces containing an i-face."""
        if j < i:
            return 0
        if i == -1:
            return self.n_faces(j)
        best = 0
        for x in self.faces_of(i):
            best = max(best, len(self.cofaces(x, j)))
        return best

    @cached_property
    def Q(self) -> int:
        """D(X) = D_{0,d}: maximum number of top faces at a vertex."""
        return int(self.coface_count(0).max()) if self.n_faces(0) else 0

    # -- links -----------------------------------------------------------
    def link(self, z: Sequence[int]) -> Tuple["SimplicialComplex", List[List[Face]]]:
        """Link X_z and, per dimension, the faces x ∪ z corresponding to link faces.

        Link vertices keep the induced order of L; they are renumbered 0..m-1.
        ``corr[k][i]`` is the face of X equal to (i-th link k-face) ∪ z, for k = -1..d_z.
        """
        z = tuple(sorted(z))
        if z and z not in self:
            raise KeyError(f"{z} is not a face")
        if not z:
            return self, [[x for x in self.faces_of(k)] for k in range(-1, self.d + 1)]
        zs = set(z)
        star = self.cofaces(z, self.d)
        cof = [y for k in range(len(z), self.d + 1) for y in self.cofaces(z, k)]
        verts = sorted({v for y in star for v in y} - zs)
        ren = {v: i for i, v in enumerate(verts)}
        link_faces = [tuple(ren[v] for v in y if v not in zs) for y in cof if len(y) > len(z)]
        if not link_faces:
            raise ValueError("link is empty (z is maximal)")
        L = SimplicialComplex([self.labels[v] for v in verts], link_faces)
        L._parent_vertices = verts
        corr = [[z]]
        for k in range(L.d + 1):
            corr.append([tuple(sorted(z + tuple(verts[i] for i in x))) for x in L.faces[k]])
        return L, corr

    def __repr__(self) -> str:
        return f"SimplicialComplex(d={self.d}, f={self.f_vector()})"


def from_maximal_faces(vertex_labels: Sequence, maximal_faces: Iterable[Sequence]) -> SimplicialComplex:
    """Build the downward closure of the given faces (labels or integer indices)."""
    labels = list(vertex_labels)
    if not labels:
        raise ValueError("empty vertex list")
    lookup = {lab: i for i, lab in enumerate(labels)}
    faces = []
    for f in maximal_faces:
        f = list(f)
        if not f:
            continue
        idx = []
        for v in f:
            if v in lookup:
                idx.append(lookup[v])
            elif isinstance(v, (int, np.integer)) and 0 <= int(v) < len(labels):
                idx.append(int(v))
            else:
                raise ValueError(f"unknown vertex {v!r}")
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate vertex in face {f}")
        faces.append(tuple(idx))
    if not faces:
        raise ValueError("no faces given")
    return SimplicialComplex(labels, faces)


# ---------------------------------------------------------------------------
# weights


def _require_pure(X: SimplicialComplex) -> None:
    if not X.is_pure:
        raise ValueError("canonical weights need a pure complex")


def canonical_weight(X: SimplicialComplex) -> Dict[Face, Fraction]:
    """Exact canonical weights w(x) = |X(d)_{⊇x}| / (C(d+1,k+1) |X(d)|), including w(∅) = 1."""
    _require_pure(X)
    top = X.n_faces(X.d)
    w: Dict[Face, Fraction] = {}
    for k in range(-1, X.d + 1):
        den = comb(X.d + 1, k + 1) * top
        for x, c in zip(X.faces_of(k), X.coface_count(k)):
            w[x] = Fraction(int(c), den)
    return w


def weight_denominator(X: SimplicialComplex, k: int) -> int:
    """Common denominator of the k-face weights; numerators are coface counts."""
    return comb(X.d + 1, k + 1) * X.n_faces(X.d)


# ---------------------------------------------------------------------------
# skeleton and spectral expansion


def skeleton_expansion_exact(X: SimplicialComplex, max_vertices: Optional[int] = None) -> Fraction:
    """Least α ≥ 0 with w(E(S)) ≤ w(S)^2 + α w(S) for all nonempty vertex sets S."""
    _require_pure(X)
    n = X.n_faces(0)
    limit = max_vertices if max_vertices is not None else vertex_threshold()
    if n > limit:
        raise ValueError(f"{n} vertices exceed the enumeration threshold {limit}")
    if X.d == 0:
        return Fraction(0)
    c0 = X.coface_count(0)
    c1 = X.coface_count(1)
    D0 = weight_denominator(X, 0)
    D1 = weight_denominator(X, 1)
    eu = np.array([X.index[0][(a,)] for a, _ in X.faces[1]], dtype=np.int64)
    ev = np.array([X.index[0][(b,)] for _, b in X.faces[1]], dtype=np.int64)
    num, den, _ = _kernels.subset_skeleton_scan(c0, eu, ev, c1, D0, D1)
    # (a/D1 - (b/D0)^2) / (b/D0) = (a D0^2 - b^2 D1) / (b D0 D1)
    alpha = Fraction(num, den * D0 * D1)
    return max(alpha, Fraction(0))


class SpectralReport:
    """Spectrum of the weighted adjacency operator on mean-zero functions."""

    def __init__(self, eigenvalues: np.ndarray, tol: float = 1e-9):
        self.eigenvalues = eigenvalues
        self.tol = tol
        self.lam_max = float(eigenvalues.max()) if eigenvalues.size else float("-inf")
        self.lam_min = float(eigenvalues.min()) if eigenvalues.size else float("inf")

    def is_expander(self, lam: float) -> bool:
        return self.lam_min >= -1 - self.tol and self.lam_max <= lam + self.tol

    def as_dict(self) -> dict:
        return {"lambda_max": self.lam_max, "lambda_min": self.lam_min,
                "eigenvalues": [float(v) for v in self.eigenvalues]}


def weighted_adjacency(X: SimplicialComplex) -> np.ndarray:
    """Symmetrised operator S = W^{1/2} A W^{-1/2} with A f(x) = Σ_y w(xy) f(y) / (2 w(x))."""
    _require_pure(X)
    n = X.n_faces(0)
    c0 = X.coface_count(0).astype(float) / weight_denominator(X, 0)
    S = np.zeros((n, n))
    if X.d >= 1:
        c1 = X.coface_count(1).astype(float) / weight_denominator(X, 1)
        for (a, b), we in zip(X.faces[1], c1):
            i, j = X.index[0][(a,)], X.index[0][(b,)]
            val = we / (2.0 * np.sqrt(c0[i] * c0[j]))
            S[i, j] += val
            S[j, i] += val
    return S


def spectral_expansion(X: SimplicialComplex, tol: float = 1e-9) -> SpectralReport:
    """Eigenvalues of A on the weighted-orthogonal complement of the constants."""
    S = weighted_adjacency(X)
    ev = np.linalg.eigvalsh(S)
    # the constants (sqrt(w) after symmetrisation) always give eigenvalue 1
    i = int(np.argmin(np.abs(ev - 1.0)))
    ev = np.delete(ev, i)
    return SpectralReport(np.sort(ev), tol)
