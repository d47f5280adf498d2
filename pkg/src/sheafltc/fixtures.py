"""Built-in complexes and sheaves used throughout the test-suite."""

from __future__ import annotations

import itertools
from typing import Dict, List

import numpy as np

from .complex import SimplicialComplex, from_maximal_faces

__all__ = [
    "delta",
    "delta_boundary",
    "cycle",
    "tetrahedron",
    "torus7",
    "complete_graph",
    "complete_bipartite",
    "petersen",
    "two_edges",
    "torus7_cover3",
    "pushforward_cover_sheaf",
    "decoder_sheaf",
    "expander_code_fixture",
    "one_cocycle_fixture",
    "random_complex",
    "SHEAF_FIXTURES",
    "get_sheaf_fixture",
    "FIXTURES",
    "get_fixture",
]


def delta(n: int) -> SimplicialComplex:
    """The solid n-simplex Δ_n."""
    return from_maximal_faces(list(range(n + 1)), [list(range(n + 1))])


def delta_boundary(n: int) -> SimplicialComplex:
    """Boundary of Δ_n (an (n-1)-sphere)."""
    return from_maximal_faces(list(range(n + 1)), [list(f) for f in itertools.combinations(range(n + 1), n)])


def cycle(n: int) -> SimplicialComplex:
    return from_maximal_faces(list(range(n)), [[i, (i + 1) % n] for i in range(n)])


def tetrahedron() -> SimplicialComplex:
    """Boundary of the tetrahedron: 4 triangles, 6 edges, 4 vertices."""
    return delta_boundary(3)


def torus7() -> SimplicialComplex:
    """Minimal 7-vertex triangulation of the torus (triangles {i, i+1, i+3}, {i, i+2, i+3} mod 7)."""
    tri = []
    for i in range(7):
        tri.append([i, (i + 1) % 7, (i + 3) % 7])
        tri.append([i, (i + 2) % 7, (i + 3) % 7])
    return from_maximal_faces(list(range(7)), tri)


def complete_graph(n: int) -> SimplicialComplex:
    return from_maximal_faces(list(range(n)), [list(e) for e in itertools.combinations(range(n), 2)])


def complete_bipartite(a: int, b: int) -> SimplicialComplex:
    return from_maximal_faces(list(range(a + b)), [[i, a + j] for i in range(a) for j in range(b)])


def petersen() -> SimplicialComplex:
    outer = [[i, (i + 1) % 5] for i in range(5)]
    spokes = [[i, i + 5] for i in range(5)]
    inner = [[5 + i, 5 + (i + 2) % 5] for i in range(5)]
    return from_maximal_faces(list(range(10)), outer + spokes + inner)


def two_edges() -> SimplicialComplex:
    """Disjoint union of two edges (a disconnected graph)."""
    return from_maximal_faces([0, 1, 2, 3], [[0, 1], [2, 3]])


FIXTURES = {
    "delta": delta,
    "delta_boundary": delta_boundary,
    "cycle": cycle,
    "tetrahedron": tetrahedron,
    "torus7": torus7,
    "complete_graph": complete_graph,
    "complete_bipartite": complete_bipartite,
    "petersen": petersen,
    "two_edges": two_edges,
}


def get_fixture(name: str, **params) -> SimplicialComplex:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}")
    return FIXTURES[name](**params)


def torus7_cover3():
    """Degree-3 cyclic cover of torus7 twisted by the first F_3 cohomology class."""
    from .covering import cyclic_cover_from_cocycle
    from .homology import cohomology
    from .sheaf import constant_sheaf

    X = torus7()
    z = cohomology(constant_sheaf(X, 1, 3)).reps[1][0]
    return cyclic_cover_from_cocycle(X, z, 3)


def pushforward_cover_sheaf(p: int = 2):
    """u_* F_p along the degree-3 cover of torus7: locally constant of rank 3."""
    from .sheaf import constant_sheaf, pushforward

    u = torus7_cover3()
    return pushforward(u, constant_sheaf(u.source, 1, p))


def decoder_sheaf():
    """Random sheaf on Δ_3 with F(v) = F_2, Z^0 = 0 and locally minimal 1-cocycles of weight ≥ 1."""
    from .sheaf import random_sheaf

    return random_sheaf(delta(3), np.random.default_rng(8903), 2, ambient=3, density=0.9)


def expander_code_fixture(m: int = 2, seed: int = 0, p: int = 2):
    """Sheafy expander code on the Petersen graph with random injective 3 x m local maps."""
    from . import linalg as la
    from .sheaf import expander_code_sheaf

    X = petersen()
    rng = np.random.default_rng(seed)
    T = {}
    for (v,) in X.faces[0]:
        while True:
            M = rng.integers(0, p, size=(len(X.cofaces((v,), 1)), m))
            if la.rank(M, p) == m:
                break
        T[v] = M
    return expander_code_sheaf(X, T, p)


def _torus7_zero():
    from .sheaf import zero_restriction_sheaf

    return zero_restriction_sheaf(torus7(), 4, 2)


def _constant(name: str, **params):
    from .sheaf import constant_sheaf

    return constant_sheaf(get_fixture(name, **params), 1, 2)


SHEAF_FIXTURES = {
    "decoder_sheaf": decoder_sheaf,
    "cover3_pushforward": pushforward_cover_sheaf,
    "torus7_zero": _torus7_zero,
    "expander_code": expander_code_fixture,
}


def get_sheaf_fixture(name: str, **params):
    """Named sheaf fixture; a complex fixture name gives its constant F_2 sheaf."""
    if name in SHEAF_FIXTURES:
        return SHEAF_FIXTURES[name](**params)
    return _constant(name, **params)


def random_complex(rng: np.random.Generator, n_vertices: int = 6, n_top: int = 4, dim: int = 2,
                   max_faces: int = 30) -> SimplicialComplex:
    """Downward closure of random dim-faces on n_vertices, trimmed to at most max_faces faces."""
    while True:
        tops = {tuple(sorted(rng.choice(n_vertices, size=dim + 1, replace=False).tolist())) for _ in range(n_top)}
        used = sorted({v for t in tops for v in t})
        ren = {v: i for i, v in enumerate(used)}
        X = from_maximal_faces(list(range(len(used))), [[ren[v] for v in t] for t in sorted(tops)])
        if sum(X.f_vector()) <= max_faces:
            return X
        n_top = max(1, n_top - 1)


def one_cocycle_fixture(m: int = 5, r: int = 1, p: int = 31, seed: int = 0, max_tries: int = 200):
    """(F, G, U): constant F_p^m on torus7 and the 1-cocycle subsheaf G with random U(e) of
    dimension m − r in general position."""
    from . import linalg as la
    from .sheaf import constant_sheaf, general_position_ok, one_cocycle_sheaf

    X = torus7()
    F = constant_sheaf(X, m, p)
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        U = {e: la.random_full_rank(rng, m - r, m, p) for e in X.faces[1]}
        if general_position_ok(F, U, r):
            return F, one_cocycle_sheaf(F, U), U
    raise RuntimeError("no general-position choice found")
