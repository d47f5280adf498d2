from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import small_complexes
from sheafltc import fixtures as fx
from sheafltc.complex import (SimplicialComplex, canonical_weight, face_key, from_maximal_faces, parse_face_key,
                              skeleton_expansion_exact, spectral_expansion)


def test_fixture_f_vectors():
    assert fx.torus7().f_vector() == [7, 21, 14]
    assert fx.tetrahedron().f_vector() == [4, 6, 4]
    assert fx.petersen().f_vector() == [10, 15]
    assert fx.delta(3).f_vector() == [4, 6, 4, 1]
    assert fx.torus7().euler_characteristic() == 0
    assert fx.tetrahedron().euler_characteristic() == 2


def test_downward_closure_and_indices():
    X = SimplicialComplex(range(4), [(2, 0, 1), (3, 1)])
    assert X.faces[2] == [(0, 1, 2)]
    assert (1, 3) in X.faces[1]
    assert not X.is_pure
    for k in range(X.d + 1):
        for i, x in enumerate(X.faces[k]):
            assert X.face_index(x) == i
    with pytest.raises(ValueError):
        SimplicialComplex(range(2), [(0, 5)])


def test_face_keys_roundtrip():
    for x in [(), (3,), (0, 2, 5)]:
        assert parse_face_key(face_key(x)) == x


@pytest.mark.parametrize("name", sorted(small_complexes()))
def test_weights_are_probabilities(name):
    X = small_complexes()[name]
    w = canonical_weight(X)
    for k in range(-1, X.d + 1):
        assert sum(w[x] for x in X.faces_of(k)) == 1
    # weight of a face is the sum over its cofaces scaled by (k+2)^{-1}
    for k in range(X.d):
        for x in X.faces_of(k):
            assert w[x] == sum(w[y] for y in X.cofaces(x, k + 1)) / (k + 2)


def test_links():
    X = fx.torus7()
    L, corr = X.link((0,))
    assert L.f_vector() == [6, 6]  # a hexagon
    assert all(0 in y for y in corr[1])
    Le, _ = X.link((0, 1))
    assert Le.f_vector() == [2]
    assert X.Q == 6 and X.degree(0, 1) == 6


def test_connectivity():
    assert fx.cycle(5).is_connected
    assert not fx.two_edges().is_connected
    assert fx.torus7().is_strongly_connected


def _skeleton_bruteforce(X):
    w = canonical_weight(X)
    n = X.n_faces(0)
    best = None
    for r in range(1, n + 1):
        for S in itertools.combinations(range(n), r):
            s = set(S)
            wS = sum(w[(v,)] for v in S)
            wE = sum(w[e] for e in X.faces[1] if e[0] in s and e[1] in s)
            a = (wE - wS * wS) / wS
            best = a if best is None or a > best else best
    return max(best, Fraction(0))


@pytest.mark.parametrize("name", ["c5", "c6", "K4", "K33", "tetrahedron", "torus7", "petersen", "two_edges"])
def test_skeleton_expansion_matches_bruteforce(name):
    X = small_complexes()[name]
    assert skeleton_expansion_exact(X) == _skeleton_bruteforce(X)


def test_cycle_spectrum_is_cosine():
    for n in range(3, 9):
        lam = spectral_expansion(fx.cycle(n)).lam_max
        assert abs(lam - np.cos(2 * np.pi / n)) < 1e-9


def test_complete_graph_spectrum():
    for n in range(3, 7):
        rep = spectral_expansion(fx.complete_graph(n))
        assert abs(rep.lam_max + 1 / (n - 1)) < 1e-9


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_random_complex_respects_face_cap(seed):
    X = fx.random_complex(np.random.default_rng(seed), max_faces=30)
    assert sum(X.f_vector()) <= 30
    assert X.is_pure
