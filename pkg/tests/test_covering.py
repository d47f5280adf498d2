from __future__ import annotations

import numpy as np
import pytest

from sheafltc import fixtures as fx
from sheafltc.covering import (CoveringError, SimplicialMap, TowerError, build_tower, compose, cyclic_cover_from_cocycle,
                               deck_transformation, double_cover_from_cocycle, identity_map, verify_covering)
from sheafltc.homology import cohomology
from sheafltc.sheaf import constant_sheaf


def test_double_cover_of_triangle_is_hexagon():
    X = fx.cycle(3)
    u = double_cover_from_cocycle(X, np.array([1, 0, 0]))
    assert u.degree == 2
    assert u.source.f_vector() == [6, 6]
    assert u.source.is_connected


def test_trivial_cocycle_gives_disconnected_cover():
    u = double_cover_from_cocycle(fx.cycle(4), np.zeros(4, dtype=np.int64))
    assert not u.source.is_connected and u.degree == 2


def test_cyclic_cover_degree_three():
    u = fx.torus7_cover3()
    assert u.degree == 3
    assert u.source.f_vector() == [21, 63, 42]
    assert u.source.is_connected


def test_non_cocycle_rejected():
    X = fx.delta(2)
    with pytest.raises(CoveringError):
        double_cover_from_cocycle(X, np.array([1, 0, 0]))


def test_verify_covering_rejects_folding():
    Y = fx.cycle(6)
    X = fx.cycle(3)
    verify_covering(SimplicialMap(Y, X, [v % 3 for v in range(6)]))
    # folding a path onto an edge is not locally bijective
    from sheafltc.complex import from_maximal_faces

    path = from_maximal_faces(range(3), [[0, 1], [1, 2]])
    edge = from_maximal_faces(range(2), [[0, 1]])
    with pytest.raises(CoveringError):
        verify_covering(SimplicialMap(path, edge, [0, 1, 0]))


def test_deck_transformation_is_free_involution():
    u = double_cover_from_cocycle(fx.torus7(), cohomology(constant_sheaf(fx.torus7(), 1, 2)).reps[1][0])
    s = deck_transformation(u)
    ss = compose(s, s)
    assert ss.vmap == identity_map(u.source).vmap
    assert all(s.vmap[v] != v and u.vmap[s.vmap[v]] == u.vmap[v] for v in range(u.source.n_vertices))


def test_tower_levels_double():
    tw = build_tower(fx.torus7(), 3, seed=1)
    fv = [L.f_vector() for L in tw.levels]
    for a, b in zip(fv, fv[1:]):
        assert b == [2 * x for x in a]
    assert all(L.is_connected for L in tw.levels)
    proj = tw.projection(3)
    verify_covering(proj)


def test_tower_fails_on_simply_connected_base():
    with pytest.raises(TowerError) as e:
        build_tower(fx.tetrahedron(), 2)
    assert e.value.stage == 0


def test_tower_is_seed_deterministic():
    a = build_tower(fx.petersen(), 3, seed=5).classes
    b = build_tower(fx.petersen(), 3, seed=5).classes
    assert a == b
