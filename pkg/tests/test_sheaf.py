from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sheafltc import fixtures as fx
from sheafltc import linalg as la
from sheafltc.covering import double_cover_from_cocycle
from sheafltc.homology import cohomology
from sheafltc.sheaf import (Sheaf, SheafError, SheafMorphism, change_bases, constant_sheaf, expander_code_sheaf,
                            product, pullback, pushforward, quotient, random_sheaf, restrict_to_link, subsheaf,
                            zero_restriction_sheaf)


def test_constant_sheaf_dims_and_validity():
    F = constant_sheaf(fx.torus7(), 2, 3)
    assert F.validate() is None
    assert [F.cochain_dim(k) for k in range(3)] == [14, 42, 28]
    assert F.is_locally_constant()


def test_validate_reports_noncommuting_square():
    X = fx.delta(2)
    F = constant_sheaf(X, 1, 2)
    res = dict(F.res)
    res[((0,), (0, 1))] = np.zeros((1, 1), dtype=np.int64)
    G = Sheaf(X, 2, F.dims, res, False)
    assert G.validate() is not None
    with pytest.raises(SheafError):
        G.check()


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_random_sheaves_are_valid(seed):
    rng = np.random.default_rng(seed)
    X = fx.random_complex(rng, n_vertices=5, n_top=3, dim=2)
    F = random_sheaf(X, rng, int(rng.choice([2, 3])), ambient=3, augmented=bool(rng.integers(0, 2)))
    assert F.validate() is None


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_change_of_bases_preserves_cohomology(seed):
    rng = np.random.default_rng(seed)
    X = fx.random_complex(rng, n_vertices=5, n_top=3, dim=2)
    F = random_sheaf(X, rng, 2, ambient=3)
    assert cohomology(change_bases(F, rng)).h == cohomology(F).h


def test_subsheaf_quotient_and_product():
    X = fx.tetrahedron()
    F = constant_sheaf(X, 2, 2)
    S = {x: np.array([[1, 0]]) for x in F.dims if x}
    A = subsheaf(F, S)
    B = quotient(F, S)
    assert all(A.dims[x] == 1 and B.dims[x] == 1 for x in F.dims if x)
    hF, hA, hB = cohomology(F).h, cohomology(A).h, cohomology(B).h
    assert all(hF[k] == hA[k] + hB[k] for k in hF)
    P = product(A, B)
    assert cohomology(P).h == hF


def test_zero_restriction_sheaf_cohomology():
    F = zero_restriction_sheaf(fx.torus7(), 4, 2)
    h = cohomology(F).h
    assert h[0] == 28  # every vertex section is a cocycle


def test_expander_code_sheaf_rejects_non_injective():
    X = fx.cycle(3)
    T = {v: np.array([[1], [1]]) for v in range(3)}
    expander_code_sheaf(X, T, 2)
    with pytest.raises(SheafError):
        expander_code_sheaf(X, {v: np.zeros((2, 1), dtype=np.int64) for v in range(3)}, 2)


def test_pullback_pushforward_along_double_cover():
    X = fx.cycle(3)
    u = double_cover_from_cocycle(X, np.array([1, 0, 0]))
    F = constant_sheaf(X, 1, 2)
    G = pullback(u, F)
    assert G.validate() is None and G.X.f_vector() == [6, 6]
    P = pushforward(u, G)
    assert all(P.dims[x] == 2 for x in P.dims if x)
    assert P.is_locally_constant()
    assert cohomology(P).h == cohomology(G).h


def test_morphism_kernel_and_compatibility():
    X = fx.cycle(4)
    F = constant_sheaf(X, 2, 2)
    phi = SheafMorphism(F, F, {x: np.array([[1, 1], [0, 0]]) for x in F.dims if x})
    assert phi.is_compatible() and not phi.is_isomorphism()
    K = phi.kernel()
    assert all(K.dims[x] == 1 for x in K.dims if x)


def test_restrict_to_link_is_augmented():
    F = constant_sheaf(fx.torus7(), 1, 2)
    Fz, corr = restrict_to_link(F, (0,))
    assert Fz.augmented and Fz.X.f_vector() == [6, 6]
    assert cohomology(Fz).h[-1] == 0
