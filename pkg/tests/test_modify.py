from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sheafltc import fixtures as fx
from sheafltc import linalg as la
from sheafltc.homology import cocycle_basis, cohomology
from sheafltc.modify import (c_e_closure, c_e_spaces, check_a1_a2, counit_kernel_sheaf, cup_predictor, effect_of_E,
                             er_dimension_threshold, link_quotient_check, omega_kernel, omega_kernel_dim_alt,
                             run_process, subsheaf_C_E)
from sheafltc.sheaf import SheafError, constant_sheaf, random_sheaf


def _same(U, V, p):
    return U.shape == V.shape and la.rank(np.concatenate([U, V]), p) == U.shape[0]


@pytest.fixture(scope="module")
def cover3():
    return fx.pushforward_cover_sheaf()


@given(st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_c_e_two_routes_agree(seed):
    rng = np.random.default_rng(seed)
    F = constant_sheaf(fx.torus7(), 2, 2)
    E = la.random_matrix(rng, int(rng.integers(1, 4)), F.cochain_dim(1), 2)
    a, b = c_e_spaces(F, E), c_e_closure(F, E)
    assert all(_same(a[x], b[x], 2) for x in F.dims)
    assert subsheaf_C_E(F, E).validate() is None


@given(st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_omega_kernel_two_routes_agree(seed):
    rng = np.random.default_rng(seed)
    F = constant_sheaf(fx.torus7(), 2, 2)
    Z = cocycle_basis(F, 1)
    E = la.matmul(la.random_matrix(rng, int(rng.integers(1, 4)), Z.shape[0], 2), Z, 2)
    assert omega_kernel(F, E).shape[0] == omega_kernel_dim_alt(F, E)


def test_effect_of_E_bounds(cover3):
    rng = np.random.default_rng(2)
    Z = cocycle_basis(cover3, 1)
    for _ in range(5):
        E = la.matmul(la.random_matrix(rng, 2, Z.shape[0], 2), Z, 2)
        r = effect_of_E(cover3, E)
        assert r["bound_i"] and r["bound_ii"]
        # exactness makes the ker-omega form an equality
        assert r["h1_FE"] == r["h1_F"] - r["dim_H_E"] + r["dim_ker_omega"]


def test_effect_of_E_im_form_can_fail(cover3):
    rng = np.random.default_rng(2)
    Z = cocycle_basis(cover3, 1)
    E = la.matmul(la.random_matrix(rng, 2, Z.shape[0], 2), Z, 2)
    r = effect_of_E(cover3, E)
    assert r["bound_ii"] and not r["bound_ii_im"]


def test_process_converges_on_cover(cover3):
    st = run_process(cover3, seed=0, max_E_dim=None)
    assert st.stop == "converged" and st.invariants_ok
    last = st.trace[-1]
    assert last["h0_FE"] > last["h1_FE"]
    dims = [t["dim_E"] for t in st.trace]
    assert dims == sorted(dims)


def test_process_not_needed_and_cap():
    st = run_process(constant_sheaf(fx.tetrahedron(), 2, 2), seed=0)
    assert st.stop == "not-needed"
    st = run_process(fx.pushforward_cover_sheaf(), seed=0, max_E_dim=2)
    assert st.stop in ("max-dim-cap", "converged")


def test_process_rejects_non_locally_constant():
    F = random_sheaf(fx.torus7(), np.random.default_rng(0), 2, ambient=3, density=0.4)
    if not F.is_locally_constant():
        with pytest.raises(SheafError):
            run_process(F)


def test_link_identification(cover3):
    st = run_process(cover3, seed=0, max_E_dim=None)
    for v in range(cover3.X.n_faces(0)):
        r = link_quotient_check(cover3, st.E1, v)
        if r["a1"] and r["a2"]:
            assert r["compatible"] and r["bijective"]
    assert "a1" in check_a1_a2(cover3, st.E1)


def test_cup_predictor_routes_agree(cover3):
    st = run_process(cover3, seed=1, max_E_dim=None)
    rep = cup_predictor(cover3, st.E1, seed=1)
    assert rep.kernel_dim == rep.kernel_dim_alt
    assert rep.V1 is not None and rep.V1 >= rep.U1
    d = rep.as_dict()
    assert d["V1_minus_U1"] == rep.V1 - rep.U1


def test_threshold_formula_torus():
    F = constant_sheaf(fx.torus7(), 1, 2)
    # ((14 - 21 + 7 - 1) * 1 - (2 - 1 + 1)) / (28 - 21)
    assert er_dimension_threshold(F) == Fraction(-3, 7)
    # graph: ((0 - 4 + 4 - 1) - (1 - 1 + 1)) / (0 - 4)
    assert er_dimension_threshold(constant_sheaf(fx.cycle(4), 1, 2)) == Fraction(1, 2)


def test_counit_kernel_is_locally_constant():
    u = fx.torus7_cover3()
    K = counit_kernel_sheaf(u, 2)
    assert K.is_locally_constant()
    assert all(K.dims[x] == 2 for x in K.dims if x)
