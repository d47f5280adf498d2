from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from conftest import brute_span
from sheafltc import fixtures as fx
from sheafltc.codes import (CodeError, build_code, build_css, code_distance, css_x_decode, decode, decode_radius, perp,
                            rejection_probability)
from sheafltc.codes import tester_stats as _tester_stats
from sheafltc.expansion import INF
from sheafltc.homology import coboundary_matrix
from sheafltc.sheaf import constant_sheaf, zero_restriction_sheaf


def test_repetition_code_on_cycle():
    code = build_code(constant_sheaf(fx.cycle(5), 1, 2), 0)
    assert code.n == 5 and code.dim == 1 and code.rate == Fraction(1, 5)
    assert code.contains(np.ones(5, dtype=np.int64))
    dist, w = code_distance(code)
    assert dist == 1 and w.tolist() == [1] * 5


def test_rejection_probability_by_hand():
    code = build_code(constant_sheaf(fx.cycle(4), 1, 2), 0)
    f = np.array([1, 0, 0, 0])
    assert rejection_probability(code, f) == Fraction(2, 4)


def _mu_bruteforce(code):
    F, k, p = code.F, code.k, code.F.p
    n = F.cochain_dim(k)
    words = [np.array(v) for v in brute_span(np.eye(n, dtype=np.int64), p, n)]
    cw = [np.array(c) for c in brute_span(code.Z, p, n)]
    best = None
    for f in words:
        d = min(int(((f - c) % p != 0).sum()) for c in cw)
        if d == 0:
            continue
        r = rejection_probability(code, f) / Fraction(d, code.n)
        best = r if best is None or r < best else best
    return best


@pytest.mark.parametrize("X", [fx.cycle(3), fx.cycle(5), fx.complete_graph(4), fx.tetrahedron()])
def test_tester_soundness_matches_bruteforce(X):
    code = build_code(constant_sheaf(X, 1, 2), 0)
    assert _tester_stats(code).mu == _mu_bruteforce(code)


def test_build_code_errors():
    with pytest.raises(CodeError):
        build_code(zero_restriction_sheaf(fx.cycle(3), 2, 2, other_dim=0), 1)
    with pytest.raises(CodeError):
        build_code(constant_sheaf(fx.cycle(3), 1, 2), 5)


def test_decoder_corrects_single_errors_on_torus_constant_sheaf():
    F = constant_sheaf(fx.torus7(), 1, 2)
    code = build_code(F, 0)
    for v in range(7):
        f = np.zeros(7, dtype=np.int64)
        f[v] = 1
        r = decode(code, f)
        assert r.clean and not r.word.any()


def test_decoder_leaves_codewords_alone():
    F = constant_sheaf(fx.petersen(), 1, 2)
    code = build_code(F, 0)
    r = decode(code, np.ones(10, dtype=np.int64))
    assert r.clean and r.corrections == 0


def test_decode_radius_formula():
    F = constant_sheaf(fx.torus7(), 1, 2)
    X = F.X
    eta = decode_radius(F, 0, Fraction(1), Fraction(1, 2))
    c = Fraction(X.Q, 3) * comb(3, 2) + 1
    assert eta == min(Fraction(1) / c, Fraction(1, 2)) / (2 * X.degree(0, 2))
    assert decode_radius(F, 0, INF, INF) == INF


def test_css_code_torus():
    css = build_css(constant_sheaf(fx.torus7(), 1, 2), 1)
    assert css.n == 21 and css.logical_dim == 2
    assert all(css.orthogonality.values())
    assert css.max_check_weights() == (3, 6)
    # X-side decoding fixes a single flipped edge modulo coboundaries
    f = np.zeros(21, dtype=np.int64)
    f[0] = 1
    r = css_x_decode(css, f)
    assert r.clean


def test_css_requires_middle_degree():
    with pytest.raises(CodeError):
        build_css(constant_sheaf(fx.cycle(4), 1, 2), 0)


def test_perp_is_orthogonal_complement():
    V = np.array([[1, 1, 0, 1]])
    P = perp(V, 3, 4)
    assert P.shape[0] == 3 and not ((V @ P.T) % 3).any()
