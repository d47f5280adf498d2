from __future__ import annotations

import itertools

import numpy as np
import pytest

from sheafltc import fixtures as fx
from sheafltc.sheaf import constant_sheaf


def small_complexes():
    """Named complex fixtures used across the suite (all pure)."""
    return {
        "c3": fx.cycle(3),
        "c5": fx.cycle(5),
        "c6": fx.cycle(6),
        "delta2": fx.delta(2),
        "delta3": fx.delta(3),
        "delta4": fx.delta(4),
        "tetrahedron": fx.tetrahedron(),
        "torus7": fx.torus7(),
        "K4": fx.complete_graph(4),
        "K5": fx.complete_graph(5),
        "K33": fx.complete_bipartite(3, 3),
        "petersen": fx.petersen(),
        "two_edges": fx.two_edges(),
    }


def sheaf_fixtures():
    """Constant F_2 sheaves on every complex fixture plus the named sheaf fixtures."""
    out = {f"const:{n}": constant_sheaf(X, 1, 2) for n, X in small_complexes().items()}
    for n in fx.SHEAF_FIXTURES:
        out[n] = fx.get_sheaf_fixture(n)
    return out


def brute_span(basis: np.ndarray, p: int, n: int) -> set:
    """Every vector of span(basis) as a tuple, by direct enumeration of coefficients."""
    basis = np.asarray(basis, dtype=np.int64).reshape(-1, n)
    out = set()
    for c in itertools.product(range(p), repeat=basis.shape[0]):
        out.add(tuple(((np.array(c, dtype=np.int64) @ basis) % p).tolist()) if basis.shape[0] else (0,) * n)
    return out


def report(label: str, ok: bool, detail: str = "") -> None:
    print(f"{label}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, detail


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
