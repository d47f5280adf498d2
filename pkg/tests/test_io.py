from __future__ import annotations

import json

import numpy as np
import pytest

from sheafltc import fixtures as fx
from sheafltc import io
from sheafltc.covering import double_cover_from_cocycle
from sheafltc.homology import cohomology
from sheafltc.sheaf import constant_sheaf, random_sheaf

from conftest import small_complexes


@pytest.mark.parametrize("name", sorted(small_complexes()))
def test_complex_roundtrip(name):
    X = small_complexes()[name]
    Y = io.complex_from_json(json.loads(io.dumps(io.complex_to_json(X))))
    assert Y.f_vector() == X.f_vector()
    assert all(Y.faces[k] == X.faces[k] for k in range(X.d + 1))


@pytest.mark.parametrize("name", ["torus7_zero", "cover3_pushforward", "decoder_sheaf"])
def test_sheaf_roundtrip(name):
    F = fx.get_sheaf_fixture(name)
    G = io.sheaf_from_json(json.loads(io.dumps(io.sheaf_to_json(F, with_complex=True))))
    assert G.p == F.p
    assert {x: n for x, n in G.dims.items() if x} == {x: n for x, n in F.dims.items() if x}
    assert cohomology(G).h == cohomology(F).h


def test_random_sheaf_roundtrip(rng):
    X = fx.tetrahedron()
    F = random_sheaf(X, rng, 3, ambient=3, density=0.7)
    G = io.sheaf_from_json(io.sheaf_to_json(F), X)
    for key, M in F.res.items():
        if key[0]:
            assert np.array_equal(G.res[key] % 3, np.asarray(M) % 3)


def test_cochain_roundtrip(rng):
    F = constant_sheaf(fx.torus7(), 2, 2)
    f = rng.integers(0, 2, size=F.cochain_dim(1))
    g, k = io.cochain_from_json(F, json.loads(io.dumps(io.cochain_to_json(F, f, 1))))
    assert k == 1 and np.array_equal(f, g)


def test_covering_roundtrip():
    X = fx.cycle(5)
    u = double_cover_from_cocycle(X, cohomology(constant_sheaf(X, 1, 2)).reps[1][0])
    v = io.covering_from_json(json.loads(io.dumps(io.covering_to_json(u))))
    assert list(v.vmap) == list(u.vmap) and v.degree == 2


def test_bad_json_reports_location(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"vertices": [0, 1],\n "maximal_faces": [[0, 1]')
    with pytest.raises(io.FormatError, match="line 2"):
        io.load_json(str(p))


def test_missing_file():
    with pytest.raises(io.FormatError):
        io.load_json("/nonexistent/file.json")


def test_missing_restriction_rejected():
    obj = io.sheaf_to_json(constant_sheaf(fx.cycle(3), 1, 2), with_complex=True)
    obj["restrictions"] = obj["restrictions"][1:]
    with pytest.raises(io.FormatError, match="missing restriction"):
        io.sheaf_from_json(obj)


def test_incompatible_restrictions_rejected():
    F = constant_sheaf(fx.delta(2), 1, 2)
    obj = io.sheaf_to_json(F, with_complex=True)
    for r in obj["restrictions"]:
        if r["from"] == "0" and r["to"] == "0-1":
            r["matrix"] = [[0]]
    with pytest.raises(io.FormatError):
        io.sheaf_from_json(obj)


def test_complex_json_needs_fields():
    with pytest.raises(io.FormatError):
        io.complex_from_json({"vertices": [0]})


def test_cochain_unknown_face():
    F = constant_sheaf(fx.cycle(3), 1, 2)
    with pytest.raises(io.FormatError):
        io.cochain_from_json(F, {"degree": 1, "values": {"0-9": [1]}})


def test_jsonable_handles_special_values():
    from fractions import Fraction

    out = io.jsonable({(0, 1): np.int64(3), "a": [Fraction(1, 2), float("inf"), np.bool_(True)]})
    assert out == {"0-1": 3, "a": ["1/2", "inf", True]}
