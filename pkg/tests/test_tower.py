from __future__ import annotations

import json
from fractions import Fraction

import pytest

from sheafltc import fixtures as fx
from sheafltc.covering import build_tower, double_cover_from_cocycle
from sheafltc.homology import cohomology
from sheafltc.io import jsonable
from sheafltc.sheaf import constant_sheaf
from sheafltc.tower import audit, filtration_check, rate_conservation


def _c6_over_c3():
    X = fx.cycle(3)
    z = cohomology(constant_sheaf(X, 1, 2)).reps[1][0]
    return X, double_cover_from_cocycle(X, z)


def test_filtration_on_hexagon_over_triangle():
    X, u = _c6_over_c3()
    assert u.source.n_faces(0) == 6
    r = filtration_check(u, constant_sheaf(X, 1, 2))
    assert all(v == [2, 1, 1] for k, v in r["dims"].items() if k != "()")
    assert all(r[k] for k in ("phi_compatible", "psi_compatible", "F1_iso_F", "quotient_iso_F", "exact", "h_additive"))
    # connected double cover of a circle: h(C6) = (1, 1)
    assert r["h"]["F2prime"][0] == 1 and r["h"]["F2prime"][1] == 1


def test_filtration_rejects_odd_characteristic():
    X, u = _c6_over_c3()
    with pytest.raises(ValueError):
        filtration_check(u, constant_sheaf(X, 1, 3))


def test_rate_conservation_zero_sheaf_torus():
    X = fx.torus7()
    F = fx.get_sheaf_fixture("torus7_zero")
    tr = rate_conservation(X, F, build_tower(X, 3, seed=0), 0)
    assert tr.ok
    gaps = [lv["gap"] for lv in tr.levels]
    # h = (28, 21, 14) at the base, C^0 = F_2^28
    assert gaps == [7 * 2 ** r for r in range(4)]
    assert tr.rho == Fraction(1, 4)
    assert all(lv["doubling_ok"] for lv in tr.levels)


def test_rate_conservation_flags_nonzero_lower_degree():
    X = fx.cycle(5)
    F = constant_sheaf(X, 1, 2)
    tr = rate_conservation(X, F, build_tower(X, 2, seed=0), 1)
    assert not tr.ok and "h^0" in tr.failure


def test_constant_sheaf_gap_is_not_positive():
    X = fx.petersen()
    for m in (1, 2):
        h = cohomology(constant_sheaf(X, m, 2)).h
        assert h[0] <= h[1]


def test_audit_report_is_jsonable():
    rep = audit(fx.torus7(), constant_sheaf(fx.torus7(), 1, 2), depth=2)
    d = json.loads(json.dumps(jsonable(rep.as_dict())))
    assert set(d) >= {"t1", "t2", "t3", "overall", "overall_measured", "granted"}
    assert d["t3"] == {"ok": False, "h0": 1, "h1": 2}
    assert rep.verdicts()["t1"] is True


def test_audit_rejects_odd_field():
    with pytest.raises(ValueError):
        audit(fx.cycle(5), constant_sheaf(fx.cycle(5), 1, 3))
