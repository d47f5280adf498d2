"""JSON formats for complexes, sheaves, cochains and coverings."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, Optional

import numpy as np

from .complex import SimplicialComplex, face_key, from_maximal_faces, parse_face_key
from .sheaf import Sheaf, SheafError, _facets

__all__ = [
    "FormatError",
    "load_json",
    "maximal_faces",
    "complex_to_json",
    "complex_from_json",
    "sheaf_to_json",
    "sheaf_from_json",
    "cochain_to_json",
    "cochain_from_json",
    "covering_to_json",
    "covering_from_json",
    "jsonable",
    "dumps",
]


class FormatError(ValueError):
    pass


def load_json(path: str):
    """Read a JSON file, reporting the path and parse location on failure."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise FormatError(f"{path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None


def maximal_faces(X: SimplicialComplex):
    out = []
    for k in range(X.d, -1, -1):
        for y in X.faces[k]:
            if k == X.d or not X.cofaces(y, k + 1):
                out.append(list(y))
    return sorted(out)


def complex_to_json(X: SimplicialComplex) -> dict:
    return {"v": 1, "vertices": [str(v) for v in X.labels], "maximal_faces": maximal_faces(X)}


def complex_from_json(obj) -> SimplicialComplex:
    if not isinstance(obj, dict) or "vertices" not in obj or "maximal_faces" not in obj:
        raise FormatError("complex JSON needs 'vertices' and 'maximal_faces'")
    try:
        faces = [[int(v) for v in f] for f in obj["maximal_faces"]]
        return _relabel(from_maximal_faces(list(range(len(obj["vertices"]))), faces), obj["vertices"])
    except (TypeError, ValueError) as e:
        raise FormatError(f"bad complex: {e}") from None


def _relabel(X: SimplicialComplex, labels) -> SimplicialComplex:
    X.labels = list(labels)
    return X


def sheaf_to_json(F: Sheaf, with_complex: bool = False) -> dict:
    out = {"v": 1, "field": F.p, "augmented": bool(F.augmented),
           "dims": {face_key(x): int(n) for x, n in sorted(F.dims.items(), key=lambda t: (len(t[0]), t[0]))
                    if x or F.augmented},
           "restrictions": [{"from": face_key(x), "to": face_key(y), "matrix": np.asarray(M).tolist()}
                            for (x, y), M in sorted(F.res.items(), key=lambda t: (len(t[0][1]), t[0][1], t[0][0]))
                            if x or F.augmented]}
    if with_complex:
        out["complex"] = complex_to_json(F.X)
    return out


def sheaf_from_json(obj, X: Optional[SimplicialComplex] = None) -> Sheaf:
    if not isinstance(obj, dict):
        raise FormatError("sheaf JSON must be an object")
    if X is None:
        if "complex" not in obj:
            raise FormatError("sheaf JSON has no embedded complex and none was given")
        X = complex_from_json(obj["complex"])
    try:
        p = int(obj["field"])
        aug = bool(obj.get("augmented", False))
        dims = {parse_face_key(k): int(v) for k, v in obj["dims"].items()}
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"bad sheaf header: {e}") from None
    for k in range(X.d + 1):
        for x in X.faces[k]:
            dims.setdefault(x, 0)
    if aug:
        dims.setdefault((), 0)
    res = {}
    for r in obj.get("restrictions", []):
        try:
            x, y = parse_face_key(r["from"]), parse_face_key(r["to"])
            M = np.array(r["matrix"], dtype=np.int64).reshape(dims.get(y, 0), dims.get(x, 0))
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"bad restriction entry {r!r}: {e}") from None
        res[(x, y)] = M % p
    # missing restrictions between nonzero spaces are an error; zero spaces get empty matrices
    for k in range(X.d + 1):
        for y in X.faces[k]:
            for x in _facets(y):
                if (x, y) not in res:
                    if x == () and not aug:
                        continue
                    if dims.get(x, 0) and dims.get(y, 0):
                        raise FormatError(f"missing restriction {face_key(x)!r} -> {face_key(y)!r}")
                    res[(x, y)] = np.zeros((dims.get(y, 0), dims.get(x, 0)), dtype=np.int64)
    try:
        F = Sheaf(X, p, dims, res, aug)
        F.check()
    except SheafError as e:
        raise FormatError(f"invalid sheaf: {e}") from None
    return F


def cochain_to_json(F: Sheaf, f: np.ndarray, k: int) -> dict:
    o = F.offsets(k)
    f = np.asarray(f).ravel()
    return {"v": 1, "degree": k,
            "values": {face_key(x): f[o[i]:o[i + 1]].tolist() for i, x in enumerate(F.X.faces_of(k))}}


def cochain_from_json(F: Sheaf, obj) -> tuple:
    """Return (vector, degree); faces not listed are zero."""
    k = int(obj["degree"])
    o = F.offsets(k)
    f = np.zeros(F.cochain_dim(k), dtype=np.int64)
    for key, vals in obj.get("values", {}).items():
        x = parse_face_key(key)
        try:
            i = F.X.face_index(x)
        except KeyError:
            raise FormatError(f"cochain names unknown face {key!r}") from None
        if len(vals) != o[i + 1] - o[i]:
            raise FormatError(f"cochain value at {key!r} has wrong length")
        f[o[i]:o[i + 1]] = np.asarray(vals, dtype=np.int64) % F.p
    return f, k


def covering_to_json(u) -> dict:
    return {"v": 1, "source": complex_to_json(u.source), "target": complex_to_json(u.target),
            "vertex_map": list(u.vmap)}


def covering_from_json(obj):
    from .covering import SimplicialMap, verify_covering

    return verify_covering(SimplicialMap(complex_from_json(obj["source"]), complex_from_json(obj["target"]),
                                         obj["vertex_map"]))


def jsonable(x):
    """Convert numpy arrays, Fractions and tuple keys into plain JSON values."""
    if isinstance(x, dict):
        return {(k if isinstance(k, str) else face_key(k) if isinstance(k, tuple) else str(k)): jsonable(v)
                for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.floating):
        x = float(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float) and (x != x or x in (float("inf"), float("-inf"))):
        return str(x)
    return x


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))
