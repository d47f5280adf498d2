"""Command-line front end: every report is deterministic JSON tagged with "v": 1."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

import numpy as np

from . import io
from .complex import spectral_expansion
from .config import enumeration_budget
from .homology import cohomology

__all__ = ["main", "build_parser", "config_hash", "trial_seeds"]


class InputError(Exception):
    pass


def _file_digest(path: Optional[str]) -> Optional[str]:
    if not path:
        return None
    try:
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()[:16]
    except OSError:
        return None


def config_hash(args: argparse.Namespace) -> str:
    """Hash of the command, its parameters and the contents of every input file."""
    skip = {"out", "jobs", "func", "out_dir"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    for k in ("complex", "sheaf", "word", "covering"):
        if cfg.get(k):
            cfg[k + "_sha"] = _file_digest(cfg[k])
            cfg[k] = os.path.basename(cfg[k])
    cfg["budget_env"] = os.environ.get("SHEAFLTC_BUDGET")
    return hashlib.sha256(json.dumps(cfg, sort_keys=True, default=str).encode()).hexdigest()[:16]


def trial_seeds(seed: int, n: int) -> List[int]:
    """Independent per-trial seeds split from one root seed."""
    return [int(s.generate_state(1, dtype=np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


# ---------------------------------------------------------------------------
# input loading


def _load_complex(path):
    return io.complex_from_json(io.load_json(path))


def _load_sheaf(args):
    X = _load_complex(args.complex) if getattr(args, "complex", None) else None
    if not getattr(args, "sheaf", None):
        if X is None:
            raise io.FormatError("need --sheaf (with an embedded complex) or --complex")
        from .sheaf import constant_sheaf
        return constant_sheaf(X, 1, 2)
    return io.sheaf_from_json(io.load_json(args.sheaf), X)


def _budget(args) -> int:
    return args.budget if getattr(args, "budget", None) else enumeration_budget()


# ---------------------------------------------------------------------------
# subcommands (each returns (report, exit code))


def cmd_complex(args):
    X = _load_complex(args.complex)
    rep = {"f_vector": X.f_vector(), "dim": X.d, "euler": X.euler_characteristic(), "pure": X.is_pure,
           "connected": X.is_connected, "Q": X.Q if X.is_pure else None}
    if X.is_pure and X.d >= 1:
        rep["spectral"] = {"lambda_max": round(spectral_expansion(X).lam_max, 12),
                           "lambda_min": round(spectral_expansion(X).lam_min, 12)}
    return rep, 0


def cmd_cohomology(args):
    F = _load_sheaf(args)
    H = cohomology(F)
    return {"h": H.h_list(), "euler_ok": H.euler_ok()}, 0


def cmd_expand(args):
    from .expansion import coboundary_expansion, cosystolic_expansion

    F = _load_sheaf(args)
    fn = cosystolic_expansion if args.kind == "cosystolic" else coboundary_expansion
    r = fn(F, args.dim, args.norm, mode=args.mode, budget=_budget(args), samples=args.samples, seed=args.seed)
    out = {"kind": args.kind, "dim": args.dim, "norm": args.norm, **r.as_dict()}
    out["sample_seed"] = out.pop("seed")
    for key in ("witness", "delta_witness"):
        w = getattr(r, key)
        out[key] = None if w is None else io.cochain_to_json(F, w, args.dim)
    return out, 0


def cmd_code(args):
    from .codes import build_code, code_distance, tester_stats

    F = _load_sheaf(args)
    code = build_code(F, args.dim)
    dist, w = code_distance(code, _budget(args))
    ts = tester_stats(code, _budget(args), samples=args.samples, seed=args.seed)
    return {"n": code.n, "alphabet_dim": code.m, "dim": code.dim, "rate": code.rate, "distance": dist,
            "distance_witness": None if w is None else io.cochain_to_json(F, w, args.dim),
            "mu": ts.mu, "mu_mode": ts.mode,
            "mu_witness": None if ts.witness is None else io.cochain_to_json(F, ts.witness, args.dim)}, 0


def cmd_decode(args):
    from .codes import build_code, decode

    F = _load_sheaf(args)
    f, k = io.cochain_from_json(F, io.load_json(args.word))
    code = build_code(F, k)
    r = decode(code, f, _budget(args))
    return {"clean": r.clean, "corrections": r.corrections, "pops": r.pops,
            "word": io.cochain_to_json(F, r.word, k)}, 0 if r.clean else 1


def cmd_css(args):
    from .codes import build_css

    F = _load_sheaf(args)
    c = build_css(F, args.dim)
    wx, wz = c.max_check_weights()
    return {"n": c.n, "logical_dim": c.logical_dim, "rate": c.rate, "orthogonality": c.orthogonality,
            "max_check_weights": [wx, wz]}, 0 if all(c.orthogonality.values()) else 1


def _modify_trial(payload):
    sheaf_obj, complex_obj, seed, cap, predict = payload
    from .modify import cup_predictor, run_process

    X = io.complex_from_json(complex_obj) if complex_obj else None
    F = io.sheaf_from_json(sheaf_obj, X)
    st = run_process(F, seed=seed, max_E_dim=cap)
    out = {"seed": seed, "stop": st.stop, "trace": st.trace, "invariants_ok": st.invariants_ok,
           "e0_dim": st.e0_dim}
    if predict and st.stop != "not-needed" and F.X.d >= 2:
        rep = cup_predictor(F, st.E1, seed=seed)
        rep.observed_E1_prime = st.trace[0]["dim_ker_omega"] if st.trace else None
        out["predictor"] = rep.as_dict()
    return out


def cmd_modify(args):
    X = _load_complex(args.complex) if args.complex else None
    sheaf_obj = io.load_json(args.sheaf)
    io.sheaf_from_json(sheaf_obj, X)  # validate once up front
    cap = args.max_e_dim
    if cap not in ("auto", "none"):
        try:
            cap = int(cap)
        except ValueError:
            raise InputError("--max-e-dim must be an integer, 'auto' or 'none'") from None
    cap = None if cap == "none" else cap
    cobj = io.complex_to_json(X) if X is not None else None
    payloads = [(sheaf_obj, cobj, s, cap, args.predict) for s in trial_seeds(args.seed, args.trials)]
    if args.jobs and args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            trials = list(ex.map(_modify_trial, payloads))
    else:
        trials = [_modify_trial(p) for p in payloads]
    ok = all(t["invariants_ok"] for t in trials)
    return {"trials": trials, "invariants_ok": ok}, 0 if ok else 1


def cmd_tower(args):
    from .covering import TowerError, build_tower
    from .tower import rate_conservation

    F = _load_sheaf(args)
    try:
        tw = build_tower(F.X, args.depth, args.seed)
    except TowerError as e:
        return {"ok": False, "stage": e.stage, "reason": str(e)}, 1
    tr = rate_conservation(F.X, F, tw, args.dim)
    if args.out_dir:
        for r, L in enumerate(tw.levels):
            d = os.path.join(args.out_dir, f"level_{r}")
            os.makedirs(d, exist_ok=True)
            with open(os.path.join(d, "complex.json"), "w") as fh:
                fh.write(io.dumps(io.complex_to_json(L)) + "\n")
            if r:
                with open(os.path.join(d, "covering.json"), "w") as fh:
                    fh.write(io.dumps(io.covering_to_json(tw.maps[r - 1])) + "\n")
    return {"classes": tw.classes, "f_vectors": [L.f_vector() for L in tw.levels], **tr.as_dict()}, 0 if tr.ok else 1


def cmd_audit(args):
    from .tower import audit

    F = _load_sheaf(args)
    rep = audit(F.X, F, depth=args.depth, seed=args.seed, budget=_budget(args))
    out = rep.as_dict()
    out["verdicts"] = rep.verdicts()
    return out, 0 if rep.overall else 1


def cmd_fixtures(args):
    from .fixtures import FIXTURES, SHEAF_FIXTURES, get_fixture, get_sheaf_fixture

    params = {"n": args.n} if args.n is not None else {}
    if args.name in FIXTURES:
        X = get_fixture(args.name, **params)
        F = get_sheaf_fixture(args.name, **params)
        out = io.complex_to_json(X)
    elif args.name in SHEAF_FIXTURES:
        F = get_sheaf_fixture(args.name)
        X = F.X
        out = io.sheaf_to_json(F, with_complex=True)
    else:
        raise InputError(f"unknown fixture {args.name!r}; choose from {sorted(FIXTURES) + sorted(SHEAF_FIXTURES)}")
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        with open(os.path.join(args.out_dir, "complex.json"), "w") as fh:
            fh.write(io.dumps(io.complex_to_json(X)) + "\n")
        with open(os.path.join(args.out_dir, "sheaf.json"), "w") as fh:
            fh.write(io.dumps(io.sheaf_to_json(F)) + "\n")
    return out, 0


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, sheaf: bool = True, dim: bool = False, seed: bool = True):
    p.add_argument("--complex", help="complex JSON file")
    if sheaf:
        p.add_argument("--sheaf", help="sheaf JSON file (default: constant F_2 sheaf)")
    if dim:
        p.add_argument("--dim", type=int, default=0, help="cochain degree k")
    if seed:
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None, help="enumeration budget (overrides SHEAFLTC_BUDGET)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sheafltc", description="Sheaves on simplicial complexes, expansion and codes.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complex", help="summary of a complex")
    _common(p, sheaf=False, seed=False)
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("cohomology", help="dimensions h^i")
    _common(p, seed=False)
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("expand", help="coboundary or cosystolic expansion")
    _common(p, dim=True)
    p.add_argument("--norm", choices=["ws", "ham", "basis"], default="ws")
    p.add_argument("--mode", choices=["exact", "sample"], default="exact")
    p.add_argument("--kind", choices=["coboundary", "cosystolic"], default="coboundary")
    p.add_argument("--samples", type=int, default=2000)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("code", help="cocycle code rate, distance and tester soundness")
    _common(p, dim=True)
    p.add_argument("--samples", type=int, default=2000)
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("decode", help="run the local decoder on a word")
    _common(p, seed=False)
    p.add_argument("--word", required=True, help="cochain JSON file")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("css", help="quantum CSS code from the sheaf chain complex")
    _common(p, dim=True, seed=False)
    p.set_defaults(func=cmd_css)

    p = sub.add_parser("modify", help="run the sheaf modification process")
    _common(p)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--max-e-dim", default="auto", help="integer, 'auto' or 'none'")
    p.add_argument("--predict", action="store_true", help="report the cup-product prediction")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_modify)

    p = sub.add_parser("tower", help="build a tower of double covers and trace rates")
    _common(p, dim=True)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--out-dir", help="write level_r/ directories here")
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("audit", help="audit the three tower conditions at k = 0")
    _common(p)
    p.add_argument("--depth", type=int, default=3)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("fixtures", help="emit a built-in complex or sheaf")
    p.add_argument("--name", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out-dir", help="also write complex.json and sheaf.json here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    from .codes import CodeError
    from .sheaf import SheafError

    try:
        if args.command not in ("fixtures", "modify") and not (getattr(args, "complex", None) or getattr(args, "sheaf", None)):
            raise InputError("need --complex and/or --sheaf")
        if args.command == "modify" and not args.sheaf:
            raise InputError("modify needs --sheaf")
        report, code = args.func(args)
    except (InputError, io.FormatError, SheafError, CodeError, KeyError, ValueError) as e:
        print(f"sheafltc {args.command}: error: {e}", file=sys.stderr)
        ap._subparsers._group_actions[0].choices[args.command].print_usage(sys.stderr)
        return 2
    report = {**report, "v": 1, "command": args.command, "seed": getattr(args, "seed", None),
              "config_hash": config_hash(args)}
    text = io.dumps(report)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
