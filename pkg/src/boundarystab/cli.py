"""Command-line front end.  JSON on stdout, diagnostics on stderr.

Exit codes: 0 ok, 2 malformed input, 3 precondition violated, 4 inconclusive.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import SCHEMA_VERSION, __version__, linalg
from .fixtures import KINDS, FixtureInfeasible, FixtureSpec, generate
from .jumping import (detect_strong, detect_weak, elementary_transform,
                      strong_direction_locus)
from .nondegeneracy import INCONCLUSIVE, nondegenerate
from .stabilizer import ClassificationError, PreconditionError, classify
from .tensor import (Format, FormatError, act, format_scalar, group_from_json,
                     tensor_from_json, tensor_to_json)

EXIT_OK, EXIT_MALFORMED, EXIT_PRECONDITION, EXIT_INCONCLUSIVE = 0, 2, 3, 4


class Malformed(Exception):
    pass


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise Malformed(f"{path}: {exc}") from exc


def _load_tensor(path: str):
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise Malformed(f"{path}: top level must be an object")
    try:
        return tensor_from_json(obj)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise Malformed(f"{path}: {exc}") from exc


def _csv(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _rational_csv(text: str) -> list[Fraction]:
    try:
        return [linalg.to_fraction(t) for t in _csv(text)]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise Malformed(f"bad rational list {text!r}: {exc}") from exc


def digest(A) -> str:
    payload = json.dumps(tensor_to_json(A), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(payload.encode()).hexdigest()


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=1) + "\n")


def _nd_options(args) -> dict:
    opts = {"seed": args.seed}
    if getattr(args, "nd_restarts", None) is not None:
        opts["restarts"] = args.nd_restarts
    return opts


# ---------------------------------------------------------------------------
# subcommands


def cmd_classify(args) -> int:
    A = _load_tensor(args.file)
    report = classify(A, nondeg_options=_nd_options(args))
    _emit(report.to_json())
    return EXIT_OK


def cmd_nondegenerate(args) -> int:
    A = _load_tensor(args.file)
    opts = {"method": args.method, "seed": args.seed, "restarts": args.restarts}
    if args.tol is not None:
        opts["tol_zero"] = args.tol
    if args.method == "exact" and (A.format.p != 2 or not A.exact):
        raise PreconditionError("exact method needs p = 2 and rational entries")
    v = nondegenerate(A, **opts)
    _emit(v.to_json())
    return EXIT_INCONCLUSIVE if v.status == INCONCLUSIVE else EXIT_OK


def _search_opts(args) -> dict:
    opts = {"restarts": args.restarts, "seed": args.seed}
    if args.tol is not None:
        opts["tol"] = args.tol
    return opts


def cmd_jumping(args) -> int:
    A = _load_tensor(args.file)
    opts = _search_opts(args)
    if args.mode == "weak":
        if args.slot is None:
            raise Malformed("--mode weak needs --slot")
        if not 1 <= args.slot <= A.format.p:
            raise Malformed(f"--slot must be in 1..{A.format.p}")
        report = detect_weak(A, args.slot, **opts)
        _emit(report.to_json())
        return EXIT_OK
    report = detect_strong(A, **opts)
    out = report.to_json()
    slots = [args.slot] if args.slot else range(1, A.format.p + 1)
    out["direction_loci"] = [strong_direction_locus(A, j, report=report).to_json() for j in slots]
    _emit(out)
    return EXIT_OK


def cmd_transform(args) -> int:
    A = _load_tensor(args.file)
    xi = np.array(_rational_csv(args.xi), dtype=object) if A.exact else \
        np.array([complex(t) for t in _csv(args.xi)], dtype=np.complex128)
    if xi.shape != (A.dims[0],):
        raise Malformed(f"--xi needs {A.dims[0]} coordinates")
    if not 1 <= args.slot <= A.format.p:
        raise Malformed(f"--slot must be in 1..{A.format.p}")
    T = elementary_transform(A, xi, args.slot)
    out = tensor_to_json(T.tensor)
    out["format"] = str(T.tensor.format)
    out["quotient"] = {
        "v0": [format_scalar(c) for c in T.v0],
        "vj": [format_scalar(c) for c in T.vj],
        "h": [format_scalar(c) for c in T.h],
    }
    _emit(out)
    return EXIT_OK


def cmd_act(args) -> int:
    A = _load_tensor(args.file)
    obj = _load_json(args.group)
    try:
        g = group_from_json(obj)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise Malformed(f"{args.group}: {exc}") from exc
    if tuple(g.dims) != tuple(A.dims):
        raise Malformed(f"group dims {list(g.dims)} do not match tensor dims {list(A.dims)}")
    _emit(tensor_to_json(act(g, A)))
    return EXIT_OK


def cmd_make(args) -> int:
    try:
        fmt = Format(tuple(int(t) for t in _csv(args.k)))
    except ValueError as exc:
        raise Malformed(f"--k: {exc}") from exc
    params = {}
    if args.nodes:
        params["nodes"] = _rational_csv(args.nodes)
    if args.entries:
        params["entries"] = _rational_csv(args.entries)
    try:
        fx = generate(FixtureSpec(args.kind, fmt, seed=args.seed, params=params))
    except FixtureInfeasible as exc:
        _emit({"infeasible": str(exc), "report": exc.report})
        return EXIT_INCONCLUSIVE
    out = tensor_to_json(fx.tensor)
    out["expected"] = fx.expected
    out["fixture"] = {"kind": args.kind, "k": list(fmt.k), "seed": args.seed}
    _emit(out)
    return EXIT_OK


def build_report(A, seed: int = 0, restarts: int = 256, nd_restarts: int = 64) -> dict:
    """Every analysis on one tensor, with the identity-flag versus SL2 check."""
    timings = {}
    out = {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "seed": seed,
           "digest": digest(A), "format": str(A.format), "field": A.field}
    t = time.perf_counter()
    verdict = nondegenerate(A, seed=seed, restarts=nd_restarts)
    timings["nondegeneracy"] = time.perf_counter() - t
    out["nondegeneracy"] = verdict.to_json()

    t = time.perf_counter()
    strong = detect_strong(A, restarts=restarts, seed=seed)
    summary = {"strong": {"count_distinct": strong.count_distinct, "count_separated": strong.count_separated,
                          "identity_flag": strong.identity_flag, "curve_evidence": strong.curve_evidence,
                          "exact_items": sum(it.exact for it in strong.items)},
               "weak": {}, "direction_loci": {}}
    for j in range(1, A.format.p + 1):
        weak = detect_weak(A, j, restarts=restarts, seed=seed, strong=strong)
        summary["weak"][str(j)] = {"count_distinct": weak.count_distinct}
        loc = strong_direction_locus(A, j, report=strong)
        summary["direction_loci"][str(j)] = {"count": len(loc.directions), "infinite": loc.infinite}
    timings["jumping"] = time.perf_counter() - t
    out["jumping"] = summary

    t = time.perf_counter()
    try:
        stab = classify(A, verdict=verdict)
        out["stabilizer"] = stab.to_json()
        cls = stab.cls
    except PreconditionError as exc:
        out["stabilizer"] = {"error": "precondition", "message": str(exc)}
        cls = None
    except ClassificationError as exc:
        out["stabilizer"] = {"error": "classification", "message": str(exc)}
        cls = None
    timings["stabilizer"] = time.perf_counter() - t

    if cls is None:
        status = "not-applicable"
    else:
        status = "consistent" if strong.identity_flag == (cls == "SL2") else "INCONSISTENT"
    out["consistency"] = {"identity_flag_vs_sl2": status, "identity_flag": strong.identity_flag, "class": cls}
    out["timings"] = timings
    return out


def cmd_report(args) -> int:
    A = _load_tensor(args.file)
    if A.format.has_trivial_factor:
        raise PreconditionError(f"format {A.format} has a factor with k_i = 0")
    _emit(build_report(A, seed=args.seed, restarts=args.restarts))
    return EXIT_OK


# ---------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="boundarystab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="stabilizer dimension and class")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nd-restarts", type=int, default=None, help="restarts of the nondegeneracy search")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("nondegenerate", help="Det A != 0 verdict")
    p.add_argument("file")
    p.add_argument("--method", choices=["auto", "exact", "numeric"], default="auto")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--tol", type=float, default=None, help="zero threshold for the smallest singular value")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_nondegenerate)

    p = sub.add_parser("jumping", help="strong or weak jumping hyperplanes")
    p.add_argument("file")
    p.add_argument("--mode", choices=["strong", "weak"], required=True)
    p.add_argument("--slot", type=int, default=None)
    p.add_argument("--restarts", type=int, default=256)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_jumping)

    p = sub.add_parser("transform", help="elementary transformation at a weak covector")
    p.add_argument("file")
    p.add_argument("--xi", required=True, help="comma separated covector, rationals as num/den")
    p.add_argument("--slot", type=int, required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("act", help="apply a group element")
    p.add_argument("file")
    p.add_argument("--group", required=True)
    p.set_defaults(func=cmd_act)

    p = sub.add_parser("make", help="generate a fixture tensor")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--k", required=True, help="k0,k1,...,kp")
    p.add_argument("--nodes", default=None)
    p.add_argument("--entries", default=None, help="diagonal entries on the support cells")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_make)

    p = sub.add_parser("report", help="every analysis in one JSON document")
    p.add_argument("file")
    p.add_argument("--restarts", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except Malformed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ClassificationError as exc:
        print(f"classification failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
