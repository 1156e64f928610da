"""Command line: ``refdet verify | calibrate | enumerate``.

Exit codes: 0 identities hold (or calibrated constants are stable), 1 mismatch,
2 usage or scale error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import enumeration as en
from .harness import (
    IDENTITIES,
    DegenerateRhsError,
    FileFormatError,
    ScaleLimitError,
    VerifyParams,
    WeightSpec,
    calibrate_constants,
    calibration_stable,
    dumps,
    parse_range,
    verify_identity,
)
from .ring import MixedRadicandError


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _cmd_verify(args) -> int:
    if args.weights == "explicit" and not args.weights_file:
        raise ValueError("--weights explicit needs --weights-file")
    spec = WeightSpec(args.weights, seed=args.seed, bound=args.bound, path=args.weights_file)
    params = VerifyParams(args.family, args.k, spec, args.seed, args.mode, args.tol, args.timing)
    options = {"variant": args.triangle_weight} if args.identity == "mv" else {}
    report = verify_identity(args.identity, params, **options)
    _write(report.to_json(), args.report)
    return 0 if report.holds else 1


def _cmd_calibrate(args) -> int:
    key, values = parse_range(args.range)
    if key not in ("n", "m"):
        raise ValueError(f"range key must be n (or m for mv), not {key!r}")
    if key == "m":
        values = [2 * v for v in values]
    table = calibrate_constants(args.identity, values, family=args.family, k=args.k,
                                seed=args.seed, variant=args.triangle_weight)
    _write(dumps(table), args.report)
    return 0 if calibration_stable(args.identity, table) else 1


def _structures(kind: str, vertices: int, edges: int | None):
    if kind == "doombs":
        return [list(map(list, g)) for g in en.enumerate_doombs(vertices, edges if edges is not None else vertices)]
    if kind == "trees":
        return [list(map(list, t)) for t in en.enumerate_trees(vertices)]
    if kind == "3trees":
        if vertices % 2 == 0:
            raise ValueError("3-trees need an odd number of vertices")
        return [list(map(list, t)) for t in en.enumerate_3trees((vertices - 1) // 2, vertices)]
    if kind == "bbasic":
        return [[list(e) for e in g.edges] for g in en.enumerate_bbasic(vertices)]
    raise ValueError(kind)


def _cmd_enumerate(args) -> int:
    items = _structures(args.kind, args.vertices, args.edges)
    out = {"kind": args.kind, "vertices": args.vertices, "count": len(items)}
    if args.kind == "doombs":
        out["edges"] = args.edges if args.edges is not None else args.vertices
    if not args.count_only:
        out["items"] = items
    _write(json.dumps(out) + "\n", args.report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="refdet", description="Exact checks of determinant and Pfaffian identities for reflection sums.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="compare both sides of one identity")
    v.add_argument("identity", choices=IDENTITIES)
    v.add_argument("--family", default="an:2", help="an:N, bn:N, dn:N, file:PATH or random:DxN")
    v.add_argument("--k", type=int, default=2, help="commutator depth (gendet, keven-pf)")
    v.add_argument("--weights", default="symbolic", choices=("symbolic", "unit", "random", "explicit"))
    v.add_argument("--weights-file", help="JSON {\"weights\": {\"w[1,2]\": \"3/4\", ...}}")
    v.add_argument("--bound", type=int, default=9, help="numerator/denominator bound for random weights")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--mode", default="exact", choices=("exact", "float"))
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--triangle-weight", default="alternating", choices=("alternating", "literal"))
    v.add_argument("--timing", action="store_true", help="record elapsed_ms (makes reports run-dependent)")
    v.add_argument("--report")
    v.set_defaults(func=_cmd_verify)

    c = sub.add_parser("calibrate", help="ratio lhs/rhs over a range of ranks")
    c.add_argument("identity", choices=IDENTITIES)
    c.add_argument("--range", required=True, help="e.g. n=1..4 or n=2,4")
    c.add_argument("--family", help="an, bn or dn (default depends on the identity)")
    c.add_argument("--k", type=int, default=2)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--triangle-weight", default="alternating", choices=("alternating", "literal"))
    c.add_argument("--report")
    c.set_defaults(func=_cmd_calibrate)

    e = sub.add_parser("enumerate", help="list combinatorial structures")
    e.add_argument("kind", choices=("doombs", "trees", "3trees", "bbasic"))
    e.add_argument("--vertices", type=int, required=True)
    e.add_argument("--edges", type=int, help="edge count (doombs only; default = vertices)")
    e.add_argument("--count-only", action="store_true")
    e.add_argument("--report")
    e.set_defaults(func=_cmd_enumerate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (ScaleLimitError, FileFormatError, DegenerateRhsError, MixedRadicandError, ValueError, IndexError) as exc:
        print(f"refdet: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
