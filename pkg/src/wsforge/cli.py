"""Command-line front end.

Subcommands: ``dims``, ``basis``, ``eval``, ``reduce`` and ``verify``.
Exit codes: 0 success, 1 usage or input error, 2 resource cap exceeded,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .diagrams import DiagramError, ResourceLimitError, canonicalize, parse_file
from .span_reduce import MAX_ORDER, SpaceSpec, basis, load_basis, normal_form, save_basis

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_FAIL = 0, 1, 2, 3

CHECK_GROUPS = {
    "all": ("triangular", "diagonal", "wheels", "filtration", "convolution", "relations"),
    "triangular": ("triangular",),
    "diagonal": ("diagonal",),
    "wheels": ("wheels",),
    "filtration": ("filtration",),
    "convolution": ("convolution",),
    "relations": ("relations",),
}


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser):
    p.add_argument("--cache-dir", help="directory for cached bases (default: $WSFORGE_CACHE)")
    p.add_argument("--max-order", type=int, default=None, help="resource cap on the order")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized contraction schedules")
    p.add_argument("--threads", type=int, default=1, help="worker count for independent checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wsforge", description="Chord diagram spaces and weight systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("dims", "dimension and basis representatives"), ("basis", "full basis record")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--space", required=True, choices=("A", "Abar", "P", "A_filtered", "P_connected"))
        p.add_argument("--order", type=int, required=True)
        p.add_argument("--legs", type=int, default=None, help="cap on the number of legs")
        p.add_argument("--pivot", choices=("last", "first", "markowitz"), default="last")
        _common(p)

    p = sub.add_parser("eval", help="evaluate a weight system on diagrams from a file")
    p.add_argument("--ws", required=True, choices=("sl2", "conway", "gl11", "sl2-deframed"))
    p.add_argument("--in", dest="infile", required=True, help="diagram file, or - for stdin")
    p.add_argument("--oracle", action="store_true", help="sl2 through full tensor contraction")
    _common(p)

    p = sub.add_parser("reduce", help="normal forms of diagrams in a reduced basis")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--space", choices=("A", "Abar"), default="A")
    _common(p)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--check", choices=tuple(CHECK_GROUPS), default="all")
    p.add_argument("--timings", action="store_true", help="include timings in the JSON report")
    _common(p)
    return parser


def _read(path: str) -> list:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse_file(text)


def _cap(args) -> int:
    return MAX_ORDER if args.max_order is None else args.max_order


def _spec(args) -> SpaceSpec:
    space, legs = args.space, args.legs
    if space == "P" and legs is not None:
        space = "P_filtered"
    try:
        return SpaceSpec(space, args.order, legs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, obj, table_lines):
    if args.format == "json":
        print(json.dumps(obj, indent=1, ensure_ascii=False))
    else:
        for line in table_lines:
            print(line)


def cmd_dims(args) -> int:
    spec = _spec(args)
    cached = None
    if args.cache_dir and args.pivot == "last":
        cached = load_basis(spec, args.cache_dir)
    if cached is not None:
        reps = cached["representatives"]
    else:
        reps = list(basis(spec, pivot=args.pivot, cap=_cap(args)).representatives)
    obj = {"space": spec.space, "order": spec.order, "legs": spec.legs, "dim": len(reps), "representatives": reps}
    _emit(args, obj, [f"dim {len(reps)}"] + [f"  {k}" for k in reps])
    return EXIT_OK


def cmd_basis(args) -> int:
    spec = _spec(args)
    b = basis(spec, pivot=args.pivot, cap=_cap(args))
    if args.cache_dir:
        save_basis(b, args.cache_dir)
    if args.format == "json":
        print(b.to_json())
    else:
        print(f"{spec.space} order {spec.order}: dim {b.dim}, relation rank {b.relation_rank}")
        for i, k in enumerate(b.representatives):
            print(f"  [{i}] {k}")
    return EXIT_OK


def _evaluator(args):
    from . import weight_systems as ws

    if args.ws == "sl2":
        if args.oracle:
            return lambda d: ws.eval_sl2_oracle(d, seed=args.seed)
        return ws.eval_sl2
    if args.oracle:
        raise UsageError("--oracle applies to --ws sl2 only")
    return {"conway": ws.eval_conway, "gl11": ws.eval_gl11, "sl2-deframed": ws.deframed_sl2}[args.ws]


def _json_value(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return v.to_json_dict()


def cmd_eval(args) -> int:
    fn = _evaluator(args)
    rows = []
    for d in _read(args.infile):
        # evaluation builds no basis, so only an explicit cap applies
        if args.max_order is not None and d.order > args.max_order:
            raise ResourceLimitError(f"order {d.order} exceeds cap {args.max_order}")
        rows.append((canonicalize(d).key, fn(d)))
    if args.format == "json":
        out = [{"diagram": k, "ws": args.ws, "value": _json_value(v)} for k, v in rows]
        print(json.dumps(out if len(out) != 1 else out[0], indent=1, ensure_ascii=False))
    else:
        for _, v in rows:
            print(v)
    return EXIT_OK


def cmd_reduce(args) -> int:
    rows = []
    for d in _read(args.infile):
        b = basis(SpaceSpec(args.space, d.order), cap=_cap(args))
        coords = normal_form(d, b)
        rows.append(
            {
                "diagram": canonicalize(d).key,
                "space": args.space,
                "order": d.order,
                "basis": list(b.representatives),
                "coords": [str(c) for c in coords],
            }
        )
    if args.format == "json":
        print(json.dumps(rows, indent=1, ensure_ascii=False))
    else:
        for r in rows:
            terms = [f"{c} * [{i}]" for i, c in enumerate(r["coords"]) if c != "0"]
            print(f"{r['diagram']}\n  = {' + '.join(terms) or '0'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .mm_verify import DEFAULT_MAX_ORDER, run_all

    n = DEFAULT_MAX_ORDER if args.max_order is None else args.max_order
    if n < 0:
        raise UsageError("--max-order must be non-negative")
    if n > MAX_ORDER:
        raise ResourceLimitError(f"max order {n} exceeds cap {MAX_ORDER}")
    report = run_all(n, checks=CHECK_GROUPS[args.check], threads=max(1, args.threads))
    if args.format == "json":
        print(report.to_json(include_timings=args.timings))
    else:
        for c in report.checks:
            print(f"{c.name:<16} {c.status:<5} {len(c.witnesses):>6} verified  {c.seconds:8.2f}s")
            for f in c.failures[:5]:
                print(f"    {json.dumps(f, ensure_ascii=False)}")
        print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {"dims": cmd_dims, "basis": cmd_basis, "eval": cmd_eval, "reduce": cmd_reduce, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.cache_dir:
        os.environ["WSFORGE_CACHE"] = args.cache_dir
    else:
        args.cache_dir = os.environ.get("WSFORGE_CACHE")
    try:
        return COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"wsforge: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, DiagramError, OSError) as exc:
        print(f"wsforge: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
