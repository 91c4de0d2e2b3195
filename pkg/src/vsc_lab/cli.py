"""Command-line entry point: ``vsc-lab eval|classify|type|check-derivation|props|demo``."""

from __future__ import annotations

import argparse
import json
import sys

from .classify import classify
from .harness import (
    DEFAULT_BUDGET, DEFAULT_FUEL, DEFAULT_MAX_SIZE, DEFAULT_POOL, EXPERIMENTS, SUITES,
    report_json, run_experiment, run_suite,
)
from .multitypes import (
    DerivationError, check_derivation, deriv_size, derivation_from_json,
    derivation_to_json, is_shrinking, render,
)
from .rewrite import Cycle, Exhausted, Normal, Strategy, evaluate, trace_terms
from .syntax import ParseError, parse, print_term
from .transform import Mode, infer_report


def _path_json(path) -> list[str]:
    return [m.value for m in path]


def cmd_eval(args) -> int:
    t = parse(args.term)
    out = evaluate(t, Strategy(args.strategy), args.fuel)
    steps = out.prefix if isinstance(out, Cycle) else out.trace
    if args.json:
        record = {
            "start": print_term(t),
            "trace": [{"path": _path_json(s.path), "rule": s.rule.value, "term": print_term(s.reduct)} for s in steps],
        }
        if isinstance(out, Normal):
            record["outcome"] = {"kind": "normal", "result": print_term(out.result), "steps": out.length,
                                 "m": out.m_count, "e": out.e_count,
                                 "betav": out.beta_v_count, "betai": out.beta_i_count}
        elif isinstance(out, Cycle):
            record["outcome"] = {"kind": "cycle", "loop_start": out.loop_start}
        else:
            record["outcome"] = {"kind": "exhausted", "steps": len(steps)}
        print(json.dumps(record, indent=2))
        return 0
    if args.trace:
        print(print_term(t))
        for s in steps:
            print(f"  -{s.rule.value}-> {print_term(s.reduct)}")
    if isinstance(out, Normal):
        print(f"normal: {print_term(out.result)} ({out.length} steps)")
    elif isinstance(out, Cycle):
        print(f"cycle: term {len(steps)} repeats term {out.loop_start}")
    else:
        print(f"exhausted after {len(steps)} steps")
    return 0


def cmd_classify(args) -> int:
    t = parse(args.term)
    for cls, verdict in classify(t).items():
        shown = "n/a" if verdict is None else str(verdict).lower()
        print(f"{cls.value}: {shown}")
    return 0


def cmd_type(args) -> int:
    t = parse(args.term)
    res = infer_report(t, Mode(args.mode), args.fuel)
    if res.derivation is None:
        reason = "evaluation cycles" if res.status == "cycle" else "fuel exhausted, typability unknown"
        print(f"no derivation: {reason}")
        return 1
    d = res.derivation
    print(d.conclusion)
    print(f"size {deriv_size(d)}, shrinking {str(is_shrinking(d)).lower()}, "
          f"evaluation length {len(res.outcome.trace)}")
    if args.show:
        print(render(d))
    if args.emit_derivation:
        with open(args.emit_derivation, "w", encoding="utf-8") as fh:
            json.dump(derivation_to_json(d), fh, indent=2)
    return 0


def cmd_check(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        obj = json.load(fh)
    try:
        d = derivation_from_json(obj)
        j = check_derivation(d)
    except (DerivationError, ParseError, ValueError, KeyError) as exc:
        print(f"invalid: {exc}")
        return 1
    print(f"valid: {j}")
    print(f"size {deriv_size(d)}, shrinking {str(is_shrinking(d)).lower()}")
    return 0


def cmd_props(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    pool = tuple(p for p in args.pool.split(",") if p) if args.pool is not None else DEFAULT_POOL
    failed = 0
    for name in names:
        r = run_suite(name, args.max_size, pool, args.fuel, args.budget, with_examples=not args.no_examples)
        failed += r.failed
        if args.json:
            print(report_json(r))
        else:
            status = "ok" if r.ok else "FAILED"
            print(f"{name}: {status} population={r.population} passed={r.passed} "
                  f"failed={r.failed} skipped={r.skipped} ({r.wall_time:.2f}s)")
            if r.counterexample:
                print(f"  counterexample: {r.counterexample['term']}: {r.counterexample['reason']}")
    return 0 if failed == 0 else 1


def cmd_demo(args) -> int:
    names = list(EXPERIMENTS) if args.experiment == "all" else [args.experiment]
    ok = True
    for name in names:
        rep = run_experiment(name)
        ok &= rep.ok
        print(rep.to_json() if args.json else rep.text())
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vsc-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a term under a strategy")
    p.add_argument("term")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="external")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("classify", help="print membership in every term class")
    p.add_argument("term")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("type", help="synthesize a derivation by evaluation and subject expansion")
    p.add_argument("term")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="shrinking")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--emit-derivation", metavar="FILE")
    p.add_argument("--show", action="store_true", help="print the whole derivation tree")
    p.set_defaults(func=cmd_type)

    p = sub.add_parser("check-derivation", help="validate a derivation stored as JSON")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("props", help="run property suites over enumerated terms")
    p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p.add_argument("--max-size", type=int, default=DEFAULT_MAX_SIZE)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--pool", help="comma-separated free variables (default: y)")
    p.add_argument("--no-examples", action="store_true", help="enumerated terms only")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_props)

    p = sub.add_parser("demo", help="replay a canned example trace")
    p.add_argument("experiment", choices=("all",) + tuple(EXPERIMENTS))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
