"""Command-line entry point.

Exit codes: 0 success or true verdict, 1 false verdict, 2 usage or
precondition error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import SpliceCheckError
from .graph import Graph, purely_infinite_report
from .harness import FuzzConfig, fuzz_run
from .ideals import ideal_lattice, prim_space
from .moves import EdgeEnumeration, cuntz_splice, desingularize_truncated, verify_desing_splice_commutes
from .verifier import verify_cuntz_splice_invariance
from .xk import filtered_xk, k_theory

EXIT_OK, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


def _emit(obj):
    print(json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=False))


def _load_order(path) -> dict:
    """Edge enumerations from a JSON file: one object, a list, or a dict keyed by vertex."""
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if isinstance(raw, dict) and "vertex" in raw:
        raw = [raw]
    elif isinstance(raw, dict):
        raw = [dict(e, vertex=e.get("vertex", k)) for k, e in raw.items()]
    enums = [EdgeEnumeration.from_json(e) for e in raw]
    return {e.vertex: e for e in enums}


def cmd_check(args) -> int:
    report = purely_infinite_report(Graph.load(args.graph))
    if args.json:
        _emit(report.to_json())
    elif report.verdict:
        print("PASS: purely infinite")
    else:
        print("FAIL: " + ", ".join(report.failed_criteria()))
        if report.breaking:
            print("  breaking vertices: " + ", ".join(sorted(report.breaking)))
        for t in report.bad_tails:
            print("  tail without cycle: {" + ",".join(sorted(t)) + "}")
    return EXIT_OK if report.verdict else EXIT_FALSE


def cmd_ideals(args) -> int:
    lat = ideal_lattice(Graph.load(args.graph))
    if args.json:
        _emit(lat.to_json())
    else:
        for i, p in enumerate(lat.pairs):
            print(f"{i}: {p.label()}")
        for i, j in lat.hasse_edges():
            print(f"{i} < {j}")
    return EXIT_OK


def cmd_prim(args) -> int:
    X = prim_space(ideal_lattice(Graph.load(args.graph)))
    if args.json:
        _emit(X.to_json())
    else:
        for x in X.points:
            print(f"{x}: H = {{{','.join(sorted(X.h_of[x]))}}}  pair {X.pair_of[x].label()}")
        for x, y in X.comparable_pairs():
            print(f"{x} >= {y}")
    return EXIT_OK


def cmd_k(args) -> int:
    gg = k_theory(Graph.load(args.graph))
    if args.json:
        _emit(gg.to_json(args.verbose))
    else:
        print(str(gg))
        if gg.unfiltered_formula:
            print("note: unfiltered formula (graph has singular vertices)")
    return EXIT_OK


def cmd_xk(args) -> int:
    g = Graph.load(args.graph)
    X = prim_space(ideal_lattice(g))
    mod = filtered_xk(g, X, v_first=args.v_first)
    if args.json:
        _emit(mod.to_json(args.verbose))
    else:
        print(mod.table())
    return EXIT_OK


def cmd_splice(args) -> int:
    res = cuntz_splice(Graph.load(args.graph), args.v)
    _emit(res.to_json() if args.json else res.graph.to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    g = Graph.load(args.graph)
    report = verify_cuntz_splice_invariance(g, args.v, corrupt_psi=args.corrupt_psi)
    if args.json or args.verbose:
        _emit(report.to_json(args.verbose))
    else:
        for s in report.stages:
            print(f"{'ok  ' if s.ok else 'FAIL'} {s.name}")
        print("PASS" if report.verdict else "FAIL: " + ", ".join(report.failed_stages()))
    return EXIT_OK if report.verdict else EXIT_FALSE


def cmd_desing(args) -> int:
    d = desingularize_truncated(Graph.load(args.graph), _load_order(args.order), args.depth)
    _emit(d.to_json() if args.json else d.graph.to_json())
    return EXIT_OK


def cmd_commute(args) -> int:
    report = verify_desing_splice_commutes(
        Graph.load(args.graph), args.v, _load_order(args.order), args.depth
    )
    if args.json or args.verbose:
        _emit(report.to_json(args.verbose))
    else:
        print("PASS" if report.verdict else "FAIL")
        if not report.v_two_return_paths:
            print(f"  {args.v} lacks two return paths after desingularization")
        elif not report.commutes:
            print("  truncated graphs are not isomorphic")
    return EXIT_OK if report.verdict else EXIT_FALSE


def cmd_fuzz(args) -> int:
    cfg = FuzzConfig(args.seed, args.trials, args.max_vertices, args.max_mult)
    summary = fuzz_run(cfg, args.dump_dir, corrupt_psi=args.corrupt_psi)
    if args.json:
        _emit(summary.to_json())
    else:
        print(f"trials {summary.trials}: {summary.passed} passed, {summary.failed} failed, {summary.skipped} skipped")
        for path in sorted(summary.dumped):
            print(f"  dumped {path}")
    return EXIT_OK if summary.failed == 0 else EXIT_FALSE


def cmd_dot(args) -> int:
    g = Graph.load(args.graph)
    if args.what == "graph":
        print(g.to_dot(), end="")
    elif args.what == "lattice":
        print(ideal_lattice(g).to_dot(), end="")
    else:
        print(prim_space(ideal_lattice(g)).to_dot(), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--verbose", action="store_true", help="include matrices in reports")

    p = argparse.ArgumentParser(prog="splicecheck", description=__doc__.splitlines()[0])
    p.add_argument("--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, *, vertex=False, graph=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if graph:
            sp.add_argument("graph", type=Path)
        if vertex:
            sp.add_argument("v")
        sp.set_defaults(fn=fn)
        return sp

    add("check", cmd_check, "pure infiniteness criteria")
    add("ideals", cmd_ideals, "lattice of admissible pairs")
    add("prim", cmd_prim, "primitive ideal space")
    add("k", cmd_k, "K-theory of the graph algebra")
    add("xk", cmd_xk, "filtered K-theory over the primitive ideal space").add_argument(
        "--v-first", default=None, help="enumerate this vertex first in every H_x"
    )
    add("splice", cmd_splice, "Cuntz splice at a vertex", vertex=True)
    sp = add("verify", cmd_verify, "check invariance of the filtered complex under the splice", vertex=True)
    sp.add_argument("--corrupt-psi", action="store_true", help=argparse.SUPPRESS)
    sp = add("desing", cmd_desing, "truncated desingularization")
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--order", type=Path, default=None, help="JSON edge enumerations")
    sp = add("commute", cmd_commute, "desingularization commutes with the splice", vertex=True)
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--order", type=Path, default=None, help="JSON edge enumerations")
    sp = add("fuzz", cmd_fuzz, "randomized invariance run", graph=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--max-vertices", type=int, default=8)
    sp.add_argument("--max-mult", type=int, default=3)
    sp.add_argument("--dump-dir", type=Path, default=None)
    sp.add_argument("--corrupt-psi", action="store_true", help="negative control: flip the sign in psi")
    add("dot", cmd_dot, "Graphviz export").add_argument(
        "--what", choices=("graph", "lattice", "prim"), default="graph"
    )
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except (SpliceCheckError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry():
    sys.exit(main())
