"""Command-line interface: ``hmknf solve|enumerate|verify|graph FILE``.

Exit statuses: 0 model found / candidate accepted / oracles match, 1 no model /
rejected / mismatch, 2 unreadable or malformed input, 3 budget exhausted,
4 size gate exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import ExitStack
from typing import Callable, TextIO

from . import characterize, depgraph, nogoods
from .errors import GateExceeded, ParseError
from .kb import KnowledgeBase, format_atoms, load_kb, parse_atom_list
from .ontology import ClausalOracle
from .solver import MODEL, NO_MODEL, UNKNOWN, SolverOptions, cdnl_solve, enumerate_all

EXIT_OK = 0
EXIT_NO = 1
EXIT_INPUT = 2
EXIT_UNKNOWN = 3
EXIT_GATE = 4


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="knowledge base file")
    common.add_argument("--graph-mode", choices=["exact", "overapprox"], default="overapprox")
    common.add_argument("--max-exact-graph", type=_positive, default=depgraph.EXACT_GRAPH_GATE,
                        metavar="N", help="ontology-atom limit for the exact dependency graph")
    common.add_argument("--max-loops", type=_positive, default=depgraph.LOOP_GATE, metavar="N",
                        help="limit on enumerated loops")
    common.add_argument("--max-direct", type=_positive, default=3, metavar="N",
                        help="vocabulary limit for the direct semantic checker")
    common.add_argument("--conflicts", type=_positive, default=None, metavar="N", help="conflict budget")
    common.add_argument("--time-ms", type=_positive, default=None, metavar="N", help="time budget")
    common.add_argument("--heuristic", choices=["lex", "activity"], default="lex")
    common.add_argument("--restarts", action="store_true", help="enable Luby restarts")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trace", metavar="PATH", default=None,
                        help="write the search trace to PATH ('stderr' or '-' for standard error)")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="hmknf", description="Solver for ground hybrid MKNF knowledge bases.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="find one model")
    sub.add_parser("enumerate", parents=[common], help="list all models")
    v = sub.add_parser("verify", parents=[common], help="check a candidate or cross-check oracles")
    group = v.add_mutually_exclusive_group(required=True)
    group.add_argument("--candidate", metavar="ATOMS", help="comma-separated atoms of a K-interpretation")
    group.add_argument("--all", action="store_true", help="compare all models against an oracle")
    v.add_argument("--oracle", choices=["formulas", "nogoods", "direct"], default="formulas")
    g = sub.add_parser("graph", parents=[common], help="print the dependency graph as DOT")
    g.add_argument("--loops", action="store_true", help="cluster strongly connected components")
    return p


def _options(args, trace: Callable[[str], None] | None) -> SolverOptions:
    return SolverOptions(
        graph_mode=args.graph_mode,
        heuristic=args.heuristic,
        seed=args.seed,
        conflict_budget=args.conflicts,
        time_budget_ms=args.time_ms,
        restarts=args.restarts,
        max_loops=args.max_loops,
        exact_gate=args.max_exact_graph,
        trace=trace,
    )


def _emit_json(out: TextIO, payload: dict) -> None:
    out.write(json.dumps(payload, sort_keys=True) + "\n")


def _atoms(model) -> list[str]:
    return sorted(model)


def cmd_solve(kb: KnowledgeBase, args, out: TextIO, trace) -> int:
    res = cdnl_solve(kb, _options(args, trace))
    if args.json:
        _emit_json(out, {"outcome": res.outcome,
                         "model": None if res.model is None else _atoms(res.model),
                         "stats": res.stats, "detail": res.detail})
    elif res.outcome == MODEL:
        out.write(f"MODEL {format_atoms(res.model)}\n")
    elif res.outcome == NO_MODEL:
        out.write("NO MODEL\n")
    else:
        out.write(f"UNKNOWN {res.detail}\n")
    return {MODEL: EXIT_OK, NO_MODEL: EXIT_NO, UNKNOWN: EXIT_UNKNOWN}[res.outcome]


def cmd_enumerate(kb: KnowledgeBase, args, out: TextIO, trace) -> int:
    res = enumerate_all(kb, _options(args, trace))
    if args.json:
        _emit_json(out, {"outcome": "complete" if res.complete else UNKNOWN,
                         "models": [_atoms(m) for m in res.models],
                         "stats": res.stats, "detail": res.detail})
    else:
        for m in res.models:
            out.write(format_atoms(m) + "\n")
        if not res.complete:
            out.write(f"UNKNOWN {res.detail}\n")
        elif not res.models:
            out.write("NO MODEL\n")
    if not res.complete:
        return EXIT_UNKNOWN
    return EXIT_OK if res.models else EXIT_NO


def _oracle_models(kb: KnowledgeBase, args, oracle) -> set[frozenset[str]]:
    if args.oracle == "formulas":
        return characterize.enumerate_models_formulas(kb, args.graph_mode, oracle=oracle,
                                                      max_loops=args.max_loops)
    if args.oracle == "nogoods":
        return nogoods.enumerate_solutions_full(kb, args.graph_mode, oracle=oracle)
    return characterize.enumerate_models_direct(kb, gate=args.max_direct)


def cmd_verify(kb: KnowledgeBase, args, out: TextIO, trace) -> int:
    oracle = ClausalOracle(kb)
    if args.all:
        res = enumerate_all(kb, _options(args, trace), oracle)
        if not res.complete:
            out.write(f"UNKNOWN {res.detail}\n")
            return EXIT_UNKNOWN
        engine = set(res.models)
        reference = _oracle_models(kb, args, oracle)
        match = engine == reference
        if args.json:
            _emit_json(out, {"verdict": "MATCH" if match else "MISMATCH", "oracle": args.oracle,
                             "engine": sorted(_atoms(m) for m in engine),
                             "reference": sorted(_atoms(m) for m in reference)})
        elif match:
            n = len(engine)
            out.write(f"MATCH ({n} model{'s' if n != 1 else ''})\n")
        else:
            out.write("MISMATCH\n")
            for m in sorted(engine - reference, key=sorted):
                out.write(f"  engine only: {format_atoms(m)}\n")
            for m in sorted(reference - engine, key=sorted):
                out.write(f"  {args.oracle} only: {format_atoms(m)}\n")
        return EXIT_OK if match else EXIT_NO

    candidate = parse_atom_list(args.candidate)
    unknown = candidate - kb.vocab
    if unknown:
        raise ParseError(f"atoms {format_atoms(unknown)} are not in the vocabulary", 1, 1)
    if args.oracle == "direct":
        ok = characterize.mknf_model_check_direct(kb, candidate, gate=args.max_direct)
        violation = None
    else:
        violation = characterize.first_violation(kb, candidate, args.graph_mode, oracle=oracle,
                                                 max_loops=args.max_loops)
        if violation is None and args.oracle == "nogoods":
            full = nogoods.completion_nogoods_full(kb, oracle)
            full += nogoods.loop_nogoods_full(kb, args.graph_mode, oracle=oracle)
            ok = nogoods.is_solution(nogoods.induced_assignment(kb, candidate, oracle), full)
        else:
            ok = violation is None
    if args.json:
        _emit_json(out, {"verdict": "ACCEPT" if ok else "REJECT", "candidate": _atoms(candidate),
                         "violation": None if violation is None else violation.as_dict()})
    elif ok:
        out.write(f"ACCEPT {format_atoms(candidate)}\n")
    else:
        label = violation.label() if violation else args.oracle
        out.write(f"REJECT {label}")
        if violation is not None:
            out.write(f" ({violation.detail})\n  formula: {violation.formula}\n")
        else:
            out.write("\n")
    return EXIT_OK if ok else EXIT_NO


def cmd_graph(kb: KnowledgeBase, args, out: TextIO, trace) -> int:
    out.write(depgraph.to_dot(kb, args.graph_mode, annotate_loops=args.loops,
                              exact_gate=args.max_exact_graph))
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "enumerate": cmd_enumerate, "verify": cmd_verify, "graph": cmd_graph}


def main(argv: list[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    target = args.trace
    if target is None and os.environ.get("HMKNF_TRACE") == "1":
        target = "stderr"
    with ExitStack() as stack:
        trace = None
        if target in ("stderr", "-"):
            trace = lambda line: err.write(line + "\n")  # noqa: E731
        elif target is not None:
            fh = stack.enter_context(open(target, "w", encoding="utf-8"))
            trace = lambda line: fh.write(line + "\n")  # noqa: E731
        try:
            kb = load_kb(args.file)
            return COMMANDS[args.command](kb, args, out, trace)
        except ParseError as e:
            err.write(f"{args.file}:{e}\n")
            return EXIT_INPUT
        except OSError as e:
            err.write(f"error: {e}\n")
            return EXIT_INPUT
        except GateExceeded as e:
            err.write(f"GATE {e.gate}: {e}\n")
            return EXIT_GATE


if __name__ == "__main__":
    sys.exit(main())
