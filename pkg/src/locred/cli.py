"""Command-line entry point."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .backend import SOLVER_ENV
from .core import LocError, trace_clause
from .parser import ParseError
from .pipeline import Options, load, run

EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="locred",
        description="Decide ground satisfiability in local theory extensions by reduction "
                    "to an SMT problem over the base theory.",
        epilog=f"Exit codes: 0 unsat, 1 sat, 2 unknown, 3 usage or parse error. "
               f"The default solver command is read from ${SOLVER_ENV}.",
        add_help=False,
    )
    add = p.add_argument
    add("input", nargs="?", help="problem file")
    add("-help", "--help", "-h", action="store_true", help="show this message")
    add("-version", "--version", action="store_true", help="print the version")
    add("-prClauses", action="store_true", help="print the clauses of every reduction step")
    add("-noProver", action="store_true", help="reduce only, call no solver")
    add("-flatten", action="store_true", help="flatten the extension axioms")
    add("-linearize", action="store_true", help="linearize the extension axioms")
    add("-flattenQuery", action="store_true", help="flatten the query")
    add("-preprocess", action="store_true", help="flatten and linearize")
    add("-arrays", action="store_true", help="array mode: implies -preprocess and -min")
    add("-min", action="store_true", help="instantiate over index terms (minimal locality)")
    add("-noSeparation", action="store_true", help="stop after computing the instances")
    add("-unPseudofy", action="store_true", help="eliminate premises x = t with t ground")
    add("-model", action="store_true", help="print a counter-model when satisfiable")
    add("-dot", action="store_true", help="with -model, also print pointer maps as DOT")
    add("-smt", action="store_true", help="write SMT-LIB output without calling a solver")
    add("-isLocal", type=_bool, metavar="BOOL", default=None,
        help="assert (true) or deny (false) locality instead of checking it")
    add("-real", action="store_true", help="default numeric sort is real")
    add("-verbosity", type=int, choices=(0, 1, 2), default=0)
    add("--solver", metavar="CMD", help="solver command; {file} marks the script path")
    add("--timeout", type=float, default=60.0, metavar="SECONDS")
    add("--no-clausify", action="store_true", help="reject formulas instead of clausifying")
    add("--rename-subformulas", type=_bool, default=True, metavar="BOOL",
        help="structural renaming during clausification (default true)")
    add("--no-timing", action="store_true", help="omit the timing summary")
    return p


def options_from(ns) -> Options:
    return Options(
        pr_clauses=ns.prClauses, no_prover=ns.noProver, flatten=ns.flatten,
        linearize=ns.linearize, flatten_query=ns.flattenQuery, preprocess=ns.preprocess,
        arrays=ns.arrays, min=ns.min, no_separation=ns.noSeparation,
        unpseudofy=ns.unPseudofy, model=ns.model, smt=ns.smt, is_local=ns.isLocal,
        real=ns.real, verbosity=ns.verbosity, solver=ns.solver,
        clausify=not ns.no_clausify, rename=ns.rename_subformulas, dot=ns.dot,
        timeout=ns.timeout,
    ).normalized()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    if ns.help:
        parser.print_help()
        return 0
    if ns.version:
        print(f"locred {__version__}")
        return 0
    if not ns.input:
        parser.print_usage(sys.stderr)
        print("locred: error: no input file", file=sys.stderr)
        return EXIT_USAGE
    opts = options_from(ns)
    path = Path(ns.input)
    err = sys.stderr
    try:
        task = load(path, opts)
    except OSError as e:
        print(f"locred: cannot read {path}: {e.strerror}", file=err)
        return EXIT_USAGE
    except ParseError as e:
        where = f"{e.position.line}:{e.position.column}:" if e.position else ""
        exp = f" (expected {', '.join(sorted(e.expected))})" if e.expected else ""
        print(f"{path}:{where} {e.message}{exp}", file=err)
        return EXIT_USAGE
    except LocError as e:
        print(f"{path}: {e}", file=err)
        return EXIT_USAGE
    try:
        result = run(task, opts, path)
    except LocError as e:
        print(f"locred: {e}", file=err)
        print("unknown")
        return 2

    prep, red = result.prepared, result.reduction
    if opts.verbosity >= 1 or opts.pr_clauses:
        for line in result.log:
            print(line, file=err)
        kinds = ", ".join(prep.report.kinds) or "none"
        print(f"Fragments: {kinds}; local: {'yes' if prep.all_local else 'no'}", file=err)
    if opts.verbosity >= 2 or opts.pr_clauses:
        for line in red.trace:
            print(line, file=err)
        if opts.no_prover:
            for c in red.base_axioms + red.clauses:
                print(trace_clause(c), file=err)
    elif opts.verbosity >= 1:
        for k, v in red.counts.items():
            print(f"{k}: {v}", file=err)
    if result.script_path is not None and (opts.smt or opts.verbosity >= 1):
        print(f"SMT-LIB written to {result.script_path}", file=err)

    v = result.verdict
    print(v.status)
    if v.status == "unknown" and v.reason:
        print(f"reason: {v.reason}", file=err)
    if v.status == "sat" and opts.model and v.model is not None:
        for line in v.model.listing():
            print(line)
        if opts.dot:
            print(v.model.dot(), end="")
    if not ns.no_timing:
        solver = result.solver.seconds if result.solver else 0.0
        print(f"locred spent {result.seconds:.3f}s; the solver needed {solver:.3f}s.", file=err)
    return v.exit_code


if __name__ == "__main__":
    sys.exit(main())
