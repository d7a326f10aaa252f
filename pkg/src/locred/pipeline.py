"""End-to-end driver: parse, clausify, preprocess, classify, reduce, solve."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import backend
from .clausify import clausify
from .core import (
    INT, REAL, NameSupply, Signature, Task, UnsupportedInput, trace_clause, with_level,
)
from .fragments import FragmentReport, classify
from .parser import parse_task
from .preprocess import (
    add_nullable_premises, eliminate_writes, flatten, flatten_query, linearize,
    split_disequalities, unpseudofy,
)
from .reduce import Reduction, reduce_chain


@dataclass
class Options:
    pr_clauses: bool = False
    no_prover: bool = False
    flatten: bool = False
    linearize: bool = False
    flatten_query: bool = False
    preprocess: bool = False
    arrays: bool = False
    min: bool = False
    no_separation: bool = False
    unpseudofy: bool = False
    model: bool = False
    smt: bool = False
    is_local: Optional[bool] = None
    real: bool = False
    verbosity: int = 0
    solver: Optional[str] = None
    clausify: bool = True
    rename: bool = True
    dot: bool = False
    timeout: float = 60.0

    def normalized(self) -> "Options":
        if self.arrays:
            self.preprocess = True
            self.min = True
        return self


@dataclass
class Prepared:
    task: Task
    signature: Signature
    ext_axioms: list
    base_axioms: list
    query: list
    array_mode: bool
    pointer_mode: bool
    report: FragmentReport
    all_local: bool
    supply: NameSupply
    log: list = field(default_factory=list)


@dataclass
class Result:
    verdict: backend.Verdict
    prepared: Optional[Prepared] = None
    reduction: Optional[Reduction] = None
    script: Optional[backend.SmtScript] = None
    script_path: Optional[Path] = None
    solver: Optional[backend.SolverRun] = None
    seconds: float = 0.0
    log: list = field(default_factory=list)

    @property
    def total_clauses(self) -> Optional[int]:
        return self.reduction.total if self.reduction else None


def _route(clauses, sig: Signature, ext: list, base: list, query: list) -> None:
    for c in clauses:
        c = with_level(c, sig)
        if c.level > 0 and not c.is_ground:
            ext.append(c)
        elif c.is_ground:
            query.append(c)
        else:
            base.append(c)


def prepare(task: Task, opts: Options) -> Prepared:
    opts.normalized()
    sig = task.signature
    supply = NameSupply(task.used_names() | {"null"})
    log: list = []
    ext, base, query = [], [], []
    _route(task.base_axioms, sig, base, base, base)
    _route(task.clauses, sig, ext, base, query)
    for c in task.query:
        query.append(with_level(c, sig))
    formulas = list(task.formulas) + list(task.ground_formulas)
    if formulas:
        if not opts.clausify:
            raise UnsupportedInput("formulas need clausification, which was switched off")
        res = clausify(formulas, sig, supply, opts.rename)
        log.extend(res.log)
        _route(res.clauses, sig, ext, base, query)

    array_mode = opts.arrays or task.uses_writes()
    if array_mode:
        # array updates make the array mode implicit, with all it implies
        opts.arrays = True
        opts.normalized()
    pointer_mode = task.uses_pointers()
    if task.uses_writes():
        we = eliminate_writes(ext, query, sig, supply)
        sig = sig.with_decls(we.decls)
        ext = we.clauses + [with_level(c, sig) for c in we.axioms]
        query = [with_level(c, sig) for c in we.query + we.ground_axioms]
        log.extend(f"Write elimination: {trace_clause(c)}" for c in we.axioms + we.ground_axioms)
    if array_mode:
        ext = split_disequalities(ext, sig)
    if pointer_mode:
        ext = add_nullable_premises(ext, sig)
    if opts.unpseudofy or sig.max_level() > 1:
        ext = unpseudofy(ext)

    report = classify(ext, sig, arrays=array_mode, pointers=pointer_mode)
    log.extend(report.log)
    if opts.is_local is not None:
        all_local = opts.is_local
    else:
        all_local = not ext or report.all_local

    if opts.preprocess or opts.flatten:
        ext = flatten(ext, sig)
    if opts.preprocess or opts.linearize:
        ext = linearize(ext, sig)
    if opts.flatten_query:
        query = flatten_query(query, sig, supply)
    ext = [with_level(c, sig) for c in ext]
    query = [with_level(c, sig) for c in query]
    return Prepared(task, sig, ext, base, query, array_mode, pointer_mode, report,
                    all_local, supply, log)


def _const_sorts(red: Reduction, sig: Signature) -> dict:
    """Sorts for constants introduced by purification, from their heads."""
    out = {}
    for dmap in red.dstack:
        for d in dmap.entries:
            decl = sig.get(d.term.fn)
            out[d.name] = decl.range if decl is not None and decl.range else sig.default_sort
    return out


def run(task: Task, opts: Options, input_path: Optional[Path] = None) -> Result:
    start = time.perf_counter()
    prep = prepare(task, opts)
    log = list(prep.log)
    red = reduce_chain(prep.ext_axioms, prep.query, prep.base_axioms, prep.signature,
                       prep.supply, array_mode=opts.min or prep.array_mode,
                       no_separation=opts.no_separation, rename=opts.rename,
                       preprocess=True)
    result = Result(backend.Verdict("unknown", "no solver call"), prep, red, log=log)
    if red.aborted:
        result.verdict = backend.Verdict("unknown", red.aborted)
        result.seconds = time.perf_counter() - start
        return result
    if opts.no_prover:
        result.seconds = time.perf_counter() - start
        return result
    const_sorts = _const_sorts(red, prep.signature)
    script = backend.emit_smtlib(red.clauses, prep.signature, red.base_axioms, const_sorts)
    result.script = script
    if input_path is not None:
        path = input_path.with_suffix(".smt2")
        path.write_text(script.text, encoding="utf-8", newline="\n")
        result.script_path = path
    if opts.smt:
        result.verdict = backend.Verdict("unknown", "SMT-LIB written, solver not called")
        result.seconds = time.perf_counter() - start
        return result
    if result.script_path is None:
        import tempfile
        tmp = tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False, encoding="utf-8")
        tmp.write(script.text)
        tmp.close()
        run_path = Path(tmp.name)
    else:
        run_path = result.script_path
    try:
        solved = backend.run_solver(run_path, opts.solver, opts.timeout)
    finally:
        if result.script_path is None:
            run_path.unlink(missing_ok=True)
    result.solver = solved
    verdict = backend.interpret(solved.status, prep.all_local, red.ground_ok, solved.reason)
    if verdict.status == "sat":
        values, defs, funcs = backend.base_model(solved.output, script.smt_names)
        sorts = dict(script.constants)
        sorts.update(const_sorts)
        model = backend.back_translate(values, funcs, script.smt_names, red.dstack,
                                       prep.signature, sorts)
        model.hidden |= {n for n in model.constants
                         if n.startswith(("ren_", "qc_")) or n not in sorts}
        verdict = backend.Verdict("sat", model=model)
    result.verdict = verdict
    result.seconds = time.perf_counter() - start
    return result


def load(path: Path, opts: Options) -> Task:
    text = Path(path).read_text(encoding="utf-8")
    return parse_task(text, strict=True, arith=True, default_sort=REAL if opts.real else INT)
