"""SMT-LIB 2 emission, solver invocation, verdict policy and model
back-translation."""
from __future__ import annotations

import os
import re
import shlex
import shutil
import subprocess
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .core import (
    App, Arith, BOOL, Clause, Const, Eq, INT, Ineq, LocError, Num, Pred, REAL,
    Select, Signature, Sort, SymbolDecl, Var, Write, show_term, term_sort,
)

SOLVER_ENV = "LOCRED_SOLVER"

# names the emitter must not use verbatim
_RESERVED = {
    "abs", "and", "or", "not", "xor", "ite", "distinct", "true", "false", "div", "mod",
    "select", "store", "let", "forall", "exists", "assert", "par", "as", "to_real",
    "to_int", "is_int", "Int", "Real", "Bool", "Array", "exp", "sqrt", "rem", "min", "max",
    "push", "pop", "match", "_", "!",
}
_SIMPLE = re.compile(r"^[A-Za-z][A-Za-z0-9_.]*$")


# ------------------------------------------------------------- verdicts

@dataclass(frozen=True)
class Verdict:
    status: str  # unsat | sat | unknown
    reason: str = ""
    model: Optional["ExtensionModel"] = None

    @property
    def exit_code(self) -> int:
        return {"unsat": 0, "sat": 1}.get(self.status, 2)


def interpret(raw: str, all_local: bool, ground_ok: bool, reason: str = "") -> Verdict:
    if raw == "unsat":
        return Verdict("unsat")
    if raw == "sat":
        if all_local and ground_ok:
            return Verdict("sat")
        why = "locality not established" if not all_local else "reduction left non-ground clauses"
        return Verdict("unknown", why)
    return Verdict("unknown", reason or "solver answered unknown")


# -------------------------------------------------------------- emitting

class _Names:
    def __init__(self):
        self.map: dict = {}
        self.used: set = set()

    def __call__(self, name: str) -> str:
        if name in self.map:
            return self.map[name]
        if name in _RESERVED:
            cand, k = f"{name}_u", 1
            while cand in self.used:
                k += 1
                cand = f"{name}_u{k}"
        elif _SIMPLE.match(name):
            cand = name
        else:
            cand = "|" + name.replace("|", "_") + "|"
        self.used.add(cand)
        self.map[name] = cand
        return cand


@dataclass
class SmtScript:
    text: str
    logic: str
    constants: dict      # user name -> Sort
    smt_names: dict      # user name -> emitted symbol
    warnings: list = field(default_factory=list)


def _num(v, srt: Optional[Sort]) -> str:
    v = Fraction(v)
    real = srt is not None and srt.kind == "real"
    if v.denominator != 1:
        body = f"(/ {abs(v.numerator)}.0 {v.denominator}.0)" if real else \
            f"(/ {abs(v.numerator)} {v.denominator})"
    else:
        body = f"{abs(v.numerator)}.0" if real else str(abs(v.numerator))
    return f"(- {body})" if v < 0 else body


class _Emitter:
    def __init__(self, sig: Signature, sorting, extra_fns: dict):
        self.sig = sig
        self.sorting = sorting
        self.names = _Names()
        self.fns: dict = dict(extra_fns)     # name -> (arg sorts, range)
        self.preds: dict = {}                # name -> arg sorts
        self.sorts: set = set()
        self.nonlinear = False
        self.quantified = False

    def sort_of(self, t, vs: dict) -> Optional[Sort]:
        if isinstance(t, App) and t.fn in self.fns:
            return self.fns[t.fn][1]
        return term_sort(t, self.sig, self.sorting.constants, vs)

    def fn_sig(self, fn: str, n: int):
        if fn in self.fns:
            return self.fns[fn]
        d = self.sig.get(fn)
        if d is not None and d.kind in ("base", "ext"):
            args = tuple(s or self.sig.default_sort for s in d.sorts_of_args())
            res = (args, d.range or self.sig.default_sort)
        else:
            res = self.sorting.functions.get(fn, ((self.sig.default_sort,) * n, self.sig.default_sort))
        self.fns[fn] = res
        return res

    def term(self, t, vs: dict, want: Optional[Sort] = None) -> str:
        if isinstance(t, Var):
            return self.names(t.name)
        if isinstance(t, Const):
            return self.names(t.name)
        if isinstance(t, Num):
            return _num(t.value, want or self.sig.default_sort)
        if isinstance(t, Arith):
            srt = self.sort_of(t, vs) or want or self.sig.default_sort
            if srt not in (INT, REAL):
                srt = self.sig.default_sort
            l = self.term(t.left, vs, srt)
            r = self.term(t.right, vs, srt)
            if t.op == "*" and not (isinstance(t.left, Num) or isinstance(t.right, Num)):
                self.nonlinear = True
            if t.op == "/":
                if not isinstance(t.right, Num):
                    self.nonlinear = True
                return f"({'div' if srt == INT else '/'} {l} {r})"
            return f"({t.op} {l} {r})"
        if isinstance(t, App):
            args, _ = self.fn_sig(t.fn, len(t.args))
            parts = [self.term(a, vs, args[k] if k < len(args) else None)
                     for k, a in enumerate(t.args)]
            name = self.names(t.fn)
            return f"({name} {' '.join(parts)})" if parts else name
        if isinstance(t, (Write, Select)):
            raise LocError(f"array update reached the solver interface: {show_term(t)}")
        raise LocError(f"cannot emit {t!r}")

    def atom(self, a, vs: dict) -> str:
        if isinstance(a, Pred):
            if not a.args:
                self.preds.setdefault(a.name, ())
                return self.names(a.name)
            d = self.sig.get(a.name)
            if d is not None and d.arg_sorts:
                sorts = tuple(d.arg_sorts)
            elif a.name in self.sorting.relations:
                sorts = self.sorting.relations[a.name]
            else:
                sorts = tuple(self.sort_of(x, vs) or self.sig.default_sort for x in a.args)
            self.preds.setdefault(a.name, sorts)
            parts = [self.term(x, vs, sorts[k]) for k, x in enumerate(a.args)]
            return f"({self.names(a.name)} {' '.join(parts)})"
        srt = self.sort_of(a.left, vs) or self.sort_of(a.right, vs) or self.sig.default_sort
        if isinstance(a, Eq):
            l = self.sort_of(a.left, vs)
            r = self.sort_of(a.right, vs)
            if REAL in (l, r) and INT in (l, r):
                srt = REAL
            return f"(= {self.term(a.left, vs, srt)} {self.term(a.right, vs, srt)})"
        if srt == INT and REAL in (self.sort_of(a.right, vs), self.sort_of(a.left, vs)):
            srt = REAL
        return f"({a.op} {self.term(a.left, vs, srt)} {self.term(a.right, vs, srt)})"

    def formula(self, f, vs: dict) -> str:
        from .core import And, AtomF, Exists, Forall, Iff, Implies, Not, Or
        if isinstance(f, AtomF):
            return self.atom(f.atom, vs)
        if isinstance(f, Not):
            return f"(not {self.formula(f.arg, vs)})"
        if isinstance(f, (And, Or)):
            if not f.args:
                return "true" if isinstance(f, And) else "false"
            op = "and" if isinstance(f, And) else "or"
            return f"({op} {' '.join(self.formula(g, vs) for g in f.args)})"
        if isinstance(f, Implies):
            return f"(=> {self.formula(f.left, vs)} {self.formula(f.right, vs)})"
        if isinstance(f, Iff):
            return f"(= {self.formula(f.left, vs)} {self.formula(f.right, vs)})"
        if isinstance(f, (Forall, Exists)):
            raise LocError("quantifier inside a clause guard cannot be emitted")
        raise LocError(f"cannot emit formula {f!r}")

    def clause(self, c: Clause, var_sorts: dict) -> str:
        lits = [f"(not {self.atom(a, var_sorts)})" for a in c.antecedent]
        lits += [self.atom(a, var_sorts) for a in c.consequent]
        if c.guard is not None:
            lits.insert(0, self.formula(c.guard, var_sorts))
        body = "false" if not lits else lits[0] if len(lits) == 1 else f"(or {' '.join(lits)})"
        if not c.vars:
            return body
        self.quantified = True
        binders = " ".join(f"({self.names(v)} {var_sorts.get(v, self.sig.default_sort).smt_name()})"
                           for v in c.vars)
        iv = self.sig.interval
        guards = []
        if iv is not None:
            for v in c.vars:
                if var_sorts.get(v, self.sig.default_sort) == self.sig.default_sort:
                    guards += _interval_bounds(iv, self.names(v), self.sig.default_sort)
        if guards:
            body = f"(=> (and {' '.join(guards)}) {body})" if len(guards) > 1 else \
                f"(=> {guards[0]} {body})"
        return f"(forall ({binders}) {body})"


def _interval_bounds(iv, name: str, srt: Sort) -> list:
    out = []
    if iv.lower is not None:
        out.append(f"({'<' if iv.lower_strict else '<='} {_num(iv.lower, srt)} {name})")
    if iv.upper is not None:
        out.append(f"({'<' if iv.upper_strict else '<='} {name} {_num(iv.upper, srt)})")
    return out


def _choose_logic(em: _Emitter, sorts_used: set) -> str:
    has_int = INT in sorts_used
    has_real = REAL in sorts_used
    uf = bool(em.preds) or any(True for f in em.fns) or any(s.uninterpreted for s in sorts_used)
    if has_int and has_real:
        return "ALL"
    prefix = "" if em.quantified else "QF_"
    if not (has_int or has_real):
        return "UF" if em.quantified else "QF_UF"
    arith = ("N" if em.nonlinear else "L") + ("IA" if has_int else "RA")
    return prefix + ("UF" if uf else "") + arith


def emit_smtlib(clauses, sig: Signature, base_axioms=(), const_sorts: Optional[dict] = None,
                model: bool = True) -> SmtScript:
    """Render level-0 clauses (and possibly quantified base axioms) as an
    SMT-LIB 2 script. Output is deterministic for identical input."""
    from .core import infer_sorts
    clauses = list(clauses)
    base_axioms = list(base_axioms)
    decls = [SymbolDecl(n, "const", 0, 0, None, s) for n, s in sorted((const_sorts or {}).items())
             if sig.get(n) is None]
    sig2 = sig.with_decls(decls) if decls else sig
    sorting = infer_sorts(sig2, base_axioms + clauses)
    em = _Emitter(sig2, sorting, {})
    body = []
    for k, c in enumerate(base_axioms + clauses):
        vs = sorting.clause_vars[k]
        body.append(f"(assert {em.clause(c, vs)})")
    consts = {}
    for c in base_axioms + clauses:
        from .core import clause_constants
        for n in clause_constants(c):
            consts[n] = sorting.of_const(n)
    for n in sorted(consts):
        em.names(n)
    sorts_used = set(consts.values())
    for args, rng in em.fns.values():
        sorts_used |= set(args) | {rng}
    for args in em.preds.values():
        sorts_used |= set(args)
    for k, c in enumerate(base_axioms + clauses):
        sorts_used |= set(sorting.clause_vars[k].values())
    sorts_used.discard(BOOL)
    logic = _choose_logic(em, sorts_used)
    out = ["(set-option :produce-models true)", f"(set-logic {logic})"]
    for s in sorted(x for x in sorts_used if x.uninterpreted):
        out.append(f"(declare-sort {s.smt_name()} 0)")
    for n in sorted(consts):
        out.append(f"(declare-fun {em.names(n)} () {consts[n].smt_name()})")
    for fn in sorted(em.fns):
        args, rng = em.fns[fn]
        out.append(f"(declare-fun {em.names(fn)} ({' '.join(s.smt_name() for s in args)}) {rng.smt_name()})")
    for p in sorted(em.preds):
        out.append(f"(declare-fun {em.names(p)} ({' '.join(s.smt_name() for s in em.preds[p])}) Bool)")
    iv = sig.interval
    if iv is not None:
        for n in sorted(consts):
            if consts[n] == sig.default_sort:
                for b in _interval_bounds(iv, em.names(n), sig.default_sort):
                    out.append(f"(assert {b})")
    out.extend(body)
    out.append("(check-sat)")
    if model:
        out.append("(get-model)")
    out.append("(exit)")
    warnings = ["nonlinear arithmetic in a linear fragment"] if em.nonlinear else []
    return SmtScript("\n".join(out) + "\n", logic, consts, dict(em.names.map), warnings)


# --------------------------------------------------------------- running

@dataclass
class SolverRun:
    status: str           # sat | unsat | unknown
    output: str = ""
    seconds: float = 0.0
    reason: str = ""


_KNOWN = (("z3", ["-smt2"]), ("cvc5", ["--lang", "smt2"]), ("yices-smt2", []))


def solver_command(cmd: Optional[str] = None) -> Optional[list]:
    """argv for the configured solver; `{file}` marks the script path."""
    cmd = cmd or os.environ.get(SOLVER_ENV)
    if cmd:
        return shlex.split(cmd)
    for exe, flags in _KNOWN:
        if shutil.which(exe):
            return [exe, *flags]
    return None


def run_solver(script_path: Path, cmd: Optional[str] = None, timeout: float = 60.0) -> SolverRun:
    argv = solver_command(cmd)
    if not argv:
        return SolverRun("unknown", reason="solver not found")
    if any("{file}" in a for a in argv):
        argv = [a.replace("{file}", str(script_path)) for a in argv]
    else:
        argv = argv + [str(script_path)]
    start = time.perf_counter()
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
    except FileNotFoundError:
        return SolverRun("unknown", reason="solver not found")
    except subprocess.TimeoutExpired:
        return SolverRun("unknown", seconds=timeout, reason="solver timed out")
    secs = time.perf_counter() - start
    for line in proc.stdout.splitlines():
        tok = line.strip()
        if tok in ("sat", "unsat", "unknown"):
            return SolverRun(tok, proc.stdout, secs)
    err = (proc.stderr or proc.stdout).strip().splitlines()
    return SolverRun("unknown", proc.stdout, secs,
                     "solver produced no status" + (f": {err[0]}" if err else ""))


# ---------------------------------------------------------------- models

def read_sexprs(text: str) -> list:
    """Minimal s-expression reader (atoms stay strings)."""
    text = re.sub(r";[^\n]*", "", text)
    tokens = re.findall(r'\|[^|]*\||"[^"]*"|[()]|[^\s()]+', text)
    stack: list = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                continue
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    while len(stack) > 1:
        done = stack.pop()
        stack[-1].append(done)
    return stack[0]


def _atom_value(tok: str):
    if re.fullmatch(r"\d+", tok):
        return Fraction(int(tok))
    if re.fullmatch(r"\d+\.\d*", tok):
        return Fraction(tok)
    if tok == "true":
        return True
    if tok == "false":
        return False
    return tok.strip("|")


def eval_sexpr(e, env: dict, funcs: dict):
    """Evaluate a model value expression. Unknown operators raise KeyError."""
    if isinstance(e, str):
        if e in env:
            return env[e]
        if e in funcs and not funcs[e][0]:
            return eval_sexpr(funcs[e][1], {}, funcs)
        return _atom_value(e)
    head, *args = e
    if head == "let":
        inner = dict(env)
        for name, val in args[0]:
            inner[name] = eval_sexpr(val, env, funcs)
        return eval_sexpr(args[1], inner, funcs)
    if head == "ite":
        c = eval_sexpr(args[0], env, funcs)
        return eval_sexpr(args[1] if c else args[2], env, funcs)
    if head == "as":
        return eval_sexpr(args[0], env, funcs)
    vals = [eval_sexpr(a, env, funcs) for a in args]
    if head == "-":
        return -vals[0] if len(vals) == 1 else vals[0] - sum(vals[1:])
    ops = {
        "+": lambda v: sum(v),
        "*": lambda v: _prod(v),
        "/": lambda v: Fraction(vals[0]) / vals[1],
        "div": lambda v: v[0] // v[1],
        "mod": lambda v: v[0] % v[1],
        "to_real": lambda v: v[0],
        "to_int": lambda v: Fraction(v[0].numerator // v[0].denominator),
        "abs": lambda v: abs(v[0]),
        "=": lambda v: all(x == v[0] for x in v[1:]),
        "distinct": lambda v: len(set(v)) == len(v),
        "<=": lambda v: v[0] <= v[1], "<": lambda v: v[0] < v[1],
        ">=": lambda v: v[0] >= v[1], ">": lambda v: v[0] > v[1],
        "and": lambda v: all(v), "or": lambda v: any(v), "not": lambda v: not v[0],
        "=>": lambda v: (not v[0]) or v[1],
    }
    if head in ops:
        return ops[head](vals)
    if head in funcs:
        params, body = funcs[head]
        return eval_sexpr(body, dict(zip(params, vals)), funcs)
    raise KeyError(head)


def _prod(v):
    out = Fraction(1)
    for x in v:
        out *= x
    return out


def parse_model(text: str) -> dict:
    """define-fun entries as name -> (param names, body s-expression)."""
    funcs = {}

    def walk(items):
        for e in items:
            if isinstance(e, list) and e:
                if e[0] == "define-fun" and len(e) >= 5:
                    name = e[1].strip("|")
                    params = [p[0] for p in e[2] if isinstance(p, list)]
                    funcs[name] = (params, e[4])
                elif e[0] == "model" or isinstance(e[0], list):
                    walk(e[1:] if e[0] == "model" else e)
    walk(read_sexprs(text))
    return funcs


def base_model(text: str, smt_names: dict) -> tuple:
    """Constant values plus the raw function definitions, keyed by user names."""
    funcs = parse_model(text)
    back = {v.strip("|"): k for k, v in smt_names.items()}
    values, defs = {}, {}
    for name, (params, body) in funcs.items():
        user = back.get(name, name)
        defs[user] = (params, body)
        if not params:
            try:
                values[user] = eval_sexpr(body, {}, funcs)
            except (KeyError, TypeError, ZeroDivisionError, IndexError):
                pass
    return values, defs, funcs


class ModelError(LocError):
    pass


@dataclass
class ExtensionModel:
    """Values for constants plus finite tables for extension functions."""
    signature: Signature
    constants: dict
    tables: dict                # fn -> {args tuple: value}
    const_sorts: dict
    relations: dict = field(default_factory=dict)   # rel -> callable or None
    completed: dict = field(default_factory=dict)   # fn -> set of completed arg tuples
    hidden: set = field(default_factory=set)

    # -- evaluation ---------------------------------------------------
    def default_for(self, srt: Optional[Sort]):
        if srt is None or srt.numeric:
            return Fraction(0)
        if srt.kind == "pointer":
            from .preprocess import null_name
            n = null_name(srt)
            if n in self.constants:
                return self.constants[n]
        for name in sorted(self.const_sorts):
            if self.const_sorts[name] == srt and name in self.constants:
                return self.constants[name]
        return f"{srt.smt_name()}!default"

    def eval_term(self, t):
        if isinstance(t, Num):
            return Fraction(t.value)
        if isinstance(t, Const):
            if t.name not in self.constants:
                self.constants[t.name] = self.default_for(self.const_sorts.get(t.name))
            return self.constants[t.name]
        if isinstance(t, Arith):
            l, r = self.eval_term(t.left), self.eval_term(t.right)
            if t.op == "+":
                return l + r
            if t.op == "-":
                return l - r
            if t.op == "*":
                return l * r
            return Fraction(l) / r if r != 0 else Fraction(0)
        if isinstance(t, App):
            args = tuple(self.eval_term(a) for a in t.args)
            table = self.tables.setdefault(t.fn, {})
            if args not in table:
                d = self.signature.get(t.fn)
                table[args] = self.default_for(d.range if d is not None else None)
                self.completed.setdefault(t.fn, set()).add(args)
            return table[args]
        raise ModelError(f"cannot evaluate {show_term(t)}")

    def eval_atom(self, a) -> bool:
        if isinstance(a, Eq):
            return self.eval_term(a.left) == self.eval_term(a.right)
        if isinstance(a, Ineq):
            l, r = self.eval_term(a.left), self.eval_term(a.right)
            return {"<=": l <= r, "<": l < r, ">=": l >= r, ">": l > r}[a.op]
        if isinstance(a, Pred):
            if a.name in ("<=", "<", ">=", ">") and len(a.args) == 2:
                return self.eval_atom(Ineq(a.name, *a.args))
            fn = self.relations.get(a.name)
            if fn is None:
                raise ModelError(f"no interpretation for relation {a.name}")
            return bool(fn(*[self.eval_term(x) for x in a.args]))
        raise ModelError(f"cannot evaluate {a!r}")

    def satisfies(self, c: Clause) -> bool:
        if c.vars or c.guard is not None:
            raise ModelError("only ground unguarded clauses can be checked")
        return any(not self.eval_atom(a) for a in c.antecedent) or \
            any(self.eval_atom(a) for a in c.consequent)

    # -- presentation -------------------------------------------------
    def show_value(self, v) -> str:
        if isinstance(v, Fraction):
            return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        if isinstance(v, bool):
            return "true" if v else "false"
        names = sorted((not n.startswith("null"), n) for n, x in self.constants.items()
                       if x == v and n not in self.hidden)
        return names[0][1] if names else str(v)

    def listing(self) -> list:
        lines = []
        for n in sorted(self.constants):
            if n in self.hidden:
                continue
            shown = self.show_value(self.constants[n])
            if shown != n:
                lines.append(f"{n} = {shown}")
        for fn in sorted(self.tables):
            for args, v in self.tables[fn].items():
                shown = ", ".join(self.show_value(a) for a in args)
                lines.append(f"{fn}({shown}) = {self.show_value(v)}")
        return sorted(lines)

    def dot(self) -> str:
        """Successor maps of pointer-to-pointer functions as a graph."""
        out = ["digraph model {"]
        for fn in sorted(self.tables):
            d = self.signature.get(fn)
            if d is None or d.range is None or d.range.kind != "pointer":
                continue
            for args, v in sorted(self.tables[fn].items(), key=lambda kv: str(kv)):
                if len(args) == 1:
                    out.append(f'  "{self.show_value(args[0])}" -> "{self.show_value(v)}" [label="{fn}"];')
        out.append("}")
        return "\n".join(out) + "\n"


def back_translate(values: dict, funcs: dict, smt_names: dict, dstack: list,
                   sig: Signature, const_sorts: dict) -> ExtensionModel:
    """Turn the base model plus the definition stack into extension tables.

    Levels are processed bottom-up so that arguments mentioning lower
    extension symbols can be evaluated through the tables built so far.
    """
    m = ExtensionModel(sig, dict(values), {}, dict(const_sorts))
    for dmap in sorted(dstack, key=lambda d: d.level):
        for d in dmap.entries:
            m.hidden.add(d.name)
            val = m.eval_term(Const(d.name))
            args = tuple(m.eval_term(a) for a in d.term.args)
            table = m.tables.setdefault(d.term.fn, {})
            if args in table and table[args] != val and args not in m.completed.get(d.term.fn, set()):
                raise ModelError(
                    f"contradictory values for {d.term.fn}{args}: {table[args]} and {val}")
            table[args] = val
            m.completed.get(d.term.fn, set()).discard(args)
    back = {v.strip("|"): k for k, v in smt_names.items()}
    for smt, (params, body) in funcs.items():
        user = back.get(smt, smt)
        if params:
            m.relations[user] = (lambda p, b: (lambda *xs: eval_sexpr(b, dict(zip(p, xs)), funcs)))(params, body)
    return m
