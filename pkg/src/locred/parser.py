"""Reader and printer for the .loc problem format."""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional

from .core import (
    ARITH_ALIASES, ARITH_OPS, BOOL, INT, REAL, REL_OPS, SCALAR, And, App, Arith,
    AtomF, Clause, Const, Eq, Exists, Forall, Formula, Iff, Implies, Ineq,
    IntervalConstraint, LocError, Not, Num, Or, Pred, Select, Signature, Sort,
    SymbolDecl, Task, Var, Write, atom_terms, clause_level, formula_atoms,
    infer_sorts, show_formula, subterms, free, pointer,
)


@dataclass(frozen=True)
class SourcePosition:
    line: int
    column: int

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}"


class ParseError(LocError):
    def __init__(self, message: str, position: Optional[SourcePosition] = None, expected=()):
        self.message = message
        self.position = position
        self.expected = frozenset(expected)
        where = f" at {position}" if position else ""
        exp = f" (expected {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message}{where}{exp}")


SECTIONS = ("Base_functions", "Extension_functions", "Relations", "Constants",
            "Interval", "Stable", "Base", "Clauses", "Formulas", "Ground_Formulas", "Query")

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>(?m:^[ \t]*--(?!>)[^\n]*))
  | (?P<op><-->|-->|:=|<=|>=|[-+*/<>=(){}\[\],;.\#])
  | (?P<num>_\d+|\d+)
  | (?P<id>[A-Za-z][A-Za-z0-9_]*'?)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # op | num | id | eof
    text: str
    pos: SourcePosition


def tokenize(text: str) -> list:
    toks = []
    i, line, line_start = 0, 1, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}",
                             SourcePosition(line, i - line_start + 1))
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            toks.append(Token(kind, m.group(), SourcePosition(line, i - line_start + 1)))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = i + chunk.rindex("\n") + 1
        i = m.end()
    toks.append(Token("eof", "", SourcePosition(line, i - line_start + 1)))
    return toks


class _Parser:
    def __init__(self, text: str, arith: bool, default_sort: Sort):
        self.toks = tokenize(text)
        self.i = 0
        self.arith = arith
        self.default_sort = default_sort
        self.relations: dict = {}
        self.decls: list = []
        self.seen: set = set()

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "id") and self.tok.text == text

    def fail(self, msg: str, expected=()):
        raise ParseError(msg, self.tok.pos, expected)

    def eat(self, text: str) -> Token:
        if not self.at(text):
            got = self.tok.text or "end of input"
            self.fail(f"unexpected {got!r}", [text])
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self) -> str:
        if self.tok.kind != "id":
            self.fail(f"unexpected {self.tok.text or 'end of input'!r}", ["identifier"])
        t = self.tok.text
        self.i += 1
        return t

    def integer(self) -> int:
        if self.tok.kind != "num":
            self.fail(f"unexpected {self.tok.text or 'end of input'!r}", ["integer"])
        t = self.tok.text
        self.i += 1
        return int(t.lstrip("_"))

    def at_section(self) -> bool:
        return (self.tok.kind == "id" and self.tok.text in SECTIONS
                and self.peek().text == ":=")

    # top level
    def task(self, strict: bool) -> Task:
        base, clauses, formulas, ground, query = [], [], [], [], []
        interval, stable = None, ()
        while self.tok.kind != "eof":
            if not self.at_section():
                self.fail(f"unexpected {self.tok.text!r}", SECTIONS)
            name = self.ident()
            self.eat(":=")
            if name in self.seen:
                raise ParseError(f"duplicate section {name}", self.toks[self.i - 2].pos)
            self.seen.add(name)
            if name == "Base_functions":
                self.symbol_list("base")
            elif name == "Extension_functions":
                self.symbol_list("ext")
            elif name == "Relations":
                self.symbol_list("rel")
            elif name == "Constants":
                self.constant_list()
            elif name == "Interval":
                interval = self.interval()
            elif name == "Stable":
                stable = self.stable()
            elif name == "Base":
                base = self.clause_list(quantified=True)
            elif name == "Clauses":
                clauses = self.clause_list(quantified=True)
            elif name == "Query":
                query = self.clause_list(quantified=False)
            else:
                target = formulas if name == "Formulas" else ground
                target.extend(self.formula_list())
        sig = Signature(tuple(self.decls), self.default_sort, interval, stable)
        task = Task(
            sig,
            tuple(replace(c, level=clause_level(c, sig)) for c in base),
            tuple(replace(c, level=clause_level(c, sig)) for c in clauses),
            tuple(formulas), tuple(ground),
            tuple(replace(c, level=clause_level(c, sig)) for c in query),
        )
        if strict:
            check_task(task)
        return task

    # declarations
    def declare(self, d: SymbolDecl, pos: SourcePosition):
        if any(x.name == d.name for x in self.decls):
            raise ParseError(f"duplicate declaration of {d.name}", pos)
        self.decls.append(d)
        if d.kind == "rel":
            self.relations[d.name] = d.arity

    def symbol_name(self) -> str:
        if self.tok.kind == "op" and self.tok.text in ARITH_OPS + REL_OPS + ("=",):
            t = self.tok.text
            self.i += 1
            return t
        return self.ident()

    def sort(self) -> Sort:
        name = self.ident()
        if name in ("int", "integer"):
            return INT
        if name == "real":
            return REAL
        if name == "bool":
            return BOOL
        if name == "scalar":
            return SCALAR
        if name in ("pointer", "free"):
            k = 1
            if self.accept("#"):
                k = self.integer()
            return pointer(k) if name == "pointer" else free(k)
        raise ParseError(f"unknown sort {name}", self.toks[self.i - 1].pos,
                         ["int", "real", "bool", "pointer", "scalar", "free"])

    def symbol_list(self, kind: str):
        self.eat("{")
        while not self.at("}"):
            pos = self.tok.pos
            self.eat("(")
            name = self.symbol_name()
            self.eat(",")
            arity = self.integer()
            level = 1 if kind == "ext" else 0
            dom = rng = self.default_sort
            if self.accept(","):
                if self.tok.kind == "num":
                    level = self.integer()
                    if self.accept(","):
                        dom = rng = self.sort()
                        if self.accept(","):
                            rng = self.sort()
                else:
                    # (f, arity, range)
                    rng = self.sort()
            self.eat(")")
            if kind != "ext":
                level = 0
            if kind == "rel":
                dom, rng = None, BOOL
            self.declare(SymbolDecl(name, kind, arity, level, dom, rng), pos)
            # a missing comma between declarations is tolerated
            if not self.accept(","):
                if not self.at("(") and not self.at("}"):
                    self.fail(f"unexpected {self.tok.text!r}", [",", "}"])
        self.eat("}")

    def constant_list(self):
        self.eat("{")
        while not self.at("}"):
            pos = self.tok.pos
            self.eat("(")
            name = self.ident()
            self.eat(",")
            s = self.sort()
            self.eat(")")
            self.declare(SymbolDecl(name, "const", 0, 0, None, s), pos)
            if not self.accept(","):
                if not self.at("(") and not self.at("}"):
                    self.fail(f"unexpected {self.tok.text!r}", [",", "}"])
        self.eat("}")

    def interval(self) -> IntervalConstraint:
        lo = hi = None
        lo_s = hi_s = False
        if self.tok.kind == "num":
            lo = self.integer()
            lo_s = self.eat_cmp()
            var = self.ident()
            if self.at("<") or self.at("<="):
                hi_s = self.eat_cmp()
                hi = self.integer()
        else:
            var = self.ident()
            hi_s = self.eat_cmp()
            hi = self.integer()
        self.accept(";")
        return IntervalConstraint(var, lo, lo_s, hi, hi_s)

    def eat_cmp(self) -> bool:
        if self.accept("<"):
            return True
        self.eat("<=")
        return False

    def stable(self) -> tuple:
        out = [self.integer()]
        while self.accept(","):
            out.append(self.integer())
        self.accept(";")
        return tuple(out)

    # clauses
    def clause_list(self, quantified: bool) -> list:
        out = []
        while self.tok.kind != "eof" and not self.at_section():
            out.append(self.clause(quantified))
            if not self.accept(";"):
                if self.tok.kind != "eof" and not self.at_section():
                    self.fail(f"unexpected {self.tok.text!r}", [";"])
        return out

    def clause(self, quantified: bool) -> Clause:
        vars_: tuple = ()
        if quantified and self.at("(") and self.peek().text == "FORALL":
            self.eat("(")
            self.eat("FORALL")
            vars_ = self.var_list()
            self.eat(")")
            self.eat(".")
        bound = set(vars_)
        guard = None
        if self.at("{"):
            self.eat("{")
            phi = self.formula(bound)
            self.eat("}")
            if self.accept("-->"):
                guard = Not(phi)
            else:
                self.eat("OR")
                guard = phi
        ant, con = self.matrix(bound)
        return Clause(vars_, ant, con, guard)

    def var_list(self) -> tuple:
        vs = [self.ident()]
        while self.accept(","):
            vs.append(self.ident())
        return tuple(vs)

    def matrix(self, bound: set):
        if self.at("OR") and self.peek().text == "(":
            self.eat("OR")
            self.eat("(")
            ant, con = [], []
            while True:
                neg, a = self.literal(bound)
                (ant if neg else con).append(a)
                if not self.accept(","):
                    break
            self.eat(")")
            return tuple(ant), tuple(con)
        if self.at("NOT") and self.peek().text == "(":
            save = self.i
            self.eat("NOT")
            self.eat("(")
            a = self.atom(bound)
            self.eat(")")
            if not self.at("-->") and not self.at(","):
                return (a,), ()
            self.i = save
        ant = []
        if not self.at("-->"):
            ant.append(self.atom(bound))
            while self.accept(","):
                ant.append(self.atom(bound))
            if not self.at("-->"):
                # a bare atom list is read as a disjunction
                return (), tuple(ant)
        self.eat("-->")
        con = []
        if not (self.at(";") or self.tok.kind == "eof" or self.at_section()):
            con.append(self.atom(bound))
            while self.accept(","):
                con.append(self.atom(bound))
        return tuple(ant), tuple(con)

    def literal(self, bound: set):
        if self.at("NOT") and self.peek().text == "(":
            self.eat("NOT")
            self.eat("(")
            a = self.atom(bound)
            self.eat(")")
            return True, a
        return False, self.atom(bound)

    # atoms and terms
    def atom(self, bound: set):
        if self.tok.kind == "id" and self.peek().text == "[":
            name = self.ident()
            self.eat("[")
            args = [self.term(bound)]
            while self.accept(","):
                args.append(self.term(bound))
            self.eat("]")
            return Pred(name, tuple(args))
        left = self.term(bound)
        if self.accept("="):
            return Eq(left, self.term(bound))
        for op in REL_OPS:
            if self.accept(op):
                return Ineq(op, left, self.term(bound))
        self.fail(f"unexpected {self.tok.text or 'end of input'!r}", ["=", *REL_OPS])

    def term(self, bound: set):
        left = self.product(bound)
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            left = Arith(op, left, self.product(bound))
        return left

    def product(self, bound: set):
        left = self.primary(bound)
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.tok.text
            self.i += 1
            left = Arith(op, left, self.primary(bound))
        return left

    def primary(self, bound: set):
        t = self.tok
        if t.kind == "num":
            if not t.text.startswith("_") and not self.arith:
                self.fail(f"bare number {t.text} (write _{t.text})", ["_" + t.text])
            self.i += 1
            return Num(int(t.text.lstrip("_")))
        if self.accept("("):
            inner = self.term(bound)
            self.eat(")")
            return inner
        if t.kind == "op" and t.text in ARITH_OPS and self.peek().text == "(":
            # prefix arithmetic: +(a, b)
            self.i += 1
            self.eat("(")
            a = self.term(bound)
            self.eat(",")
            b = self.term(bound)
            self.eat(")")
            return Arith(t.text, a, b)
        name = self.ident()
        if name in ("write", "update") and self.at("("):
            return self.write_term(bound)
        if not self.at("("):
            return Var(name) if name in bound else Const(name)
        self.eat("(")
        args = [self.term(bound)]
        while self.accept(","):
            args.append(self.term(bound))
        self.eat(")")
        if name in ARITH_ALIASES and len(args) == 2:
            return Arith(ARITH_ALIASES[name], args[0], args[1])
        return App(name, tuple(args))

    def write_term(self, bound: set):
        self.eat("(")
        if self.at("write") or self.at("update"):
            self.ident()
            arr = self.write_term_inner(bound)
        else:
            arr = self.ident()
        self.eat(",")
        idx = self.term(bound)
        self.eat(",")
        val = self.term(bound)
        self.eat(")")
        w = Write(arr, idx, val)
        if self.accept("("):
            j = self.term(bound)
            self.eat(")")
            return Select(w, j)
        return w

    def write_term_inner(self, bound: set) -> Write:
        t = self.write_term(bound)
        if not isinstance(t, Write):
            self.fail("array update expected", ["write"])
        return t

    # formulas
    def formula_list(self) -> list:
        out = []
        while self.tok.kind != "eof" and not self.at_section():
            out.append(self.formula(set()))
            if not self.accept(";"):
                if self.tok.kind != "eof" and not self.at_section():
                    self.fail(f"unexpected {self.tok.text!r}", [";"])
        return out

    def formula(self, bound: set) -> Formula:
        t = self.tok
        if t.kind == "id" and t.text in ("AND", "OR", "NOT") and self.peek().text == "(":
            self.i += 2
            args = [self.formula(bound)]
            while self.accept(","):
                args.append(self.formula(bound))
            self.eat(")")
            if t.text == "NOT":
                if len(args) != 1:
                    raise ParseError("NOT takes one argument", t.pos)
                return Not(args[0])
            return And(tuple(args)) if t.text == "AND" else Or(tuple(args))
        if self.at("(") and self.peek().text in ("FORALL", "EXISTS"):
            self.eat("(")
            q = self.ident()
            vs = self.var_list()
            self.eat(")")
            self.eat(".")
            body = self.formula(bound | set(vs))
            return Forall(vs, body) if q == "FORALL" else Exists(vs, body)
        if self.at("("):
            save = self.i
            try:
                self.eat("(")
                left = self.formula(bound)
                if self.accept("-->"):
                    right = self.formula(bound)
                    self.eat(")")
                    return Implies(left, right)
                if self.accept("<-->"):
                    right = self.formula(bound)
                    self.eat(")")
                    return Iff(left, right)
                self.eat(")")
                return left
            except ParseError:
                self.i = save
        return AtomF(self.atom(bound))


def parse_task(text: str, strict: bool = True, arith: bool = True, default_sort: Sort = INT) -> Task:
    """Parse a .loc problem.

    With strict=True the result is also checked for arity mismatches and
    sort conflicts.
    """
    return _Parser(text, arith, default_sort).task(strict)


def parse_formula(text: str, bound=()) -> Formula:
    p = _Parser(text, True, INT)
    f = p.formula(set(bound))
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r}", ["end of input"])
    return f


def parse_clause(text: str) -> Clause:
    p = _Parser(text, True, INT)
    c = p.clause(True)
    p.accept(";")
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r}", ["end of input"])
    return c


def check_task(task: Task) -> None:
    sig = task.signature
    formulas = task.formulas + task.ground_formulas

    def check_term(t):
        for s in subterms(t):
            if isinstance(s, App):
                d = sig.get(s.fn)
                if d is not None and d.kind in ("base", "ext") and d.arity != len(s.args):
                    raise ParseError(f"arity mismatch: {s.fn} declared with {d.arity} "
                                     f"argument(s), used with {len(s.args)}")

    for c in task.all_clauses():
        for t in c.all_terms():
            check_term(t)
        for a in c.atoms():
            if isinstance(a, Pred):
                d = sig.get(a.name)
                if d is not None and d.arity != len(a.args):
                    raise ParseError(f"arity mismatch: {a.name} declared with {d.arity} "
                                     f"argument(s), used with {len(a.args)}")
    for f in formulas:
        for a in formula_atoms(f):
            for t in atom_terms(a):
                check_term(t)
    infer_sorts(sig, task.all_clauses(), formulas)


# ---------------------------------------------------------------- printer

def _show_decl(d: SymbolDecl, default: Sort) -> str:
    if d.kind == "const":
        return f"({d.name}, {d.range.show()})"
    if d.kind == "rel":
        return f"({d.name}, {d.arity})"
    if d.kind == "base" and d.domain == d.range == default:
        return f"({d.name}, {d.arity})"
    if d.domain == d.range:
        return f"({d.name}, {d.arity}, {d.level}, {d.domain.show()})"
    return f"({d.name}, {d.arity}, {d.level}, {d.domain.show()}, {d.range.show()})"


def print_task(task: Task) -> str:
    """Render a task in .loc syntax; parse_task(print_task(t)) == t."""
    sig = task.signature
    out = []
    groups = (("Base_functions", "base"), ("Extension_functions", "ext"),
              ("Relations", "rel"), ("Constants", "const"))
    for title, kind in groups:
        ds = [d for d in sig.decls if d.kind == kind]
        if ds or kind != "const":
            out.append(f"{title} := {{{', '.join(_show_decl(d, sig.default_sort) for d in ds)}}}")
    if sig.interval is not None:
        out.append(f"Interval := {sig.interval.show()};")
    if sig.stable:
        out.append(f"Stable := {', '.join(map(str, sig.stable))};")

    def block(title, items):
        if not items:
            return
        out.append(f"{title} :=")
        out.extend(f"    {x};" for x in items)

    block("Base", [str(c) for c in task.base_axioms])
    block("Clauses", [str(c) for c in task.clauses])
    block("Formulas", [show_formula(f) for f in task.formulas])
    block("Ground_Formulas", [show_formula(f) for f in task.ground_formulas])
    out.append("Query :=")
    out.extend(f"    {c.matrix_str()};" for c in task.query)
    return "\n".join(out) + "\n"
