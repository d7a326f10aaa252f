"""Terms, atoms, clauses, formulas and signatures shared by every pass.

All data objects are immutable; passes build new objects rather than
editing old ones.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Iterable, Iterator, Optional, Union


class LocError(Exception):
    """Base class for every error raised by this package."""


class SortError(LocError):
    pass


class UnsupportedInput(LocError):
    pass


# ---------------------------------------------------------------- sorts

@dataclass(frozen=True, order=True)
class Sort:
    kind: str  # int | real | bool | scalar | pointer | free
    index: int = 1

    @property
    def numeric(self) -> bool:
        return self.kind in ("int", "real")

    @property
    def uninterpreted(self) -> bool:
        return self.kind in ("scalar", "pointer", "free")

    def show(self) -> str:
        if self.kind in ("pointer", "free") and self.index != 1:
            return f"{self.kind}#{self.index}"
        return self.kind

    def smt_name(self) -> str:
        if self.kind == "int":
            return "Int"
        if self.kind == "real":
            return "Real"
        if self.kind == "bool":
            return "Bool"
        base = self.kind.capitalize()
        return base if self.index == 1 else f"{base}{self.index}"

    def __str__(self) -> str:
        return self.show()


INT = Sort("int")
REAL = Sort("real")
BOOL = Sort("bool")
SCALAR = Sort("scalar")


def pointer(k: int = 1) -> Sort:
    return Sort("pointer", k)


def free(k: int = 1) -> Sort:
    return Sort("free", k)


# ---------------------------------------------------------------- terms

ARITH_OPS = ("+", "-", "*", "/")
REL_OPS = ("<=", "<", ">=", ">")
# spelled-out aliases accepted for the arithmetic operators
ARITH_ALIASES = {"plus": "+", "minus": "-", "times": "*"}


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Num(Term):
    value: int

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True)
class App(Term):
    fn: str
    args: tuple

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True)
class Arith(Term):
    op: str
    left: Term
    right: Term

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True)
class Write(Term):
    """write(array, index, value); `array` is a function name or a Write."""
    array: Union[str, "Write"]
    index: Term
    value: Term

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True)
class Select(Term):
    """Reading an updated array: write(a, i, x)(j)."""
    array: Write
    index: Term

    def __str__(self) -> str:
        return show_term(self)


def show_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Num):
        return f"_{t.value}" if t.value >= 0 else f"(_0 - _{-t.value})"
    if isinstance(t, App):
        return f"{t.fn}({', '.join(show_term(a) for a in t.args)})"
    if isinstance(t, Arith):
        return f"{_arith_operand(t.left)} {t.op} {_arith_operand(t.right)}"
    if isinstance(t, Write):
        arr = t.array if isinstance(t.array, str) else show_term(t.array)
        return f"write({arr}, {show_term(t.index)}, {show_term(t.value)})"
    if isinstance(t, Select):
        return f"{show_term(t.array)}({show_term(t.index)})"
    raise TypeError(f"not a term: {t!r}")


def _arith_operand(t: Term) -> str:
    s = show_term(t)
    return f"({s})" if isinstance(t, Arith) else s


def term_children(t: Term) -> tuple:
    if isinstance(t, App):
        return t.args
    if isinstance(t, Arith):
        return (t.left, t.right)
    if isinstance(t, Write):
        kids = (t.index, t.value)
        return kids if isinstance(t.array, str) else (t.array,) + kids
    if isinstance(t, Select):
        return (t.array, t.index)
    return ()


def subterms(t: Term) -> Iterator[Term]:
    """Post-order traversal: children before parents."""
    for c in term_children(t):
        yield from subterms(c)
    yield t


def term_vars(t: Term) -> set:
    return {s.name for s in subterms(t) if isinstance(s, Var)}


def is_ground_term(t: Term) -> bool:
    return not any(isinstance(s, Var) for s in subterms(t))


def term_size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def term_key(t: Term) -> tuple:
    """Deterministic order on terms: smaller first, then by printed form."""
    return (term_size(t), show_term(t))


def map_term(t: Term, f: Callable[[Term], Optional[Term]]) -> Term:
    """Bottom-up rewrite; `f` may return None to keep the rebuilt node."""
    if isinstance(t, App):
        t = App(t.fn, tuple(map_term(a, f) for a in t.args))
    elif isinstance(t, Arith):
        t = Arith(t.op, map_term(t.left, f), map_term(t.right, f))
    elif isinstance(t, Write):
        arr = t.array if isinstance(t.array, str) else map_term(t.array, f)
        t = Write(arr, map_term(t.index, f), map_term(t.value, f))
    elif isinstance(t, Select):
        t = Select(map_term(t.array, f), map_term(t.index, f))
    r = f(t)
    return t if r is None else r


def subst_term(t: Term, sigma: dict) -> Term:
    if not sigma:
        return t
    return map_term(t, lambda s: sigma.get(s.name) if isinstance(s, Var) else None)


def rename_symbols(t: Term, names: dict) -> Term:
    """Replace constants and function heads according to `names`."""
    def f(s):
        if isinstance(s, Const) and s.name in names:
            return Const(names[s.name])
        if isinstance(s, App) and s.fn in names:
            return App(names[s.fn], s.args)
        return None
    return map_term(t, f)


def _offset_form(t: Term):
    """Split t into (core, k) with t == core + k; core None means t == k."""
    if isinstance(t, Num):
        return None, t.value
    if isinstance(t, Arith) and t.op in ("+", "-"):
        lc, lk = _offset_form(t.left)
        rc, rk = _offset_form(t.right)
        if t.op == "+":
            if lc is None:
                return rc, lk + rk
            if rc is None:
                return lc, lk + rk
        elif rc is None:
            return lc, lk - rk
    return t, 0


def _rebuild(core: Optional[Term], k: int) -> Term:
    if core is None:
        return Num(k)
    if k == 0:
        return core
    return Arith("+", core, Num(k)) if k > 0 else Arith("-", core, Num(-k))


def simplify_ground_arith(t: Term) -> Term:
    """Fold numerals and collapse c + k1 - k2 into c + (k1 - k2).

    Only offsets around a single non-numeral core are merged; anything
    else is left as written. Idempotent.
    """
    def step(s: Term):
        if not isinstance(s, Arith):
            return None
        l, r = s.left, s.right
        if isinstance(l, Num) and isinstance(r, Num):
            if s.op == "*":
                return Num(l.value * r.value)
            if s.op == "/":
                if r.value == 0:
                    raise LocError("division by zero numeral")
                if l.value % r.value == 0:
                    return Num(l.value // r.value)
                return None
        if s.op == "/" and isinstance(r, Num) and r.value == 0:
            raise LocError("division by zero numeral")
        if s.op in ("+", "-"):
            core, k = _offset_form(s)
            if core is not s:
                return _rebuild(core, k)
        return None
    return map_term(t, step)


# ---------------------------------------------------------------- atoms

class Atom:
    __slots__ = ()


@dataclass(frozen=True)
class Eq(Atom):
    left: Term
    right: Term

    def __str__(self) -> str:
        return show_atom(self)


@dataclass(frozen=True)
class Ineq(Atom):
    op: str
    left: Term
    right: Term

    def __str__(self) -> str:
        return show_atom(self)


@dataclass(frozen=True)
class Pred(Atom):
    name: str
    args: tuple

    def __str__(self) -> str:
        return show_atom(self)


def atom_terms(a: Atom) -> tuple:
    if isinstance(a, Pred):
        return a.args
    return (a.left, a.right)


def map_atom(a: Atom, f: Callable[[Term], Term]) -> Atom:
    if isinstance(a, Eq):
        return Eq(f(a.left), f(a.right))
    if isinstance(a, Ineq):
        return Ineq(a.op, f(a.left), f(a.right))
    return Pred(a.name, tuple(f(x) for x in a.args))


def show_atom(a: Atom) -> str:
    if isinstance(a, Eq):
        return f"{show_term(a.left)} = {show_term(a.right)}"
    if isinstance(a, Ineq):
        return f"{show_term(a.left)} {a.op} {show_term(a.right)}"
    return f"{a.name}[{', '.join(show_term(x) for x in a.args)}]"


def atom_vars(a: Atom) -> set:
    out = set()
    for t in atom_terms(a):
        out |= term_vars(t)
    return out


# ------------------------------------------------------------- formulas

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class AtomF(Formula):
    atom: Atom


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    vars: tuple
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    vars: tuple
    body: Formula


def show_formula(f: Formula) -> str:
    if isinstance(f, AtomF):
        return show_atom(f.atom)
    if isinstance(f, Not):
        return f"NOT({show_formula(f.arg)})"
    if isinstance(f, And):
        return f"AND({', '.join(show_formula(g) for g in f.args)})"
    if isinstance(f, Or):
        return f"OR({', '.join(show_formula(g) for g in f.args)})"
    if isinstance(f, Implies):
        return f"({show_formula(f.left)} --> {show_formula(f.right)})"
    if isinstance(f, Iff):
        return f"({show_formula(f.left)} <--> {show_formula(f.right)})"
    if isinstance(f, (Forall, Exists)):
        q = "FORALL" if isinstance(f, Forall) else "EXISTS"
        return f"({q} {', '.join(f.vars)}). {show_formula(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def map_formula_terms(f: Formula, g: Callable[[Term], Term]) -> Formula:
    if isinstance(f, AtomF):
        return AtomF(map_atom(f.atom, g))
    if isinstance(f, Not):
        return Not(map_formula_terms(f.arg, g))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(map_formula_terms(x, g) for x in f.args))
    if isinstance(f, (Implies, Iff)):
        return type(f)(map_formula_terms(f.left, g), map_formula_terms(f.right, g))
    return type(f)(f.vars, map_formula_terms(f.body, g))


def formula_atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, AtomF):
        yield f.atom
    elif isinstance(f, Not):
        yield from formula_atoms(f.arg)
    elif isinstance(f, (And, Or)):
        for x in f.args:
            yield from formula_atoms(x)
    elif isinstance(f, (Implies, Iff)):
        yield from formula_atoms(f.left)
        yield from formula_atoms(f.right)
    else:
        yield from formula_atoms(f.body)


def formula_free_vars(f: Formula) -> set:
    if isinstance(f, AtomF):
        return atom_vars(f.atom)
    if isinstance(f, Not):
        return formula_free_vars(f.arg)
    if isinstance(f, (And, Or)):
        out = set()
        for x in f.args:
            out |= formula_free_vars(x)
        return out
    if isinstance(f, (Implies, Iff)):
        return formula_free_vars(f.left) | formula_free_vars(f.right)
    return formula_free_vars(f.body) - set(f.vars)


def has_quantifier(f: Formula) -> bool:
    if isinstance(f, (Forall, Exists)):
        return True
    if isinstance(f, AtomF):
        return False
    if isinstance(f, Not):
        return has_quantifier(f.arg)
    if isinstance(f, (And, Or)):
        return any(has_quantifier(x) for x in f.args)
    return has_quantifier(f.left) or has_quantifier(f.right)


def subst_formula(f: Formula, sigma: dict) -> Formula:
    """Capture-avoiding substitution of free variables."""
    if not sigma:
        return f
    if isinstance(f, (Forall, Exists)):
        inner = {k: v for k, v in sigma.items() if k not in f.vars}
        if not inner:
            return f
        incoming = set()
        for v in inner.values():
            incoming |= term_vars(v)
        clash = [x for x in f.vars if x in incoming]
        vars_ = list(f.vars)
        if clash:
            taken = incoming | formula_free_vars(f.body) | set(f.vars) | set(inner)
            ren = {}
            for x in clash:
                nx = fresh_name(x, taken)
                taken.add(nx)
                ren[x] = Var(nx)
            vars_ = [ren[x].name if x in ren else x for x in f.vars]
            inner = {**ren, **inner}
        return type(f)(tuple(vars_), subst_formula(f.body, inner))
    if isinstance(f, AtomF):
        return AtomF(map_atom(f.atom, lambda t: subst_term(t, sigma)))
    if isinstance(f, Not):
        return Not(subst_formula(f.arg, sigma))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(subst_formula(x, sigma) for x in f.args))
    return type(f)(subst_formula(f.left, sigma), subst_formula(f.right, sigma))


# -------------------------------------------------------------- clauses

@dataclass(frozen=True)
class Clause:
    """forall vars. guard OR NOT(antecedent...) OR consequent...

    `guard` is an arbitrary formula disjoined with the clause matrix; the
    form {Phi} --> C stores NOT(Phi) here.
    """
    vars: tuple = ()
    antecedent: tuple = ()
    consequent: tuple = ()
    guard: Optional[Formula] = None
    level: int = 0

    def atoms(self) -> tuple:
        return self.antecedent + self.consequent

    def terms(self) -> Iterator[Term]:
        for a in self.atoms():
            yield from atom_terms(a)

    def all_terms(self) -> Iterator[Term]:
        """Matrix terms plus the terms inside the guard."""
        yield from self.terms()
        if self.guard is not None:
            for a in formula_atoms(self.guard):
                yield from atom_terms(a)

    def free_vars(self) -> set:
        out = set()
        for a in self.atoms():
            out |= atom_vars(a)
        if self.guard is not None:
            out |= formula_free_vars(self.guard)
        return out

    @property
    def is_ground(self) -> bool:
        return not self.vars and not self.free_vars()

    def map_terms(self, f: Callable[[Term], Term], guard_too: bool = True) -> "Clause":
        g = self.guard
        if g is not None and guard_too:
            g = map_formula_terms(g, f)
        return replace(
            self,
            antecedent=tuple(map_atom(a, f) for a in self.antecedent),
            consequent=tuple(map_atom(a, f) for a in self.consequent),
            guard=g,
        )

    def matrix_str(self) -> str:
        return show_matrix(self)

    def __str__(self) -> str:
        s = show_matrix(self)
        if self.vars:
            s = f"(FORALL {', '.join(self.vars)}). {s}"
        return s


def show_matrix(c: Clause) -> str:
    ant = ", ".join(show_atom(a) for a in c.antecedent)
    con = ", ".join(show_atom(a) for a in c.consequent)
    if not c.antecedent and len(c.consequent) == 1:
        body = con
    elif not c.consequent and len(c.antecedent) == 1:
        body = f"NOT({ant})"
    elif not c.antecedent:
        body = f"--> {con}".rstrip()
    elif not c.consequent:
        body = f"{ant} -->"
    else:
        body = f"{ant} --> {con}"
    if c.guard is None:
        return body
    if isinstance(c.guard, Not):
        return "{" + show_formula(c.guard.arg) + "} --> " + body
    return "{" + show_formula(c.guard) + "} OR " + body


def trace_clause(c: Clause) -> str:
    """Clause rendering used in traces: [vars] ant ---> cons."""
    ant = ", ".join(show_atom(a) for a in c.antecedent)
    con = ", ".join(show_atom(a) for a in c.consequent)
    s = f"[{', '.join(c.vars)}] {ant} ---> {con}".replace("  ", " ").rstrip()
    if c.guard is not None:
        s = "{" + show_formula(c.guard) + "} OR " + s
    return s


def substitute(c: Clause, sigma: dict) -> Clause:
    """Apply a variable substitution; substituted variables leave c.vars."""
    sigma = {k: v for k, v in sigma.items()}
    c2 = c.map_terms(lambda t: subst_term(t, sigma), guard_too=False)
    g = subst_formula(c.guard, sigma) if c.guard is not None else None
    return replace(c2, guard=g, vars=tuple(v for v in c.vars if v not in sigma))


def clause_from_literals(lits: Iterable, vars_order=None, level: int = 0) -> Clause:
    """Build a clause from (positive, atom) pairs, dropping duplicates."""
    ant, con = [], []
    for pos, a in lits:
        bucket = con if pos else ant
        if a not in bucket:
            bucket.append(a)
    c = Clause((), tuple(ant), tuple(con), None, level)
    fv = c.free_vars()
    order = list(vars_order or [])
    vs = [v for v in order if v in fv] + sorted(fv - set(order), key=natural_key)
    return replace(c, vars=tuple(vs))


def natural_key(s: str):
    return tuple(int(p) if p.isdigit() else p for p in re.split(r"(\d+)", s))


def fresh_name(base: str, taken) -> str:
    if base not in taken:
        return base
    for k in itertools.count(1):
        cand = f"{base}{k}"
        if cand not in taken:
            return cand


class NameSupply:
    """Numbered fresh names prefix_1, prefix_2, ... avoiding `taken`."""

    def __init__(self, taken=()):
        self.taken = set(taken)
        self.counters: dict = {}

    def next(self, prefix: str, sep: str = "_") -> str:
        k = self.counters.get(prefix, 0)
        while True:
            k += 1
            name = f"{prefix}{sep}{k}"
            if name not in self.taken:
                break
        self.counters[prefix] = k
        self.taken.add(name)
        return name

    def reserve(self, names) -> None:
        self.taken |= set(names)


# ------------------------------------------------------------ signature

@dataclass(frozen=True)
class SymbolDecl:
    name: str
    kind: str  # base | ext | rel | const
    arity: int = 0
    level: int = 0
    domain: Optional[Sort] = None
    range: Optional[Sort] = None
    arg_sorts: Optional[tuple] = None

    def sorts_of_args(self) -> tuple:
        if self.arg_sorts is not None:
            return self.arg_sorts
        return (self.domain,) * self.arity


@dataclass(frozen=True)
class IntervalConstraint:
    var: str
    lower: Optional[int] = None
    lower_strict: bool = False
    upper: Optional[int] = None
    upper_strict: bool = False

    def show(self) -> str:
        s = self.var
        if self.lower is not None:
            s = f"{self.lower} {'<' if self.lower_strict else '<='} {s}"
        if self.upper is not None:
            s = f"{s} {'<' if self.upper_strict else '<='} {self.upper}"
        return s


@dataclass(frozen=True)
class Signature:
    decls: tuple = ()
    default_sort: Sort = INT
    interval: Optional[IntervalConstraint] = None
    stable: tuple = ()

    @cached_property
    def table(self) -> dict:
        return {d.name: d for d in self.decls}

    def get(self, name: str) -> Optional[SymbolDecl]:
        return self.table.get(name)

    def level_of(self, name: str) -> int:
        d = self.table.get(name)
        return d.level if d is not None and d.kind == "ext" else 0

    def is_extension(self, name: str) -> bool:
        return self.level_of(name) >= 1

    def extension_names(self) -> list:
        return [d.name for d in self.decls if d.kind == "ext"]

    def max_level(self) -> int:
        return max((d.level for d in self.decls if d.kind == "ext"), default=0)

    def with_decls(self, new: Iterable[SymbolDecl]) -> "Signature":
        new = list(new)
        names = {d.name for d in new}
        kept = tuple(d for d in self.decls if d.name not in names)
        return replace(self, decls=kept + tuple(new))

    def names(self) -> set:
        return set(self.table)


def term_level(t: Term, sig: Signature) -> int:
    lv = 0
    for s in subterms(t):
        if isinstance(s, App):
            lv = max(lv, sig.level_of(s.fn))
        elif isinstance(s, Write):
            root = s
            while not isinstance(root.array, str):
                root = root.array
            lv = max(lv, sig.level_of(root.array))
    return lv


def clause_level(c: Clause, sig: Signature) -> int:
    return max((term_level(t, sig) for t in c.all_terms()), default=0)


def with_level(c: Clause, sig: Signature) -> Clause:
    return replace(c, level=clause_level(c, sig))


def extension_ground_terms(clauses: Iterable[Clause], level: int, sig: Signature) -> list:
    """Distinct ground terms headed by a level-`level` symbol, sorted."""
    found = set()
    for c in clauses:
        for t in c.all_terms():
            for s in subterms(t):
                if isinstance(s, App) and sig.level_of(s.fn) == level and is_ground_term(s):
                    found.add(simplify_ground_arith(s))
    return sorted(found, key=term_key)


def clause_constants(c: Clause) -> set:
    out = set()
    for t in c.all_terms():
        out |= {s.name for s in subterms(t) if isinstance(s, Const)}
    return out


def clause_functions(c: Clause) -> set:
    out = set()
    for t in c.all_terms():
        out |= {s.fn for s in subterms(t) if isinstance(s, App)}
    return out


# ----------------------------------------------------------------- task

@dataclass(frozen=True)
class Task:
    signature: Signature
    base_axioms: tuple = ()
    clauses: tuple = ()
    formulas: tuple = ()
    ground_formulas: tuple = ()
    query: tuple = ()

    def all_clauses(self) -> tuple:
        return self.base_axioms + self.clauses + self.query

    def used_names(self) -> set:
        names = set(self.signature.names())
        for c in self.all_clauses():
            names |= clause_constants(c) | clause_functions(c)
        for f in self.formulas + self.ground_formulas:
            for a in formula_atoms(f):
                for t in atom_terms(a):
                    names |= {s.name for s in subterms(t) if isinstance(s, Const)}
                    names |= {s.fn for s in subterms(t) if isinstance(s, App)}
        return names

    def uses_writes(self) -> bool:
        def has_w(t):
            return any(isinstance(s, (Write, Select)) for s in subterms(t))
        if any(has_w(t) for c in self.all_clauses() for t in c.all_terms()):
            return True
        for f in self.formulas + self.ground_formulas:
            for a in formula_atoms(f):
                if any(has_w(t) for t in atom_terms(a)):
                    return True
        return False

    def uses_pointers(self) -> bool:
        for d in self.signature.decls:
            for s in (d.domain, d.range) + tuple(d.arg_sorts or ()):
                if s is not None and s.kind == "pointer":
                    return True
        return False


# -------------------------------------------------------- sort inference

class _UF:
    def __init__(self):
        self.parent: dict = {}
        self.sort: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def fix(self, x, s: Sort, what: str):
        r = self.find(x)
        self.sort[r] = _merge_sorts(self.sort.get(r), s, what)

    def union(self, x, y, what: str):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        merged = _merge_sorts(self.sort.get(rx), self.sort.get(ry), what)
        self.parent[rx] = ry
        self.sort.pop(rx, None)
        if merged is not None:
            self.sort[ry] = merged


def _merge_sorts(a, b, what):
    if a is None:
        return b
    if b is None or a == b:
        return a
    if a.numeric and b.numeric:
        return REAL
    raise SortError(f"{what} used under conflicting sorts {a} and {b}")


@dataclass
class Sorting:
    """Result of sort inference over a clause list."""
    constants: dict
    clause_vars: list  # per input clause: {var: Sort}
    default: Sort
    functions: dict = field(default_factory=dict)  # undeclared fn -> (arg sorts, range)
    relations: dict = field(default_factory=dict)  # undeclared rel -> arg sorts

    def of_const(self, name: str) -> Sort:
        return self.constants.get(name, self.default)


def infer_sorts(sig: Signature, clauses: Iterable[Clause], formulas: Iterable[Formula] = ()) -> Sorting:
    uf = _UF()
    for d in sig.decls:
        if d.kind == "const" and d.range is not None:
            uf.fix(("c", d.name), d.range, f"constant {d.name}")
    if sig.get("null") is None and any(
            s is not None and s.kind == "pointer"
            for d in sig.decls for s in (d.domain, d.range) + tuple(d.arg_sorts or ())):
        uf.fix(("c", "null"), Sort("pointer", 1), "constant null")
    undeclared_fns: dict = {}
    undeclared_rels: dict = {}
    scope = itertools.count()
    clause_nodes = []

    def node(t: Term, env: dict):
        """Return the union-find node for t, or a concrete Sort, or None."""
        if isinstance(t, Var):
            if t.name not in env:
                env[t.name] = ("v", next(scope), t.name)
            return env[t.name]
        if isinstance(t, Const):
            return ("c", t.name)
        if isinstance(t, Num):
            return None
        if isinstance(t, Arith):
            l, r = node(t.left, env), node(t.right, env)
            res = ("a", next(scope))
            uf.fix(res, sig.default_sort, "arithmetic term")
            for x in (l, r):
                if x is not None:
                    link(res, x, show_term(t))
            return res
        if isinstance(t, App):
            d = sig.get(t.fn)
            if d is None or d.kind not in ("base", "ext"):
                if t.fn.startswith("sk_") or d is None:
                    # undeclared function: sorts inferred per position
                    undeclared_fns[t.fn] = len(t.args)
                    for k, a in enumerate(t.args):
                        x = node(a, env)
                        if x is not None:
                            link(("fa", t.fn, k), x, t.fn)
                    return ("fr", t.fn)
            sorts = d.sorts_of_args()
            for k, a in enumerate(t.args):
                x = node(a, env)
                if x is not None and k < len(sorts) and sorts[k] is not None:
                    link(x, sorts[k], f"argument {k + 1} of {t.fn}")
            return d.range
        if isinstance(t, Write):
            arr = t.array
            while not isinstance(arr, str):
                node(arr.index, env)
                node(arr.value, env)
                arr = arr.array
            d = sig.get(arr)
            i, v = node(t.index, env), node(t.value, env)
            if d is not None:
                if i is not None and d.domain is not None:
                    link(i, d.domain, f"index of {arr}")
                if v is not None and d.range is not None:
                    link(v, d.range, f"value of {arr}")
            return d.range if d is not None else None
        if isinstance(t, Select):
            w = node(t.array, env)
            i = node(t.index, env)
            root = t.array
            while not isinstance(root, str):
                root = root.array
            d = sig.get(root)
            if d is not None and i is not None and d.domain is not None:
                link(i, d.domain, f"index of {root}")
            return w
        return None

    def link(x, y, what):
        if isinstance(x, Sort) and isinstance(y, Sort):
            _merge_sorts(x, y, what)
        elif isinstance(x, Sort):
            uf.fix(y, x, what)
        elif isinstance(y, Sort):
            uf.fix(x, y, what)
        else:
            uf.union(x, y, what)

    def atom(a: Atom, env: dict):
        if isinstance(a, Pred):
            d = sig.get(a.name)
            sorts = d.sorts_of_args() if d is not None and d.arg_sorts else None
            for k, x in enumerate(a.args):
                n = node(x, env)
                if n is None:
                    continue
                if sorts:
                    link(n, sorts[k], f"argument {k + 1} of {a.name}")
                else:
                    link(("ra", a.name, k), n, f"argument {k + 1} of {a.name}")
            if d is None or not d.arg_sorts:
                undeclared_rels[a.name] = len(a.args)
            return
        l, r = node(a.left, env), node(a.right, env)
        if l is not None and r is not None:
            link(l, r, show_atom(a))

    def formula(f: Formula, env: dict):
        if isinstance(f, AtomF):
            atom(f.atom, env)
        elif isinstance(f, Not):
            formula(f.arg, env)
        elif isinstance(f, (And, Or)):
            for g in f.args:
                formula(g, env)
        elif isinstance(f, (Implies, Iff)):
            formula(f.left, env)
            formula(f.right, env)
        else:
            inner = dict(env)
            for v in f.vars:
                inner[v] = ("v", next(scope), v)
            formula(f.body, inner)

    for c in clauses:
        env: dict = {}
        for a in c.atoms():
            atom(a, env)
        if c.guard is not None:
            formula(c.guard, env)
        clause_nodes.append(env)
    for f in formulas:
        formula(f, {})

    def resolve(n):
        r = uf.find(n)
        return uf.sort.get(r, sig.default_sort)

    consts = {}
    for key in list(uf.parent):
        if key[0] == "c":
            consts[key[1]] = resolve(key)
    fns = {f: (tuple(resolve(("fa", f, k)) for k in range(n)), resolve(("fr", f)))
           for f, n in undeclared_fns.items()}
    rels = {r: tuple(resolve(("ra", r, k)) for k in range(n)) for r, n in undeclared_rels.items()}
    return Sorting(consts, [{v: resolve(n) for v, n in env.items()} for env in clause_nodes],
                   sig.default_sort, fns, rels)


def term_sort(t: Term, sig: Signature, consts: dict, var_sorts: dict) -> Optional[Sort]:
    """Sort of a term given resolved constant and variable sorts.

    Returns None for numerals, whose sort is fixed by context.
    """
    if isinstance(t, Var):
        return var_sorts.get(t.name, sig.default_sort)
    if isinstance(t, Const):
        return consts.get(t.name, sig.default_sort)
    if isinstance(t, Num):
        return None
    if isinstance(t, Arith):
        l = term_sort(t.left, sig, consts, var_sorts)
        r = term_sort(t.right, sig, consts, var_sorts)
        if REAL in (l, r) or t.op == "/" and sig.default_sort == REAL:
            return REAL
        return l or r
    if isinstance(t, App):
        d = sig.get(t.fn)
        return d.range if d is not None and d.range is not None else sig.default_sort
    if isinstance(t, Select):
        root = t.array
        while not isinstance(root, str):
            root = root.array
        d = sig.get(root)
        return d.range if d is not None else sig.default_sort
    return None
