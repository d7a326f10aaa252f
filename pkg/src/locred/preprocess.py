"""Clause rewrites that bring extension axioms into a shape the
instantiation step can handle."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .core import (
    App, Arith, Clause, Const, Eq, Ineq, NameSupply, Num, Select,
    Signature, SymbolDecl, UnsupportedInput, Var, Write, atom_vars,
    fresh_name, is_ground_term, map_atom, map_term, simplify_ground_arith,
    substitute, subterms, with_level,
)


def _has_extension(t, sig: Signature) -> bool:
    return any(isinstance(s, App) and sig.is_extension(s.fn) for s in subterms(t))


def _clause_var_names(c: Clause) -> set:
    names = set(c.vars)
    for a in c.atoms():
        names |= atom_vars(a)
    return names


def is_base_ground(t, sig: Signature) -> bool:
    return is_ground_term(t) and not _has_extension(t, sig)


# ------------------------------------------------------------ writes

@dataclass
class WriteElimination:
    clauses: list
    query: list
    axioms: list = field(default_factory=list)        # universal frame axioms
    ground_axioms: list = field(default_factory=list)  # a_wk(i) = x
    decls: list = field(default_factory=list)
    names: dict = field(default_factory=dict)           # Write -> new name


def eliminate_writes(clauses, query, sig: Signature, supply: NameSupply) -> WriteElimination:
    """Replace every write(a, i, x) by a fresh array a_wk plus axioms.

    a_wk(i) = x is ground and joins the query; forall j. j = i or
    a_wk(j) = a(j) joins the extension axioms.
    """
    res = WriteElimination([], [])
    counters: dict = {}

    def root_of(arr) -> str:
        while not isinstance(arr, str):
            arr = arr.array
        return arr

    def name_of(w: Write) -> str:
        if w in res.names:
            return res.names[w]
        arr = w.array if isinstance(w.array, str) else name_of(w.array)
        if not (is_ground_term(w.index) and is_ground_term(w.value)):
            raise UnsupportedInput(f"write with non-ground index or value: {w}")
        root = root_of(w.array)
        k = counters.get(root, 0)
        while True:
            k += 1
            name = f"{root}_w{k}"
            if name not in supply.taken:
                break
        counters[root] = k
        supply.reserve([name])
        res.names[w] = name
        d = sig.get(root)
        lvl = d.level if d is not None and d.kind == "ext" else 1
        dom = d.domain if d is not None else sig.default_sort
        rng = d.range if d is not None else sig.default_sort
        res.decls.append(SymbolDecl(name, "ext", 1, lvl, dom, rng))
        res.ground_axioms.append(Clause((), (), (Eq(App(name, (w.index,)), w.value),)))
        i = Var("i")
        res.axioms.append(Clause(("i",), (), (Eq(i, w.index), Eq(App(name, (i,)), App(arr, (i,))))))
        return name

    def rewrite(t):
        def f(s):
            if isinstance(s, Select):
                return App(name_of(s.array), (s.index,))
            return None
        out = map_term(t, f)
        for s in subterms(out):
            if isinstance(s, Write):
                raise UnsupportedInput(f"array update used outside a read: {s}")
        return out

    for c in clauses:
        res.clauses.append(c.map_terms(rewrite))
    for c in query:
        res.query.append(c.map_terms(rewrite))
    return res


# ----------------------------------------------------- disequalities

def _index_equation(a, vars_: set, sig: Signature):
    """(var, other) if `a` is an equation between an index variable and a
    variable or base-ground term."""
    if not isinstance(a, Eq):
        return None
    for x, y in ((a.left, a.right), (a.right, a.left)):
        if isinstance(x, Var) and x.name in vars_:
            if isinstance(y, Var) and y.name in vars_ and y != x:
                return x, y
            if is_base_ground(y, sig):
                return x, y
    return None


def split_disequalities(clauses, sig: Signature) -> list:
    """Turn each consequent equation i = t into two positive guards.

    The disjunct i = t is the premise i != t read as a clause; over the
    integers it splits into i <= t - 1 and t + 1 <= i.
    """
    out = []
    work = list(clauses)
    while work:
        c = work.pop(0)
        hit = None
        for k, a in enumerate(c.consequent):
            pair = _index_equation(a, set(c.vars), sig)
            if pair is not None:
                hit = (k, pair)
                break
        if hit is None:
            out.append(c)
            continue
        k, (v, t) = hit
        rest = c.consequent[:k] + c.consequent[k + 1:]
        below = Ineq("<=", v, Arith("-", t, Num(1)))
        above = Ineq("<=", Arith("+", t, Num(1)), v)
        work.insert(0, replace(c, antecedent=(above,) + c.antecedent, consequent=rest))
        work.insert(0, replace(c, antecedent=(below,) + c.antecedent, consequent=rest))
    return out


# ---------------------------------------------------------- flatten

def flatten_clause(c: Clause, sig: Signature) -> Clause:
    """Name every non-trivial argument of an extension term by a variable.

    Arguments that are variables or ground base terms stay; anything else
    (arithmetic over variables, nested extension terms) becomes a fresh
    variable j, j1, ... with the defining equation added as a premise.
    The same argument gets the same variable.
    """
    taken = _clause_var_names(c)
    memo: dict = {}
    new_eqs: list = []

    def var_for(arg):
        if arg not in memo:
            name = fresh_name("j", taken)
            taken.add(name)
            memo[arg] = Var(name)
            new_eqs.append(Eq(Var(name), arg))
        return memo[arg]

    def f(s):
        if isinstance(s, App) and sig.is_extension(s.fn):
            args = tuple(a if isinstance(a, Var) or is_base_ground(a, sig) else var_for(a)
                         for a in s.args)
            return App(s.fn, args)
        return None

    ant = tuple(map_atom(a, lambda t: map_term(t, f)) for a in c.antecedent)
    con = tuple(map_atom(a, lambda t: map_term(t, f)) for a in c.consequent)
    if not new_eqs:
        return c
    fresh = [e.left.name for e in new_eqs]
    return replace(c, vars=c.vars + tuple(fresh), antecedent=tuple(new_eqs) + ant, consequent=con)


def flatten(clauses, sig: Signature) -> list:
    return [flatten_clause(c, sig) for c in clauses]


def flatten_query(query, sig: Signature, supply: NameSupply) -> list:
    """Ground counterpart of flattening: nested arguments get constants."""
    memo: dict = {}
    extra: list = []

    def const_for(arg):
        if arg not in memo:
            name = supply.next("qc")
            memo[arg] = Const(name)
            extra.append(Clause((), (), (Eq(Const(name), arg),)))
        return memo[arg]

    def f(s):
        if isinstance(s, App) and sig.is_extension(s.fn):
            return App(s.fn, tuple(a if isinstance(a, Const) or is_base_ground(a, sig)
                                   else const_for(a) for a in s.args))
        return None

    out = [c.map_terms(lambda t: map_term(t, f), guard_too=False) for c in query]
    return out + extra


# -------------------------------------------------------- linearize

def linearize_clause(c: Clause, sig: Signature, level: Optional[int] = None) -> Clause:
    """Make every variable belong to at most one extension term.

    Only terms headed by symbols of `level` (default: the clause level)
    are considered; symbols below that level are base symbols here. A
    variable seen in a second distinct term, or twice in one term, is
    replaced there by a fresh x_k with the premise x_k = var.
    """
    lvl = c.level if level is None else level
    taken = _clause_var_names(c)
    owner: dict = {}
    done: dict = {}
    new_eqs: list = []

    def fresh_for(v: str) -> Var:
        k = 1
        while f"x_{k}" in taken:
            k += 1
        name = f"x_{k}"
        taken.add(name)
        new_eqs.append(Eq(Var(name), Var(v)))
        return Var(name)

    def lin(t):
        if isinstance(t, App) and sig.level_of(t.fn) == lvl:
            if t in done:
                return done[t]
            here: set = set()

            def arg(a):
                if isinstance(a, Var):
                    v = a.name
                    if v in here or owner.get(v, t) != t:
                        return fresh_for(v)
                    owner[v] = t
                    here.add(v)
                    return a
                if isinstance(a, App) and sig.level_of(a.fn) == lvl:
                    return lin(a)
                if isinstance(a, App):
                    return App(a.fn, tuple(arg(x) for x in a.args))
                if isinstance(a, Arith):
                    return Arith(a.op, arg(a.left), arg(a.right))
                return a

            out = App(t.fn, tuple(arg(a) for a in t.args))
            done[t] = out
            return out
        if isinstance(t, App):
            return App(t.fn, tuple(lin(a) for a in t.args))
        if isinstance(t, Arith):
            return Arith(t.op, lin(t.left), lin(t.right))
        return t

    ant = tuple(map_atom(a, lin) for a in c.antecedent)
    con = tuple(map_atom(a, lin) for a in c.consequent)
    if not new_eqs:
        return c
    fresh = [e.left.name for e in new_eqs]
    return replace(c, vars=c.vars + tuple(fresh), antecedent=tuple(new_eqs) + ant, consequent=con)


def linearize(clauses, sig: Signature) -> list:
    return [linearize_clause(c, sig) for c in clauses]


# ------------------------------------------------------ unpseudofy

def _solve(a, vars_: set):
    """(var, ground term) when `a` pins a variable to a ground value."""
    if not isinstance(a, Eq):
        return None
    for x, g in ((a.left, a.right), (a.right, a.left)):
        if not is_ground_term(g):
            continue
        if isinstance(x, Var) and x.name in vars_:
            return x.name, g
        # g = v + k and g = v - k (also k + v)
        if isinstance(x, Arith) and x.op in ("+", "-"):
            l, r = x.left, x.right
            if isinstance(l, Var) and l.name in vars_ and isinstance(r, Num):
                inv = "-" if x.op == "+" else "+"
                return l.name, simplify_ground_arith(Arith(inv, g, r))
            if x.op == "+" and isinstance(r, Var) and r.name in vars_ and isinstance(l, Num):
                return r.name, simplify_ground_arith(Arith("-", g, l))
    return None


def unpseudofy_clause(c: Clause) -> Clause:
    """Eliminate premises x = t (t ground) by substituting t for x."""
    while c.vars:
        vars_ = set(c.vars)
        for k, a in enumerate(c.antecedent):
            sol = _solve(a, vars_)
            if sol is not None:
                v, t = sol
                rest = replace(c, antecedent=c.antecedent[:k] + c.antecedent[k + 1:])
                c = substitute(rest, {v: t}).map_terms(simplify_ground_arith)
                break
        else:
            break
    return c


def unpseudofy(clauses) -> list:
    return [unpseudofy_clause(c) for c in clauses]


# --------------------------------------------------------- pointers

def null_name(sort) -> str:
    return "null" if sort.index == 1 else f"null{sort.index}"


def pointer_arguments(c: Clause, sig: Signature) -> list:
    """Non-ground arguments of pointer-domain functions, innermost first."""
    out = []
    for t in c.terms():
        for s in subterms(t):
            if not isinstance(s, App):
                continue
            d = sig.get(s.fn)
            if d is None:
                continue
            for srt, a in zip(d.sorts_of_args(), s.args):
                if srt is not None and srt.kind == "pointer" and not is_ground_term(a):
                    if (a, srt) not in out:
                        out.append((a, srt))
    return out


def _has_null_disjunct(c: Clause, t, null) -> bool:
    return Eq(t, null) in c.consequent or Eq(null, t) in c.consequent


def add_nullable_premises(clauses, sig: Signature) -> list:
    """Add s = null for every pointer argument s under a function."""
    out = []
    for c in clauses:
        extra = []
        for t, srt in pointer_arguments(c, sig):
            null = Const(null_name(srt))
            if not _has_null_disjunct(c, t, null) and Eq(t, null) not in extra:
                extra.append(Eq(t, null))
        out.append(replace(c, consequent=tuple(extra) + c.consequent) if extra else c)
    return out


def recalc_levels(clauses, sig: Signature) -> list:
    return [with_level(c, sig) for c in clauses]
