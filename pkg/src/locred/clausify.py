"""Clause normal form: NNF, Skolemization and CNF with structural renaming."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .core import (
    And, App, AtomF, Clause, Const, Exists, Forall, Formula, Iff, Implies,
    NameSupply, Not, Or, Pred, Signature, Var, atom_terms, atom_vars,
    clause_from_literals, formula_free_vars, show_formula,
    subst_formula, subterms, with_level,
)


# NNF nodes: ("lit", positive, atom) | ("and", [..]) | ("or", [..])
#            | ("all", vars, body) | ("ex", vars, body)

def _nnf(f: Formula, pos: bool):
    if isinstance(f, AtomF):
        return ("lit", pos, f.atom)
    if isinstance(f, Not):
        return _nnf(f.arg, not pos)
    if isinstance(f, (And, Or)):
        conj = isinstance(f, And) == pos
        return ("and" if conj else "or", [_nnf(g, pos) for g in f.args])
    if isinstance(f, Implies):
        if pos:
            return ("or", [_nnf(f.left, False), _nnf(f.right, True)])
        return ("and", [_nnf(f.left, True), _nnf(f.right, False)])
    if isinstance(f, Iff):
        a, b = f.left, f.right
        if pos:
            return ("and", [("or", [_nnf(a, False), _nnf(b, True)]),
                            ("or", [_nnf(a, True), _nnf(b, False)])])
        return ("and", [("or", [_nnf(a, True), _nnf(b, True)]),
                        ("or", [_nnf(a, False), _nnf(b, False)])])
    universal = isinstance(f, Forall) == pos
    return ("all" if universal else "ex", tuple(f.vars), _nnf(f.body, pos))


def _rename_apart(f: Formula, counter: list, env: Optional[dict] = None) -> Formula:
    """Give every bound variable a fresh name z_1, z_2, ..."""
    env = env or {}
    if isinstance(f, (Forall, Exists)):
        inner = dict(env)
        new = []
        for v in f.vars:
            counter[0] += 1
            name = f"z_{counter[0]}"
            inner[v] = Var(name)
            new.append(name)
        body = subst_formula(f.body, {v: inner[v] for v in f.vars})
        body = _rename_apart_body(body, counter, inner)
        return type(f)(tuple(new), body)
    return _rename_apart_body(f, counter, env)


def _rename_apart_body(f, counter, env):
    if isinstance(f, AtomF):
        return f
    if isinstance(f, Not):
        return Not(_rename_apart(f.arg, counter, env))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_rename_apart(g, counter, env) for g in f.args))
    if isinstance(f, (Implies, Iff)):
        return type(f)(_rename_apart(f.left, counter, env), _rename_apart(f.right, counter, env))
    return _rename_apart(f, counter, env)


def _node_free_vars(n) -> set:
    tag = n[0]
    if tag == "lit":
        return atom_vars(n[2])
    if tag in ("and", "or"):
        out = set()
        for c in n[1]:
            out |= _node_free_vars(c)
        return out
    return _node_free_vars(n[2]) - set(n[1])


def _subst_node(n, sigma):
    from .core import map_atom, subst_term
    tag = n[0]
    if tag == "lit":
        return ("lit", n[1], map_atom(n[2], lambda t: subst_term(t, sigma)))
    if tag in ("and", "or"):
        return (tag, [_subst_node(c, sigma) for c in n[1]])
    inner = {k: v for k, v in sigma.items() if k not in n[1]}
    return (tag, n[1], _subst_node(n[2], inner))


def _skolemize(n, scope: list, supply: NameSupply, made: list):
    tag = n[0]
    if tag == "lit":
        return n
    if tag in ("and", "or"):
        return (tag, [_skolemize(c, scope, supply, made) for c in n[1]])
    if tag == "all":
        return ("all", n[1], _skolemize(n[2], scope + list(n[1]), supply, made))
    # existential: replace each bound variable by a Skolem term over the
    # universals in scope that the subformula actually depends on
    deps = [u for u in scope if u in _node_free_vars(n)]
    sigma = {}
    for v in n[1]:
        name = supply.next("sk")
        made.append((name, len(deps)))
        sigma[v] = App(name, tuple(Var(u) for u in deps)) if deps else Const(name)
    return _skolemize(_subst_node(n[2], sigma), scope, supply, made)


def _drop_universals(n):
    tag = n[0]
    if tag == "lit":
        return n
    if tag in ("and", "or"):
        return (tag, [_drop_universals(c) for c in n[1]])
    return _drop_universals(n[2])


def _flatten_junctions(n):
    tag = n[0]
    if tag == "lit":
        return n
    kids = []
    for c in n[1]:
        c = _flatten_junctions(c)
        if c[0] == tag:
            kids.extend(c[1])
        else:
            kids.append(c)
    return (tag, kids)


@dataclass
class CnfResult:
    clauses: list
    skolems: list = field(default_factory=list)      # (name, arity)
    renamings: list = field(default_factory=list)    # (name, arity)
    log: list = field(default_factory=list)


class _Cnf:
    def __init__(self, sig: Signature, supply: NameSupply, rename: bool):
        self.sig = sig
        self.supply = supply
        self.rename = rename
        self.defs: list = []
        self.renamings: list = []
        self._size_cache: dict = {}

    def has_extension(self, n) -> bool:
        if n[0] == "lit":
            return any(isinstance(s, App) and self.sig.is_extension(s.fn)
                       for t in atom_terms(n[2]) for s in subterms(t))
        return any(self.has_extension(c) for c in n[1])

    def size(self, n) -> int:
        """Number of clauses the plain CNF of n would have."""
        key = id(n)
        if key in self._size_cache:
            return self._size_cache[key][1]
        if n[0] == "lit":
            s = 1
        elif n[0] == "and":
            s = sum(self.size(c) for c in n[1])
        else:
            s = math.prod(self.size(c) for c in n[1])
        self._size_cache[key] = (n, s)
        return s

    def cnf(self, n) -> list:
        tag = n[0]
        if tag == "lit":
            return [[(n[1], n[2])]]
        if tag == "and":
            out = []
            for c in n[1]:
                out.extend(self.cnf(c))
            return out
        kids = list(n[1])
        if self.rename:
            kids = self.rename_children(kids)
        result = [[]]
        for c in kids:
            part = self.cnf(c)
            result = [a + b for a in result for b in part]
        return result

    def rename_children(self, kids: list) -> list:
        sizes = [self.size(c) for c in kids]
        while True:
            total = math.prod(sizes)
            best, gain = None, 0
            for j, c in enumerate(kids):
                if sizes[j] <= 1 or self.has_extension(c):
                    continue
                after = sizes[j] + total // sizes[j]
                if after < total and total - after > gain:
                    best, gain = j, total - after
            if best is None:
                return kids
            kids[best] = self.introduce(kids[best])
            sizes[best] = 1

    def introduce(self, n):
        fv = sorted(_node_free_vars(n))
        name = self.supply.next("ren")
        atom = Pred(name, tuple(Var(v) for v in fv))
        self.renamings.append((name, len(fv)))
        for cl in self.cnf(n):
            self.defs.append([(False, atom)] + cl)
        return ("lit", True, atom)


def clausify(formulas, sig: Signature, supply: NameSupply, rename: bool = True) -> CnfResult:
    """Turn closed (or implicitly universal) formulas into clauses.

    Bound variables become z_1, z_2, ...; existentials become Skolem
    symbols sk_1, sk_2, ... drawn from `supply`; renaming predicates are
    named ren_1, ren_2, ....
    """
    res = CnfResult([])
    counter = [0]
    seen = set()
    for f in formulas:
        free = sorted(formula_free_vars(f))
        if free:
            f = Forall(tuple(free), f)
        res.log.append(f"Adding formula: {show_formula(f)}")
        g = _rename_apart(f, counter)
        made: list = []
        n = _skolemize(_nnf(g, True), [], supply, made)
        res.skolems.extend(made)
        n = _flatten_junctions(_drop_universals(n))
        worker = _Cnf(sig, supply, rename)
        lit_lists = worker.cnf(n) + worker.defs
        res.renamings.extend(worker.renamings)
        for lits in lit_lists:
            if _tautology(lits):
                continue
            c = with_level(clause_from_literals(lits), sig)
            if c not in seen:
                seen.add(c)
                res.clauses.append(c)
    return res


def _tautology(lits) -> bool:
    pos = {a for p, a in lits if p}
    return any(not p and a in pos for p, a in lits)


def clausify_formula(f: Formula, sig: Optional[Signature] = None, rename: bool = True,
                     taken=()) -> list:
    """Convenience wrapper returning only the clauses."""
    sig = sig if sig is not None else Signature()
    supply = NameSupply(taken)
    return clausify([f], sig, supply, rename).clauses


def clause_to_formula(c: Clause) -> Formula:
    """The clause as a (universally closed) formula."""
    parts = [Not(AtomF(a)) for a in c.antecedent] + [AtomF(a) for a in c.consequent]
    if c.guard is not None:
        parts.insert(0, c.guard)
    body = parts[0] if len(parts) == 1 else Or(tuple(parts)) if parts else Or(())
    return Forall(c.vars, body) if c.vars else body
