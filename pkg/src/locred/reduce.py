"""Hierarchical reduction: instantiate, purify, replace definitions by
congruence instances, and repeat one level down."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .clausify import clausify, clause_to_formula
from .core import (
    App, Clause, Const, Eq, NameSupply, Signature, Var, atom_terms, map_term,
    extension_ground_terms, is_ground_term, simplify_ground_arith, substitute,
    subterms, term_key, trace_clause, with_level,
)
from .preprocess import _has_extension, flatten_clause, linearize_clause, unpseudofy_clause


@dataclass(frozen=True)
class Definition:
    name: str
    term: App  # arguments already purified

    def clause(self) -> Clause:
        return Clause((), (), (Eq(Const(self.name), self.term),))


@dataclass
class DefinitionMap:
    level: int
    entries: list = field(default_factory=list)

    def by_head(self) -> dict:
        groups: dict = {}
        for d in self.entries:
            groups.setdefault(d.term.fn, []).append(d)
        return groups

    def lookup(self, term) -> Optional[str]:
        for d in self.entries:
            if d.term == term:
                return d.name
        return None

    def __len__(self) -> int:
        return len(self.entries)


# ------------------------------------------------------------ instances

def _arg_positions(c: Clause, level: int, sig: Signature) -> dict:
    """var -> set of (fn, position) where it is a direct argument."""
    pos: dict = {}
    for t in c.all_terms():
        for s in subterms(t):
            if isinstance(s, App) and sig.level_of(s.fn) == level:
                for k, a in enumerate(s.args):
                    if isinstance(a, Var) and a.name in c.vars:
                        pos.setdefault(a.name, set()).add((s.fn, k))
    return pos


def _simplify_clause(c: Clause) -> Clause:
    return c.map_terms(simplify_ground_arith)


def compute_instances(clauses, store, level: int, sig: Signature) -> list:
    """K[G]: instantiate each variable with the ground arguments found at
    its argument positions among the level-`level` store terms.

    Variables that never occur directly under a level-`level` symbol are
    left universal.
    """
    args_at: dict = {}
    for t in store:
        for k, a in enumerate(t.args):
            lst = args_at.setdefault((t.fn, k), [])
            if a not in lst:
                lst.append(a)
    out, seen = [], set()
    for c in clauses:
        pos = _arg_positions(c, level, sig)
        inst_vars = [v for v in c.vars if v in pos]
        choices = []
        for v in inst_vars:
            cand = []
            for p in sorted(pos[v]):
                for a in args_at.get(p, []):
                    if a not in cand:
                        cand.append(a)
            choices.append(sorted(cand, key=term_key))
        for combo in itertools.product(*choices):
            inst = _simplify_clause(substitute(c, dict(zip(inst_vars, combo))))
            if inst not in seen:
                seen.add(inst)
                out.append(inst)
    return out


def index_terms(clauses, query, sig: Signature) -> list:
    """Ground index terms: read arguments in K and G plus the ground
    sides of index guards in K."""
    found = set()
    for c in list(clauses) + list(query):
        for t in c.all_terms():
            for s in subterms(t):
                if isinstance(s, App) and sig.is_extension(s.fn):
                    for a in s.args:
                        if is_ground_term(a):
                            found.add(simplify_ground_arith(a))
    for c in clauses:
        for a in c.antecedent:
            terms = atom_terms(a)
            if any(_has_extension(t, sig) for t in terms) or all(is_ground_term(t) for t in terms):
                continue
            for t in terms:
                if is_ground_term(t):
                    found.add(simplify_ground_arith(t))
    return sorted(found, key=term_key)


def compute_array_instances(clauses, terms) -> list:
    """K[Psi(G)]: every universal variable ranges over all index terms."""
    out, seen = [], set()
    for c in clauses:
        for combo in itertools.product(terms, repeat=len(c.vars)):
            inst = _simplify_clause(substitute(c, dict(zip(c.vars, combo))))
            if inst not in seen:
                seen.add(inst)
                out.append(inst)
    return out


# ---------------------------------------------------------- purification

def purify(clauses, level: int, sig: Signature, supply: NameSupply):
    """Replace ground level-`level` terms by fresh constants e_k.

    Terms are numbered innermost first, then by head symbol, then by
    argument order, so the numbering is deterministic.
    """
    simplified = [_simplify_clause(c) for c in clauses]
    found = extension_ground_terms(simplified, level, sig)

    def depth(t) -> int:
        sub = [depth(s) for a in t.args for s in subterms(a)
               if isinstance(s, App) and sig.level_of(s.fn) == level]
        return 1 + max(sub, default=0)

    found.sort(key=lambda t: (depth(t), t.fn, tuple(term_key(a) for a in t.args)))
    dmap = DefinitionMap(level)
    names: dict = {}

    def repl(t):
        def f(s):
            if isinstance(s, App) and s in names:
                return Const(names[s])
            return None
        return map_term(t, f)

    for t in found:
        pure = App(t.fn, tuple(repl(a) for a in t.args))
        if pure in names:
            continue
        name = supply.next("e")
        names[pure] = name
        dmap.entries.append(Definition(name, pure))
    purified = [with_level(c.map_terms(repl), sig) for c in simplified]
    return dmap, purified


def congruence_instances(dmap: DefinitionMap) -> list:
    """Con0: for same-head definitions, equal arguments force equal names."""
    out = []
    for fn, ds in dmap.by_head().items():
        for p, q in itertools.combinations(ds, 2):
            ant = tuple(Eq(a, b) for a, b in zip(p.term.args, q.term.args))
            out.append(Clause((), ant, (Eq(Const(p.name), Const(q.name)),)))
    return out


def con_count(dmap: DefinitionMap) -> int:
    return sum(len(ds) * (len(ds) - 1) // 2 for ds in dmap.by_head().values())


# ----------------------------------------------------------------- chain

@dataclass
class Reduction:
    clauses: list                     # final level-0 clause set
    base_axioms: list
    signature: Signature
    dstack: list = field(default_factory=list)   # DefinitionMaps, top level first
    ground_ok: bool = True
    aborted: Optional[str] = None
    counts: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.clauses) + len(self.base_axioms)


def _split_guarded(clauses, sig: Signature, supply: NameSupply, rename: bool):
    """Clausify clauses that still carry a formula guard."""
    plain, guarded = [], []
    for c in clauses:
        (guarded if c.guard is not None else plain).append(c)
    if not guarded:
        return plain, []
    res = clausify([clause_to_formula(c) for c in guarded], sig, supply, rename)
    return plain, res.clauses


def reduce_chain(ext_axioms, query, base_axioms, sig: Signature, supply: NameSupply,
                 array_mode: bool = False, no_separation: bool = False,
                 rename: bool = True, preprocess: bool = True) -> Reduction:
    """Reduce levels n..1 to a set of base clauses."""
    by_level: dict = {}
    for c in ext_axioms:
        by_level.setdefault(max(c.level, 1), []).append(c)
    top = max([sig.max_level()] + list(by_level) + [0])
    red = Reduction([], list(base_axioms), sig)
    G = [with_level(c, sig) for c in query]
    red.trace.append(f"We have {top} levels.")
    for i in range(top, 0, -1):
        K = by_level.pop(i, [])
        red.trace.append(f"K has {len(K)} members.")
        red.trace.extend(trace_clause(c) + f"  L: {c.level}" for c in K)
        if array_mode:
            terms = index_terms(K, G, sig)
            red.counts[f"index_terms_{i}"] = len(terms)
            red.trace.append(f"We have {len(terms)} index terms for minimal locality "
                             + ", ".join(str(t) for t in terms))
            inst = compute_array_instances(K, terms)
        else:
            store = extension_ground_terms(K + G, i, sig)
            red.counts[f"store_{i}"] = len(store)
            red.trace.append("Extension ground terms: " + ", ".join(str(t) for t in store))
            inst = compute_instances(K, store, i, sig)
        inst = [_simplify_clause(unpseudofy_clause(c)) for c in inst]
        red.counts[f"instances_{i}"] = len(inst)
        red.trace.append(f"K_G has {len(inst)} members.")
        red.trace.extend(trace_clause(c) + f"  L: {c.level}" for c in inst)
        loose = [c for c in inst if not c.is_ground]
        if loose:
            if i > 1:
                red.aborted = f"instances at level {i} are not ground"
                red.trace.append(red.aborted)
                red.clauses = G
                return red
            red.ground_ok = False
        if no_separation:
            red.clauses = inst + G
            for j in sorted(by_level, reverse=True):
                red.clauses += by_level[j]
            red.ground_ok = False
            red.trace.append("Stopping at K[G] without separation.")
            red.counts["total"] = red.total
            red.trace.append(f"Total number of clauses: {red.total}.")
            return red
        dmap, purified = purify(inst + G, i, sig, supply)
        red.dstack.append(dmap)
        red.counts[f"definitions_{i}"] = len(dmap)
        red.trace.append("We have the following definitions: ")
        red.trace.extend(trace_clause(d.clause()) for d in dmap.entries)
        con = congruence_instances(dmap)
        red.counts[f"con_{i}"] = len(con)
        red.trace.append("Replacing D by N0: ")
        red.trace.append(f"This yields {len(con)} clauses.")
        red.trace.extend(trace_clause(c) for c in con)
        new_g = [with_level(c, sig) for c in purified + con]
        plain, derived = _split_guarded(new_g, sig, supply, rename)
        G = []
        for c in plain + derived:
            if c.is_ground:
                G.append(c)
            elif c.level == 0:
                red.base_axioms.append(c)
            else:
                if preprocess:
                    c = linearize_clause(flatten_clause(c, sig), sig)
                by_level.setdefault(c.level, []).append(c)
        red.counts[f"query_{i}"] = len(G)
    red.clauses = G
    red.counts["total"] = red.total
    red.trace.append(f"Total number of clauses: {red.total}.")
    return red
