"""Syntactic recognizers for extension axioms known to be local."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    App, Arith, Clause, Const, Eq, Ineq, Num, Pred, Signature, Var,
    atom_terms, atom_vars, is_ground_term, subterms,
)
from .preprocess import _has_extension, null_name, pointer_arguments


@dataclass(frozen=True)
class Check:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


POSITIVE_GUARDS = "index guards must be positive!"


def _linear_ground(t) -> bool:
    if not is_ground_term(t):
        return False
    for s in subterms(t):
        if isinstance(s, Arith) and s.op in ("*", "/"):
            if not (isinstance(s.left, Num) or isinstance(s.right, Num)):
                return False
    return True


def _index_side_ok(t, sig) -> bool:
    if isinstance(t, Var):
        return True
    return not _has_extension(t, sig) and _linear_ground(t)


def _value_term(t, sig, bound: set) -> Optional[str]:
    """Check shielding and flatness of one value-restriction term."""
    if isinstance(t, Var):
        return f"variable {t.name} occurs outside an array read"
    if isinstance(t, App) and sig.is_extension(t.fn):
        for a in t.args:
            if isinstance(a, Var):
                continue
            if _has_extension(a, sig):
                return "no nested array reads allowed"
            if not is_ground_term(a):
                return "array read arguments must be variables or ground terms"
        return None
    if isinstance(t, (App, Arith)):
        kids = t.args if isinstance(t, App) else (t.left, t.right)
        for k in kids:
            r = _value_term(k, sig, bound)
            if r:
                return r
    return None


def check_array_property(c: Clause, sig: Signature) -> Check:
    """forall x. index_guard(x) -> value_restriction(x)?"""
    if c.guard is not None:
        return Check(False, "augmented clauses are outside the array property fragment")
    vs = set(c.vars)
    for a in c.antecedent:
        if any(_has_extension(t, sig) for t in atom_terms(a)):
            for t in atom_terms(a):
                r = _value_term(t, sig, vs)
                if r:
                    return Check(False, r)
        elif atom_vars(a):
            if isinstance(a, Pred):
                return Check(False, f"relation {a.name} in an index guard")
            if not all(_index_side_ok(t, sig) for t in atom_terms(a)):
                return Check(False, "index guard terms must be variables or ground linear terms")
    for a in c.consequent:
        if any(_has_extension(t, sig) for t in atom_terms(a)):
            for t in atom_terms(a):
                r = _value_term(t, sig, vs)
                if r:
                    return Check(False, r)
        elif atom_vars(a):
            return Check(False, POSITIVE_GUARDS)
    return Check(True)


def _pointer_sorted(t, sig) -> bool:
    if isinstance(t, App):
        d = sig.get(t.fn)
        return d is not None and d.range is not None and d.range.kind == "pointer"
    if isinstance(t, Const):
        d = sig.get(t.name)
        if d is not None and d.range is not None:
            return d.range.kind == "pointer"
        return t.name.startswith("null")
    return False


def check_nullable(c: Clause, sig: Signature) -> Check:
    """Every pointer term below a function must be guarded by t = null."""
    if c.guard is not None:
        return Check(False, "augmented clauses are outside the pointer fragment")
    for a in c.atoms():
        if isinstance(a, (Ineq, Pred)) and any(_pointer_sorted(t, sig) for t in atom_terms(a)):
            return Check(False, "pointer terms may only occur in equalities")
    for t, srt in pointer_arguments(c, sig):
        null = Const(null_name(srt))
        if Eq(t, null) not in c.consequent and Eq(null, t) not in c.consequent:
            return Check(False, f"missing disjunct {t} = {null.name}")
    return Check(True)


def is_definitional_candidate(c: Clause, sig: Signature) -> bool:
    """phi(x) -> f(x) = t(x) with t free of symbols of f's level.

    Advisory only: mutual exclusivity of the guards is not checked, so a
    positive answer does not count as a locality guarantee.
    """
    if c.guard is not None or len(c.consequent) != 1 or not isinstance(c.consequent[0], Eq):
        return False
    eq = c.consequent[0]
    for lhs, rhs in ((eq.left, eq.right), (eq.right, eq.left)):
        if not (isinstance(lhs, App) and sig.is_extension(lhs.fn)):
            continue
        lvl = sig.level_of(lhs.fn)
        if not all(isinstance(a, Var) for a in lhs.args):
            continue
        if len({a.name for a in lhs.args}) != len(lhs.args):
            continue
        clean = lambda t: not any(isinstance(s, App) and sig.level_of(s.fn) >= lvl
                                  for s in subterms(t))
        if clean(rhs) and all(clean(t) for a in c.antecedent for t in atom_terms(a)):
            return True
    return False


@dataclass
class FragmentReport:
    kinds: list = field(default_factory=list)     # per clause: apf | pointer | definitional | none
    reasons: list = field(default_factory=list)
    all_local: bool = True
    log: list = field(default_factory=list)


def classify(clauses, sig: Signature, arrays: bool, pointers: bool) -> FragmentReport:
    rep = FragmentReport()
    for c in clauses:
        kind, reason = "none", ""
        if arrays:
            chk = check_array_property(c, sig)
            rep.log.append(f"Checking APF for clause {c} ---> {'true' if chk else 'false'}")
            if chk:
                kind = "apf"
            else:
                reason = chk.reason
        if kind == "none" and pointers:
            chk = check_nullable(c, sig)
            rep.log.append(f"Checking nullable for clause {c} ---> {'true' if chk else 'false'}")
            if chk:
                kind = "pointer"
            else:
                reason = reason or chk.reason
        if kind == "none" and is_definitional_candidate(c, sig):
            kind = "definitional"
        rep.kinds.append(kind)
        rep.reasons.append(reason)
    rep.all_local = all(k in ("apf", "pointer") for k in rep.kinds)
    if arrays and rep.all_local and clauses:
        rep.log.append("The problem is in APF")
    return rep
