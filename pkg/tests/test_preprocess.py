from hypothesis import given, settings

from locred.core import (
    App, NameSupply, Signature, SymbolDecl, Var, is_ground_term, pointer,
    subterms, trace_clause,
)
from locred.parser import parse_clause, parse_task
from locred.preprocess import (
    add_nullable_premises, eliminate_writes, flatten_clause, flatten_query, linearize_clause,
    split_disequalities, unpseudofy_clause,
)

from strategies import SIG, clauses


@settings(max_examples=200, deadline=None)
@given(clauses())
def test_flatten_is_idempotent(c):
    once = flatten_clause(c, SIG)
    assert flatten_clause(once, SIG) == once


@settings(max_examples=200, deadline=None)
@given(clauses())
def test_linearize_is_idempotent(c):
    once = linearize_clause(flatten_clause(c, SIG), SIG)
    assert linearize_clause(once, SIG) == once


@settings(max_examples=200, deadline=None)
@given(clauses())
def test_flat_clauses_have_simple_arguments(c):
    out = flatten_clause(c, SIG)
    for t in out.terms():
        for s in subterms(t):
            if isinstance(s, App):
                for a in s.args:
                    assert isinstance(a, Var) or is_ground_term(a)


SIG_FA = Signature((SymbolDecl("a", "ext", 1, 1), SymbolDecl("b", "ext", 1, 1)))


def test_flatten_names_shared_argument_once():
    c = parse_clause("(FORALL i). a(i + _1) <= b(i + _1)")
    assert trace_clause(flatten_clause(c, SIG_FA)) == "[i, j] j = i + _1 ---> a(j) <= b(j)"


def test_linearize_repeated_variable():
    c = parse_clause("(FORALL i). a(i) = b(i)")
    assert trace_clause(linearize_clause(c, SIG_FA, 1)) == "[i, x_1] x_1 = i ---> a(i) = b(x_1)"


def test_linearize_only_touches_its_own_level():
    sig = Signature((SymbolDecl("a", "ext", 1, 1), SymbolDecl("p", "ext", 1, 2)))
    c = parse_clause("(FORALL i). p(i) = a(i)")
    assert linearize_clause(c, sig, 2) == c


def test_disequality_split_below_first():
    c = parse_clause("(FORALL i). --> i = l, b(i) = c(i)")
    out = split_disequalities([c], SIG_FA)
    assert [trace_clause(x) for x in out] == [
        "[i] i <= l - _1 ---> b(i) = c(i)",
        "[i] l + _1 <= i ---> b(i) = c(i)",
    ]


def test_unpseudofy_solves_offsets():
    c = parse_clause("(FORALL i, j). j = i + _1, m = j --> a(i) = b(j)")
    assert trace_clause(unpseudofy_clause(c)) == "[] ---> a(m - _1) = b(m)"


def test_write_elimination():
    task = parse_task(
        "Extension_functions:={(a, 1), (b, 1)}\nQuery := NOT(write(a, k, x)(m) = b(m));")
    supply = NameSupply(task.used_names())
    we = eliminate_writes([], list(task.query), task.signature, supply)
    assert [trace_clause(c) for c in we.query] == ["[] a_w1(m) = b(m) --->"]
    assert [trace_clause(c) for c in we.ground_axioms] == ["[] ---> a_w1(k) = x"]
    assert [trace_clause(c) for c in we.axioms] == ["[i] ---> i = k, a_w1(i) = a(i)"]


def test_nested_writes_get_distinct_names():
    task = parse_task("Extension_functions:={(a, 1)}\n"
                      "Query := write(write(a, k, w), l, x)(m) = w;")
    we = eliminate_writes([], list(task.query), task.signature, NameSupply(task.used_names()))
    assert sorted(d.name for d in we.decls) == ["a_w1", "a_w2"]


def test_flatten_query_introduces_constants():
    sig = Signature((SymbolDecl("f", "ext", 1, 1),))
    q = [parse_clause("f(f(c)) = d")]
    out = flatten_query(q, sig, NameSupply({"c", "d", "f"}))
    assert [str(c) for c in out] == ["f(qc_1) = d", "qc_1 = f(c)"]


POINTER_SIG = Signature((
    SymbolDecl("next", "ext", 1, 1, pointer(1), pointer(1)),
    SymbolDecl("prev", "ext", 1, 1, pointer(1), pointer(1)),
))


def test_nullable_premises_innermost_first():
    c = parse_clause("(FORALL p). prev(next(p)) = p")
    out = add_nullable_premises([c], POINTER_SIG)[0]
    assert str(out) == "(FORALL p). --> p = null, next(p) = null, prev(next(p)) = p"
    assert add_nullable_premises([out], POINTER_SIG)[0] == out
