import pytest

from locred.core import (
    INT, REAL, App, Arith, Clause, Const, Eq, Ineq, NameSupply, Num, Signature, SortError,
    SymbolDecl, Var, free, infer_sorts, is_ground_term, show_term, simplify_ground_arith,
    substitute, subterms, term_key, with_level,
)
from locred.parser import parse_clause

c, d = Const("c"), Const("d")


def test_simplify_collects_offsets():
    t = Arith("-", Arith("+", Const("u"), Num(1)), Num(1))
    assert simplify_ground_arith(t) == Const("u")
    assert show_term(simplify_ground_arith(Arith("+", Arith("+", Const("u"), Num(1)), Num(1)))) == "u + _2"


def test_simplify_folds_numbers():
    assert simplify_ground_arith(Arith("+", Num(2), Num(3))) == Num(5)
    assert show_term(Num(-2)) == "(_0 - _2)"


def test_subterms_post_order():
    t = App("f", (App("g", (c,)),))
    assert list(subterms(t)) == [c, App("g", (c,)), t]


def test_term_key_orders_by_size_first():
    small, big = Const("z"), App("a", (c,))
    assert sorted([big, small], key=term_key) == [small, big]


def test_ground_check():
    assert is_ground_term(App("f", (c,)))
    assert not is_ground_term(App("f", (Var("x"),)))


def test_substitute_drops_bound_variable():
    cl = parse_clause("(FORALL x). x <= c --> f(x) = d")
    inst = substitute(cl, {"x": c})
    assert inst.vars == ()
    assert str(inst) == "c <= c --> f(c) = d"


def test_levels():
    sig = Signature((SymbolDecl("f", "ext", 1, 1), SymbolDecl("g", "ext", 1, 2)))
    cl = Clause((), (), (Eq(App("g", (App("f", (c,)),)), d),))
    assert with_level(cl, sig).level == 2


def test_name_supply_skips_taken():
    s = NameSupply({"e_1", "e_3"})
    assert [s.next("e"), s.next("e"), s.next("e")] == ["e_2", "e_4", "e_5"]


def test_sort_inference_mixes_int_and_real():
    sig = Signature((SymbolDecl("p", "ext", 1, 1, INT, REAL),))
    cl = Clause((), (), (Eq(App("p", (c,)), d),))
    s = infer_sorts(sig, [cl])
    assert s.of_const("d") == REAL and s.of_const("c") == INT


def test_sort_conflict_is_reported():
    sig = Signature((SymbolDecl("f", "ext", 1, 1, free(1), free(1)),
                     SymbolDecl("k", "const", 0, 0, None, INT)))
    cl = Clause((), (), (Eq(App("f", (Const("k"),)), c),))
    with pytest.raises(SortError):
        infer_sorts(sig, [cl])


def test_undeclared_function_sorts_are_exposed():
    sig = Signature((SymbolDecl("a", "const", 0, 0, None, REAL),))
    cl = Clause((), (Ineq("<", Const("a"), App("sk_1", (Const("a"),))),), ())
    s = infer_sorts(sig, [cl])
    assert s.functions["sk_1"] == ((REAL,), REAL)
