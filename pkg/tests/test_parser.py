from pathlib import Path

import pytest

from locred.core import INT, And, Not, Arith, Const, Ineq, Num, Pred, Select, Var, pointer
from locred.parser import ParseError, parse_clause, parse_formula, parse_task, print_task

CORPUS = Path(__file__).parent / "corpus"
ALL_FILES = sorted(CORPUS.glob("*/*.loc"))


@pytest.mark.parametrize("path", ALL_FILES, ids=lambda p: f"{p.parent.name}/{p.stem}")
def test_round_trip(path):
    task = parse_task(path.read_text(encoding="utf-8"), strict=False)
    printed = print_task(task)
    again = parse_task(printed, strict=False)
    assert again == task
    assert print_task(again) == printed


def test_quantified_names_are_variables_and_others_constants():
    c = parse_clause("(FORALL i). l <= i --> a(i) = b(i)")
    assert c.vars == ("i",)
    assert c.antecedent == (Ineq("<=", Const("l"), Var("i")),)


def test_underscore_numerals_and_aliases():
    c = parse_clause("--> plus(k, _3) <= l")
    assert c.consequent == (Ineq("<=", Arith("+", Const("k"), Num(3)), Const("l")),)


def test_relations_use_brackets():
    c = parse_clause("(FORALL x). R[x, c]")
    assert c.consequent == (Pred("R", (Var("x"), Const("c"))),)


def test_write_read():
    c = parse_clause("write(a, u + _1, x)(i) = b(i)")
    assert isinstance(c.consequent[0].left, Select)


def test_augmented_clause_guard_is_negated():
    c = parse_clause("(FORALL i). {(FORALL j). j <= i} --> f(i) = c")
    assert c.guard is not None and str(c).startswith("(FORALL i). {(FORALL j).")


def test_declarations():
    t = parse_task("""Base_functions:={(+,2)}
Extension_functions:={(next, 1, 1, pointer), (p, 1, 2, int, real)}
Relations:={(<=, 2)}
Constants:={(a, pointer)}
Query := a = next(a);""")
    sig = t.signature
    assert sig.get("next").range == pointer(1)
    assert sig.get("p").level == 2 and sig.get("p").domain == INT
    assert sig.get("a").range == pointer(1)


def test_sections_in_any_order():
    t = parse_task("Query := f(c) = d;\nExtension_functions:={(f, 1)}\n")
    assert str(t.query[0]) == "f(c) = d"
    assert t.query[0].level == 1 and t.signature.get("f").level == 1


def test_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_task("Extension_functions:={(f, 1)}\nQuery := f(c) = ;\n")
    assert err.value.position.line == 2


def test_duplicate_declaration_rejected():
    with pytest.raises(ParseError):
        parse_task("Extension_functions:={(f, 1), (f, 1)}\nQuery := c = c;")


def test_formula_with_connectives():
    f = parse_formula("AND(x <= y, NOT(y <= x))", bound=("x", "y"))
    assert isinstance(f, And) and isinstance(f.args[1], Not)
