from fractions import Fraction

import pytest

from locred import backend
from locred.backend import (
    ExtensionModel, ModelError, back_translate, emit_smtlib, interpret, parse_model, run_solver,
)
from locred.core import (
    REAL, App, Const, IntervalConstraint, Signature, SymbolDecl, pointer,
)
from locred.parser import parse_clause
from locred.reduce import Definition, DefinitionMap

from conftest import needs_solver


@pytest.mark.parametrize("raw, local, ground, want", [
    ("unsat", False, False, "unsat"),
    ("sat", True, True, "sat"),
    ("sat", False, True, "unknown"),
    ("sat", True, False, "unknown"),
    ("unknown", True, True, "unknown"),
])
def test_interpret_policy(raw, local, ground, want):
    assert interpret(raw, local, ground).status == want


def _solve(tmp_path, script):
    path = tmp_path / "t.smt2"
    path.write_text(script.text)
    return run_solver(path)


@needs_solver
def test_trivial_unsat(tmp_path):
    s = emit_smtlib([parse_clause("NOT(c = c)")], Signature())
    assert _solve(tmp_path, s).status == "unsat"


@needs_solver
def test_assert_false(tmp_path):
    path = tmp_path / "f.smt2"
    path.write_text("(assert false)\n(check-sat)\n")
    assert run_solver(path).status == "unsat"


def test_missing_solver(tmp_path):
    path = tmp_path / "f.smt2"
    path.write_text("(check-sat)\n")
    run = run_solver(path, "definitely-not-a-solver-binary")
    assert run.status == "unknown" and run.reason == "solver not found"


def test_interval_bounds_every_numeric_constant():
    sig = Signature(interval=IntervalConstraint("x", 0, False, 1, False))
    s = emit_smtlib([parse_clause("a <= b")], sig)
    for line in ("(assert (<= 0 a))", "(assert (<= a 1))", "(assert (<= 0 b))", "(assert (<= b 1))"):
        assert line in s.text


def test_script_is_deterministic():
    cls = [parse_clause("f(a) = b"), parse_clause("NOT(b <= c + _2)")]
    assert emit_smtlib(cls, Signature()).text == emit_smtlib(cls, Signature()).text


def test_numerals_follow_the_sort():
    sig = Signature((SymbolDecl("x", "const", 0, 0, None, REAL),))
    s = emit_smtlib([parse_clause("x = _5")], sig)
    assert "(= x 5.0)" in s.text and "QF_LRA" in s.text


def test_reserved_and_primed_names():
    s = emit_smtlib([parse_clause("abs(a') = b")], Signature())
    assert "(abs_u |a'|)" in s.text


def test_free_sorts_are_declared():
    sig = Signature((SymbolDecl("a", "const", 0, 0, None, pointer(1)),
                     SymbolDecl("b", "const", 0, 0, None, pointer(1))))
    s = emit_smtlib([parse_clause("NOT(a = b)")], sig)
    assert "(declare-sort Pointer 0)" in s.text and s.logic == "QF_UF"


def test_quantified_base_axiom_is_emitted_as_forall():
    s = emit_smtlib([parse_clause("c <= d")], Signature(),
                    base_axioms=[parse_clause("(FORALL x). x <= x + _1")])
    assert "(forall ((x Int))" in s.text and s.logic == "LIA"


Z3_MODEL = """sat
(
  (define-fun c () Int
    (- 3))
  (define-fun e_1 () Real
    (/ 1.0 2.0))
  (define-fun p () Pointer
    Pointer!val!0)
  (define-fun R ((x!0 Int)) Bool
    (ite (= x!0 2) true false))
)
"""


def test_model_reader():
    funcs = parse_model(Z3_MODEL)
    assert set(funcs) == {"c", "e_1", "p", "R"}
    values, _, _ = backend.base_model(Z3_MODEL, {})
    assert values["c"] == -3 and values["e_1"] == Fraction(1, 2) and values["p"] == "Pointer!val!0"
    assert backend.eval_sexpr(["R", "2"], {}, funcs) is True


def test_back_translation_builds_tables():
    sig = Signature((SymbolDecl("f", "ext", 1, 1), SymbolDecl("g", "ext", 1, 1)))
    dmap = DefinitionMap(1, [Definition("e_1", App("f", (Const("c0"),))),
                             Definition("e_2", App("g", (Const("c4"),))),
                             Definition("e_3", App("f", (Const("d1"),)))])
    values = {"c0": Fraction(0), "c4": Fraction(1), "d1": Fraction(5),
              "e_1": Fraction(2), "e_2": Fraction(1), "e_3": Fraction(0)}
    m = back_translate(values, {}, {}, [dmap], sig, {})
    assert {"f(0) = 2", "g(1) = 1", "f(5) = 0"} <= set(m.listing())
    assert m.satisfies(parse_clause("f(c0) = _2"))


def test_empty_definition_map_echoes_base_model():
    m = back_translate({"a": Fraction(1)}, {}, {}, [], Signature(), {})
    assert m.listing() == ["a = 1"]


def test_contradictory_entries_are_reported():
    sig = Signature((SymbolDecl("f", "ext", 1, 1),))
    dmap = DefinitionMap(1, [Definition("e_1", App("f", (Const("a"),))),
                             Definition("e_2", App("f", (Const("b"),)))])
    values = {"a": Fraction(0), "b": Fraction(0), "e_1": Fraction(1), "e_2": Fraction(2)}
    with pytest.raises(ModelError):
        back_translate(values, {}, {}, [dmap], sig, {})


def test_pointer_completion_goes_to_null():
    sig = Signature((SymbolDecl("next", "ext", 1, 1, pointer(1), pointer(1)),))
    m = ExtensionModel(sig, {"null": "P0", "a": "P1"}, {}, {"a": pointer(1), "null": pointer(1)})
    assert m.eval_term(App("next", (Const("a"),))) == "P0"
    assert "next(a) = null" in m.listing()
