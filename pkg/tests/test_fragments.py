import pytest

from locred.fragments import POSITIVE_GUARDS, check_array_property, check_nullable, classify
from locred.parser import parse_clause, parse_task
from locred.preprocess import add_nullable_premises, split_disequalities

from conftest import corpus_text

K_PRIME = [
    "(FORALL i, j). _0 <= i, i <= j, j <= n - _1 --> c(i) <= c(j)",
    "(FORALL i, j). _0 <= i, i <= j, j <= n - _1 --> e(i) <= e(j)",
    "(FORALL i). i <= l - _1 --> b(i) = c(i)",
    "(FORALL i). l + _1 <= i --> b(i) = c(i)",
    "(FORALL i). i <= k - _1 --> a(i) = b(i)",
    "(FORALL i). k + _1 <= i --> a(i) = b(i)",
    "(FORALL i). i <= l - _1 --> d(i) = e(i)",
    "(FORALL i). l + _1 <= i --> d(i) = e(i)",
    "(FORALL i). i <= k - _1 --> a(i) = d(i)",
    "(FORALL i). k + _1 <= i --> a(i) = d(i)",
]


@pytest.fixture(scope="module")
def double_insert():
    return parse_task(corpus_text("listings", "double_insert"))


@pytest.mark.parametrize("text", K_PRIME)
def test_k_prime_is_in_the_array_property_fragment(double_insert, text):
    assert check_array_property(parse_clause(text), double_insert.signature)


def test_disequality_forms_are_rejected(double_insert):
    sig = double_insert.signature
    guarded = [c for c in double_insert.clauses if len(c.vars) == 1]
    assert len(guarded) == 4
    for c in guarded:
        chk = check_array_property(c, sig)
        assert not chk and chk.reason == POSITIVE_GUARDS


def test_splitting_produces_k_prime(double_insert):
    out = split_disequalities(list(double_insert.clauses), double_insert.signature)
    assert sorted(map(str, out)) == sorted(map(str, (parse_clause(t) for t in K_PRIME)))


def test_nested_reads_are_rejected(double_insert):
    c = parse_clause("(FORALL i). l <= i --> a(b(i)) = c(i)")
    assert check_array_property(c, double_insert.signature).reason == "no nested array reads allowed"


def test_unshielded_variable_in_value_constraint(double_insert):
    c = parse_clause("(FORALL i). l <= i --> a(i) = i")
    assert not check_array_property(c, double_insert.signature)


@pytest.mark.parametrize("name", ["pointers_real", "pointers_scalar", "pointer_model"])
def test_pointer_axioms_become_nullable(name):
    task = parse_task(corpus_text("listings", name))
    sig = task.signature
    assert not any(check_nullable(c, sig) for c in task.clauses)
    fixed = add_nullable_premises(list(task.clauses), sig)
    assert all(check_nullable(c, sig) for c in fixed)


def test_pointer_inequality_is_not_nullable():
    task = parse_task(corpus_text("listings", "pointer_model"))
    c = parse_clause("(FORALL p). --> p = null, next(p) = null, next(p) <= p")
    assert not check_nullable(c, task.signature)


def test_classify_reports_locality(double_insert):
    sig = double_insert.signature
    rep = classify([parse_clause(t) for t in K_PRIME], sig, arrays=True, pointers=False)
    assert rep.all_local and rep.kinds == ["apf"] * 10
    rep = classify(list(double_insert.clauses), sig, arrays=True, pointers=False)
    assert not rep.all_local


def test_definitional_shape_is_advisory_only():
    sig = parse_task("Extension_functions:={(f, 1)}\nQuery := c = c;").signature
    rep = classify([parse_clause("(FORALL x). x <= c --> f(x) = c")], sig, False, False)
    assert rep.kinds == ["definitional"] and not rep.all_local
