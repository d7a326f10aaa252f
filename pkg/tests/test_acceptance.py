"""Acceptance criteria, one test each. Every test prints a PASS/FAIL line.

Run with pytest, or directly: python tests/test_acceptance.py
"""
from __future__ import annotations

import random
import sys
import time
from pathlib import Path

import pytest
from hypothesis import given, settings

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from locred.clausify import clausify  # noqa: E402
from locred.core import NameSupply, substitute, with_level  # noqa: E402
from locred.fragments import POSITIVE_GUARDS, check_array_property, check_nullable  # noqa: E402
from locred.parser import parse_clause, parse_task, print_task  # noqa: E402
from locred.pipeline import Options, run  # noqa: E402
from locred.preprocess import (  # noqa: E402
    add_nullable_premises, flatten_clause, linearize_clause, split_disequalities,
)
from locred.reduce import (  # noqa: E402
    Definition, DefinitionMap, _simplify_clause, congruence_instances, purify,
)

CORPUS = HERE / "corpus"


_capsys = None


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    global _capsys
    _capsys = capsys
    yield
    _capsys = None


def report(n: int, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    with _capsys.disabled():
        print("\n" + line, flush=True)


def _run(tmp: Path, kind: str, name: str, opts: Options):
    src = tmp / f"{name}.loc"
    src.write_text((CORPUS / kind / f"{name}.loc").read_text(encoding="utf-8"), encoding="utf-8")
    start = time.perf_counter()
    task = parse_task(src.read_text(encoding="utf-8"))
    result = run(task, opts, src)
    return result, time.perf_counter() - start


# ------------------------------------------------------------------- 1

def test_criterion_1_golden_trace(tmp_path):
    res, secs = _run(tmp_path, "problems", "arrays_from_book", Options(preprocess=True))
    c = res.reduction.counts
    got = (c["index_terms_1"], c["instances_1"], c["definitions_1"], c["con_1"],
           res.total_clauses, res.verdict.status)
    want = (5, 75, 15, 30, 109, "unsat")
    ok = got == want and secs < 2.0
    report(1, ok, f"index terms/K_G/definitions/Con/total/verdict = {got}, {secs:.2f}s")
    assert got == want
    assert secs < 2.0


# ------------------------------------------------------------------- 2

TABLE = [
    # file, options, verdict, clause count from the table
    ("mono", Options(), "unsat", 20),
    ("mono_sat", Options(is_local=True), "sat", 20),
    ("array_insert", Options(preprocess=True), "unsat", 113),
    ("array_insert_sat", Options(preprocess=True, is_local=True), "sat", 111),
    ("update_priorities", Options(preprocess=True), "unsat", 45),
    ("double_insert", Options(arrays=True), "unsat", 791),
]


def test_criterion_2_corpus_statuses(tmp_path):
    rows, ok = [], True
    for name, opts, verdict, ncl in TABLE:
        res, secs = _run(tmp_path, "problems", name, opts)
        total = res.total_clauses
        good = (res.verdict.status == verdict and abs(total - ncl) <= 0.25 * ncl and secs < 5.0)
        ok &= good
        rows.append(f"{name}: {res.verdict.status}/{total} (table {verdict}/{ncl}, {secs:.2f}s)"
                    + ("" if good else " MISMATCH"))
    report(2, ok, "; ".join(rows))
    assert ok, rows


# ------------------------------------------------------------------- 3

def test_criterion_3_models(tmp_path):
    res, _ = _run(tmp_path, "problems", "mono_sat", Options(is_local=True))
    task = parse_task((CORPUS / "problems" / "mono_sat.loc").read_text(encoding="utf-8"))
    model = res.verdict.model
    sat_ok = res.verdict.status == "sat" and model is not None and \
        all(model.satisfies(c) for c in task.query)
    res2, _ = _run(tmp_path, "problems", "mono_sat", Options(is_local=False))
    unknown_ok = res2.verdict.status == "unknown"
    report(3, sat_ok and unknown_ok,
           f"mono.sat -> {res.verdict.status}, model satisfies query: {sat_ok}; "
           f"-isLocal false -> {res2.verdict.status}")
    assert sat_ok and unknown_ok


# ------------------------------------------------------------------- 4

def test_criterion_4_enumeration_oracle():
    from oracle import find_model, random_problem
    rng = random.Random(7)
    mismatches, counts = 0, {"sat": 0, "unsat": 0}
    for _ in range(200):
        p = random_problem(rng)
        want = "sat" if find_model(p) else "unsat"
        counts[want] += 1
        got = run(parse_task(p.render()), Options(preprocess=True, is_local=True)).verdict.status
        mismatches += got != want
    report(4, mismatches == 0, f"200 problems ({counts['sat']} sat, {counts['unsat']} unsat), "
                               f"{mismatches} mismatches")
    assert mismatches == 0


# ------------------------------------------------------------------- 5

def _idempotence() -> bool:
    from strategies import SIG, clauses

    @settings(max_examples=200, deadline=None, database=None)
    @given(clauses())
    def check(c):
        f = flatten_clause(c, SIG)
        assert flatten_clause(f, SIG) == f
        lin = linearize_clause(f, SIG)
        assert linearize_clause(lin, SIG) == lin

    try:
        check()
        return True
    except AssertionError:
        return False


def _con_law() -> bool:
    from locred.core import App, Const
    rng = random.Random(3)
    for _ in range(100):
        entries, seen = [], set()
        for k in range(rng.randint(0, 10)):
            fn = rng.choice("fgh")
            args = tuple(Const(rng.choice("abc")) for _ in range("fgh".index(fn) + 1))
            if (fn, args) not in seen:
                seen.add((fn, args))
                entries.append(Definition(f"e_{k + 1}", App(fn, args)))
        per = {}
        for d in entries:
            per[d.term.fn] = per.get(d.term.fn, 0) + 1
        if len(congruence_instances(DefinitionMap(1, entries))) != \
                sum(k * (k - 1) // 2 for k in per.values()):
            return False
    return True


def _purify_round_trip() -> bool:
    from locred.core import Const, map_term
    from strategies import SIG, clauses

    @settings(max_examples=150, deadline=None, database=None)
    @given(clauses())
    def check(c):
        g = _simplify_clause(substitute(c, {v: Const("c") for v in c.vars}))
        for level in (2, 1):
            dmap, (out,) = purify([g], level, SIG, NameSupply({"c", "d"}))
            table = {d.name: d.term for d in dmap.entries}

            def back(t):
                return map_term(t, lambda s: back(table[s.name])
                                if isinstance(s, Const) and s.name in table else None)
            assert with_level(out.map_terms(back), SIG) == with_level(g, SIG)

    try:
        check()
        return True
    except AssertionError:
        return False


def _parser_round_trip() -> tuple:
    files = sorted(CORPUS.glob("*/*.loc"))
    bad = []
    for f in files:
        t = parse_task(f.read_text(encoding="utf-8"), strict=False)
        if parse_task(print_task(t), strict=False) != t:
            bad.append(f.name)
    return len(files), bad


def test_criterion_5_pass_invariants():
    idem = _idempotence()
    law = _con_law()
    pur = _purify_round_trip()
    n, bad = _parser_round_trip()
    ok = idem and law and pur and not bad
    report(5, ok, f"flatten/linearize idempotent: {idem}; Con count law on 100 maps: {law}; "
                  f"purify round-trip: {pur}; parser round-trip {n - len(bad)}/{n} files")
    assert ok


# ------------------------------------------------------------------- 6

def test_criterion_6_continuity_clausification():
    task = parse_task((CORPUS / "listings" / "cnf.loc").read_text(encoding="utf-8"), strict=False)
    res = clausify(task.formulas, task.signature, NameSupply(task.used_names()))
    n = len(res.clauses)
    report(6, n == 2, f"{n} clauses")
    assert n == 2


# ------------------------------------------------------------------- 7

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


def test_criterion_7_fragment_recognizers():
    arrays = parse_task((CORPUS / "listings" / "double_insert.loc").read_text(encoding="utf-8"))
    sig = arrays.signature
    kprime = [parse_clause(t) for t in K_PRIME]
    apf = sum(bool(check_array_property(c, sig)) for c in kprime)
    diseq = [c for c in arrays.clauses if len(c.vars) == 1]
    rejected = sum(check_array_property(c, sig).reason == POSITIVE_GUARDS for c in diseq)
    split_ok = sorted(map(str, split_disequalities(list(arrays.clauses), sig))) == \
        sorted(map(str, kprime))
    ptr = parse_task((CORPUS / "listings" / "pointers_real.loc").read_text(encoding="utf-8"))
    before = sum(bool(check_nullable(c, ptr.signature)) for c in ptr.clauses)
    after = sum(bool(check_nullable(c, ptr.signature))
                for c in add_nullable_premises(list(ptr.clauses), ptr.signature))
    n = len(ptr.clauses)
    ok = apf == 10 and rejected == len(diseq) == 4 and split_ok and before == 0 and after == n
    report(7, ok, f"K' in APF {apf}/10; i=l forms rejected {rejected}/{len(diseq)}; "
                  f"splitting yields K': {split_ok}; nullable before {before}/{n}, after {after}/{n}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
