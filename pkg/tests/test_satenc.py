import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from dlsat.concepts import And, Atom, Exists, Forall, Not, Or, count_full_existentials, subconcepts
from dlsat.satenc import (
    CnfFormula, TraceNode, encode_trace_cnf, evaluate_cnf, export_dimacs, parse_dimacs, solve_cnf,
)
from dlsat.syntax import parse_concept
from dlsat.tableau import decide_alc

from conftest import concepts

A, B = Atom("A"), Atom("B")


def truth_table_sat(num_vars, clauses):
    for bits in itertools.product((False, True), repeat=num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in cl) for cl in clauses):
            return True
    return False


def test_encode_examples():
    f = encode_trace_cnf(And(A, Not(A)))
    assert solve_cnf(f) is None
    assert f.num_vars == 3
    assert sorted(map(len, f.clauses)) == [1, 2, 2, 2]
    f = encode_trace_cnf(Or(A, B))
    assert solve_cnf(f) is not None
    assert f.trace_nodes() == [TraceNode()]
    f = encode_trace_cnf(And(Exists("R", A), Forall("R", Not(A))))
    assert solve_cnf(f) is None
    assert [str(n) for n in f.trace_nodes()] == ["e", "e/1"]


def test_encode_rejects_non_nnf():
    with pytest.raises(ValueError):
        encode_trace_cnf(Not(And(A, B)))


def test_limited_existential_successors():
    assert solve_cnf(encode_trace_cnf(parse_concept("some r. top & only r. bot"))) is None
    f = encode_trace_cnf(parse_concept("A | some r. top"))
    assert f.num_vars <= len(subconcepts(parse_concept("A | some r. top")))


def test_formula_invariants():
    c = parse_concept("some r. (A | some s. B) & only r. !A & some s. top & (B | !B)")
    f = encode_trace_cnf(c)
    for clause in f.clauses:
        assert clause and len(set(clause)) == len(clause)
        assert all(0 < abs(l) <= f.num_vars for l in clause)
    assert set(f.var_meaning) == set(range(1, f.num_vars + 1))
    k = count_full_existentials(c)
    for node in f.trace_nodes():
        assert len(node.id) <= k + 1
    assert f.num_vars <= len(f.trace_nodes()) * len(subconcepts(c))


def test_solve_examples():
    assert solve_cnf(CnfFormula(1, [(1,), (-1,)])) is None
    assert solve_cnf(CnfFormula(2, [(1, 2), (-1,)])) == {1: False, 2: True}
    assert solve_cnf(CnfFormula(2, [])) == {1: True, 2: True}
    assert solve_cnf(CnfFormula(0, [])) == {}
    assert solve_cnf(CnfFormula(1, [()])) is None


def test_dimacs_examples():
    text = export_dimacs(CnfFormula(2, [(1, -2)]))
    assert "p cnf 2 1" in text and "1 -2 0" in text
    assert export_dimacs(CnfFormula(0, [])).strip() == "p cnf 0 0"


def test_dimacs_comments_come_first():
    f = encode_trace_cnf(parse_concept("some r. A & only r. !A"))
    lines = export_dimacs(f).splitlines()
    header = next(i for i, l in enumerate(lines) if l.startswith("p "))
    assert all(l.startswith("c ") for l in lines[:header])
    assert len(lines[:header]) == f.num_vars
    assert lines[0] == "c 1 e only r. !A"


def test_dimacs_round_trip_on_corpus():
    from dlsat.generate import random_concept
    for i in range(100):
        c = random_concept(random.Random(f"dimacs:{i}"), "ABC", "rs", 30, 3)
        f = encode_trace_cnf(c)
        g = parse_dimacs(export_dimacs(f))
        assert (g.num_vars, g.clauses) == (f.num_vars, f.clauses)
        assert (solve_cnf(g) is None) == (solve_cnf(f) is None)


def test_parse_dimacs_errors():
    with pytest.raises(ValueError):
        parse_dimacs("1 2 0\n")
    with pytest.raises(ValueError):
        parse_dimacs("p dnf 1 1\n1 0\n")
    assert parse_dimacs("p cnf 2 1\n1\n-2 0\n").clauses == [(1, -2)]


clause_sets = st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.lists(st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v])),
                      min_size=1, max_size=4, unique=True), max_size=25)))


@settings(max_examples=300)
@given(clause_sets)
def test_dpll_matches_truth_table(data):
    n, clauses = data
    f = CnfFormula(n, [tuple(c) for c in clauses])
    result = solve_cnf(f)
    assert (result is not None) == truth_table_sat(n, clauses)
    if result is not None:
        assert evaluate_cnf(f, result)


@settings(max_examples=150, deadline=None)
@given(concepts(max_leaves=14, nnf_only=True))
def test_encoding_is_equisatisfiable(c):
    assert (solve_cnf(encode_trace_cnf(c)) is not None) == decide_alc(c).satisfiable


@pytest.mark.xfail(strict=True, reason="limited existentials need successor nodes, so a "
                   "sound encoding can exceed |subconcepts| variables when k = 0")
def test_k0_size_bound_with_shared_limited_successors():
    c = parse_concept("some r. top & some s. top & only r. ((A | B) & (!A | !B))"
                      " & only s. ((A | B) & (!A | !B))")
    assert count_full_existentials(c) == 0
    f = encode_trace_cnf(c)
    assert (solve_cnf(f) is not None) == decide_alc(c).satisfiable
    assert f.num_vars <= len(subconcepts(c))
