import random

import pytest
from hypothesis import given, settings, strategies as st

from abdux.core import Explanation, atom
from abdux.parser import (CNF, QBF, ParseError, format_dimacs, format_explanation, format_observation,
                          format_qdimacs, format_theory, parse_dimacs, parse_explanation, parse_observation,
                          parse_qdimacs, parse_theory)
from abdux.random_instances import random_cnf, random_qbf, random_stratified_theory

THEORY = """
% comment
p(X) :- q(X, Y), not r(Y).
q(a, b).
#ic :- p(a), not s(a).
#ic s(X) | r(X) :- p(X).
#abducible r/1.
r(c).
"""


def test_parse_theory_parts():
    t = parse_theory(THEORY)
    assert len(t.rules) == 3
    assert len(t.constraints) == 2
    assert t.abducibles == {("r", 1)}
    assert t.abducible_facts == {atom("r(c)")}
    assert t.constraints[1].head == (atom("s(X)"), atom("r(X)"))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_theory_round_trip(seed):
    t, _ = random_stratified_theory(random.Random(seed))
    back = parse_theory(format_theory(t))
    assert back.rules == t.rules
    assert back.constraints == t.constraints
    assert back.abducibles == t.abducibles


def test_observation_and_explanation_round_trip():
    t = parse_theory(THEORY)
    obs = parse_observation("p(a). s(a).", t)
    assert parse_observation(format_observation(obs), t) == obs
    e = Explanation({atom("r(b)"), atom("r(@0)")}, {atom("r(c)")})
    assert parse_explanation(format_explanation(e)) == e


@pytest.mark.parametrize("text, line, col", [
    ("p(X) :- not q(X).", 1, 1),
    ("p(a).\nq(a) :- p(a)\n", 3, 1),
    ("p(a).\n  p(a, b).", 2, 3),
    ("#abducible a/1.\na(X) :- b(X).", 2, 1),
    ("p(a) :- q(a) r.", 1, 14),
])
def test_theory_errors_carry_spans(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_theory(text, "t.abd")
    assert info.value.span.file == "t.abd"
    assert (info.value.span.line, info.value.span.col_start) == (line, col)


def test_observation_errors():
    t = parse_theory(THEORY)
    with pytest.raises(ParseError, match="not ground"):
        parse_observation("p(X).", t)
    with pytest.raises(ParseError, match="abducible"):
        parse_observation("r(a).", t)


def test_explanation_errors():
    with pytest.raises(ParseError, match="disjoint"):
        parse_explanation("#add r(a).\n#del r(a).")
    with pytest.raises(ParseError, match="#add or #del"):
        parse_explanation("r(a).")
    with pytest.raises(ParseError, match="not ground"):
        parse_explanation("#add r(X).")


def test_fresh_sigil_only_in_explanations():
    with pytest.raises(ParseError):
        parse_theory("p(@0).")


def test_dimacs():
    cnf = parse_dimacs("c demo\np cnf 3 2\n1 -2 0\n3 0\n")
    assert cnf == CNF(3, ((1, -2), (3,)))
    assert parse_dimacs(format_dimacs(cnf)) == cnf
    with pytest.raises(ParseError, match="out of range"):
        parse_dimacs("p cnf 1 1\n2 0\n")
    with pytest.raises(ParseError, match="announces"):
        parse_dimacs("p cnf 2 2\n1 0\n")
    with pytest.raises(ParseError, match="header"):
        parse_dimacs("1 0\n")


def test_qdimacs():
    q = parse_qdimacs("p cnf 3 2\ne 1 0\na 2 3 0\n1 2 0\n-3 0\n")
    assert q.exists == (1,) and q.forall == (2, 3)
    assert q.terms == ((1, 2), (-3,))
    assert parse_qdimacs(format_qdimacs(q)) == q
    with pytest.raises(ParseError, match="prefix"):
        parse_qdimacs("p cnf 2 1\na 1 0\ne 2 0\n1 0\n")
    with pytest.raises(ParseError, match="free"):
        parse_qdimacs("p cnf 3 1\ne 1 0\na 2 0\n3 0\n")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_formula_round_trips(seed):
    rng = random.Random(seed)
    cnf = random_cnf(rng)
    assert parse_dimacs(format_dimacs(cnf)) == cnf
    q = random_qbf(rng)
    assert parse_qdimacs(format_qdimacs(q)) == q
