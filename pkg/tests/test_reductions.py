import random

import pytest
from hypothesis import given, settings, strategies as st

from abdux.abduction import is_explanation
from abdux.arbitrariness import degree, is_constrained
from abdux.core import Explanation, atom
from abdux.parser import CNF, QBF
from abdux.random_instances import all_clauses, all_cnfs, random_cnf, random_qbf
from abdux.reductions import (GENERATORS, ReductionError, allfalse_precondition, cnf_holds, gen_thm4_qbf,
                              gen_thm4_sat, gen_thm5_qbf, gen_thm5_sat, gen_thm6_sat, qbf_bruteforce,
                              sat_bruteforce, thm4_qbf_witness, thm5_qbf_witness)
from abdux.search import find_constrained
from abdux.semantics import classify, ground

CNF_SAT = CNF(2, ((1,), (2,)))
CNF_UNSAT = CNF(1, ((1,), (-1,)))
QBF_TRUE = QBF(2, (1,), (2,), ((1,), (-2,)))        # pick x1 true
QBF_FALSE = QBF(3, (1,), (2, 3), ((-2,),))           # forall y1 not y1 fails


def _template_rules(theory):
    """Rules that do not come from the formula encoding (those use fixed input predicates)."""
    inputs = {"pos", "ngtd", "in_X", "in_Y", "gate", "next", "next_C", "next_X", "next_Y",
              "f_X", "l_X", "f_Y", "l_Y", "f_C", "l_C", "tr", "p"}
    return [r for r in theory.rules if not (r.is_fact() and r.head.pred in inputs)]


@pytest.mark.parametrize("gen, formula, n_rules, n_ics", [
    (gen_thm4_sat, CNF_SAT, 12, 0),
    (gen_thm5_sat, CNF_SAT, 13, 0),
    (gen_thm6_sat, CNF_SAT, 7, 2),
    (gen_thm4_qbf, QBF_TRUE, 17, 0),
    (gen_thm5_qbf, QBF_TRUE, 27, 0),
])
def test_rule_counts(gen, formula, n_rules, n_ics):
    theory = gen(formula)[0]
    assert len(_template_rules(theory)) == n_rules
    assert len(theory.constraints) == n_ics


def test_guarded_variant_keeps_rule_count():
    assert len(_template_rules(gen_thm5_qbf(QBF_TRUE, guarded=True)[0])) == 27


def test_program_classes():
    def flags(theory):
        c = classify(ground(list(theory.rules), relevant=True))
        return c.stratified, c.non_recursive, c.horn

    assert flags(gen_thm4_sat(CNF_SAT)[0]) == (True, True, False)
    assert flags(gen_thm4_qbf(QBF_TRUE)[0]) == (True, True, False)
    s, _, h = flags(gen_thm5_sat(CNF_SAT)[0])
    assert s and h
    assert flags(gen_thm6_sat(CNF_SAT)[0]) == (True, True, True)
    assert flags(gen_thm5_qbf(QBF_TRUE)[0])[2]


def test_oracles():
    assert sat_bruteforce(CNF_SAT) and not sat_bruteforce(CNF_UNSAT)
    assert qbf_bruteforce(QBF_TRUE) and not qbf_bruteforce(QBF_FALSE)
    assert allfalse_precondition(QBF_FALSE)
    assert len(all_clauses(2)) == 8
    assert sum(1 for _ in all_cnfs(1, 2)) == 2 + 1


def test_preconditions():
    with pytest.raises(ReductionError, match="all-false"):
        gen_thm4_sat(CNF(1, ((-1,),)))
    with pytest.raises(ReductionError, match="at least one clause"):
        gen_thm5_sat(CNF(1, ()))
    with pytest.raises(ReductionError, match="empty"):
        gen_thm6_sat(CNF(1, ((),)))
    with pytest.raises(ReductionError):
        gen_thm4_qbf(QBF(2, (1,), (2,), ((2,),)))
    with pytest.raises(ReductionError, match="non-empty"):
        gen_thm5_qbf(QBF(1, (), (1,), ((-1,),)))


@pytest.mark.parametrize("gen", [gen_thm4_sat, gen_thm5_sat, gen_thm6_sat])
def test_sat_reductions_on_fixed_formulas(gen):
    for cnf in (CNF(2, ((1, 2),)), CNF(2, ((1,), (2,), (-1, -2))), CNF(1, ((1,), (-1,)))):
        theory, obs, u = gen(cnf)
        assert is_explanation(theory, obs, u)
        assert is_constrained(theory, obs, u) == (not sat_bruteforce(cnf))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_sat_reductions_random(seed):
    cnf = random_cnf(random.Random(seed))
    for name in ("thm4-sat", "thm5-sat", "thm6-sat"):
        if name == "thm4-sat" and cnf_holds(cnf.clauses, {v: False for v in range(1, cnf.num_vars + 1)}):
            continue
        theory, obs, u = GENERATORS[name](cnf)
        assert is_constrained(theory, obs, u) == (not sat_bruteforce(cnf)), name


def _admissible(rng, min_x=0):
    while True:
        q = random_qbf(rng, min_x=min_x)
        if allfalse_precondition(q):
            return q


@pytest.mark.parametrize("seed", range(6))
def test_thm4_qbf_small(seed):
    q = _admissible(random.Random(seed))
    theory, obs = gen_thm4_qbf(q)
    r = find_constrained(theory, obs, max_add=len(q.exists) + len(q.forall), max_del=0)
    assert r.found == qbf_bruteforce(q)


def test_thm4_qbf_witness():
    theory, obs = gen_thm4_qbf(QBF_TRUE)
    assert is_constrained(theory, obs, thm4_qbf_witness(QBF_TRUE, {1: True}))


def _thm5_counterexample():
    e = Explanation({atom("false_X(x1)"), atom("false_X(y1)"), atom("assign(y2,0)"), atom("fa(0)")})
    return e


def test_thm5_qbf_as_transcribed_admits_a_spurious_witness():
    assert not qbf_bruteforce(QBF_FALSE)
    theory, obs = gen_thm5_qbf(QBF_FALSE)
    e = _thm5_counterexample()
    assert is_explanation(theory, obs, e)
    assert degree(theory, obs, e) == 0
    assert find_constrained(theory, obs, max_add=4, max_del=0).found


def test_thm5_qbf_guarded_rejects_it():
    theory, obs = gen_thm5_qbf(QBF_FALSE, guarded=True)
    assert not is_explanation(theory, obs, _thm5_counterexample())
    assert not find_constrained(theory, obs, max_add=4, max_del=0).found


def test_thm5_qbf_guarded_true_instance():
    theory, obs = gen_thm5_qbf(QBF_TRUE, guarded=True)
    assert is_constrained(theory, obs, thm5_qbf_witness(QBF_TRUE, {1: True}))
    assert find_constrained(theory, obs, max_add=3, max_del=0).found


@pytest.mark.parametrize("seed", range(4))
def test_thm5_qbf_guarded_small(seed):
    q = _admissible(random.Random(seed), min_x=1)
    theory, obs = gen_thm5_qbf(q, guarded=True)
    r = find_constrained(theory, obs, max_add=len(q.exists) + len(q.forall) + 1, max_del=0)
    assert r.found == qbf_bruteforce(q)
