import itertools
import random

import pytest
from hypothesis import assume, given, settings, strategies as st

import abdux.search as search
from abdux.abduction import is_explanation
from abdux.arbitrariness import is_constrained
from abdux.core import CapExceeded, Explanation, atom, constants_of, is_fresh
from abdux.parser import parse_theory
from abdux.random_instances import (TheoryShape, horn_chain_theory, random_observation,
                                    random_stratified_theory)
from abdux.search import (ClassMismatch, SearchStats, add_universe, enumerate_explanations, filter_card_minimal,
                          filter_subset_minimal, find_constrained, find_constrained_tractable, iter_constrained,
                          proof_leaf_bound, rank_by_arbitrariness)

from conftest import load, load_expl

seeds = st.integers(0, 10**6)
SMALL = TheoryShape(max_preds=5, max_consts=3, max_rules=5)


def _instance(seed, horn=False):
    rng = random.Random(seed)
    theory, consts = random_stratified_theory(rng, SMALL, horn=horn)
    return theory, random_observation(rng, theory, consts)


def _brute(theory, obs, max_add, max_del, with_fresh=0):
    adds = add_universe(theory, obs, with_fresh)
    dels = sorted(theory.abducible_facts)
    out = []
    for i in range(max_add + 1):
        for e in itertools.combinations(adds, i):
            for j in range(max_del + 1):
                for f in itertools.combinations(dels, j):
                    if set(e) & set(f):
                        continue
                    x = Explanation(frozenset(e), frozenset(f))
                    if is_explanation(theory, obs, x):
                        out.append(x)
    return sorted(out, key=Explanation.sort_key)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_enumeration_is_complete_and_ordered(seed):
    theory, obs = _instance(seed)
    assume(len(add_universe(theory, obs)) <= 12)
    got = list(enumerate_explanations(theory, obs, max_add=2, max_del=1))
    assert got == _brute(theory, obs, 2, 1)


def test_ex6_stream():
    theory, obs = load("ex6")
    got = list(enumerate_explanations(theory, obs, max_add=1, max_del=1))
    assert got[:2] == [load_expl("ex6_d1"), load_expl("ex6_d2")]
    assert load_expl("ex6_d3") in got
    assert all(a.sort_key() <= b.sort_key() for a, b in zip(got, got[1:]))


def test_with_fresh_adds_canonical_constants():
    theory, obs = load("ex6")
    got = list(enumerate_explanations(theory, obs, max_add=1, max_del=0, with_fresh=1))
    assert got == [Explanation({atom("p(@0)")})]


def test_candidate_cap():
    theory, obs = load("ex7")
    with pytest.raises(CapExceeded):
        list(enumerate_explanations(theory, obs, max_add=3, max_del=1, candidate_cap=10))


def test_stats_are_filled():
    theory, obs = load("ex6")
    stats = SearchStats()
    list(enumerate_explanations(theory, obs, max_add=1, max_del=1, stats=stats))
    assert stats.candidates_checked > 0 and stats.time_ms >= 0


def test_find_constrained_examples():
    theory, obs = load("ex6")
    assert find_constrained(theory, obs).explanation == load_expl("ex6_d1")
    theory, obs = load("ex7")
    assert find_constrained(theory, obs, max_add=3, max_del=0).explanation == load_expl("ex7_d")
    theory, obs = load("breach")
    r = find_constrained(theory, obs, max_add=2, max_del=0)
    assert r.explanation in (load_expl("breach_e_tom"), load_expl("breach_e_dan"))


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_find_constrained_is_first_constrained_in_stream(seed):
    theory, obs = _instance(seed)
    assume(len(add_universe(theory, obs)) <= 12)
    r = find_constrained(theory, obs, max_add=2, max_del=1)
    first = next(iter_constrained(theory, obs, max_add=2, max_del=1), None)
    if r.found:
        assert is_constrained(theory, obs, r.explanation)
        assert constants_of(r.explanation) <= constants_of(theory, obs)
    assert (first is None) == (not r.found)
    if first is not None:
        assert r.explanation == first


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_support_path_matches_generic_path(seed):
    theory, obs = _instance(seed, horn=True)
    assume(len(add_universe(theory, obs)) <= 14)
    fast = find_constrained(theory, obs, max_add=3, max_del=1)
    original = search._Space.__init__

    def no_monotone(self, *args, **kwargs):
        original(self, *args, **kwargs)
        self.monotone = False

    search._Space.__init__ = no_monotone
    try:
        slow = find_constrained(theory, obs, max_add=3, max_del=1)
    finally:
        search._Space.__init__ = original
    assert fast.explanation == slow.explanation


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_card_minimal_within_subset_minimal(seed):
    theory, obs = _instance(seed)
    assume(len(add_universe(theory, obs)) <= 10)
    expls = list(enumerate_explanations(theory, obs, max_add=2, max_del=1))
    subset = filter_subset_minimal(expls, theory, obs)
    card = filter_card_minimal(expls, theory, obs, max_add=2, max_del=1)
    assert set(card) <= set(subset)
    if expls:
        assert card and {e.size for e in card} == {min(e.size for e in expls)}


def test_rank_by_arbitrariness():
    theory, obs = load("ex7")
    names = ["dx1x2", "dxx", "dx3", "d"]
    ranked = rank_by_arbitrariness([load_expl(f"ex7_{n}") for n in names], theory, obs)
    assert [d for _, d in ranked] == [0, 1, 2, 2]
    assert ranked[0][0] == load_expl("ex7_d")


def test_tractable_rejects_other_classes():
    theory, obs = load("ex6")
    with pytest.raises(ClassMismatch):
        find_constrained_tractable(theory, obs)


def test_proof_leaf_bound():
    rng = random.Random(0)
    theory, obs = horn_chain_theory(rng, 20)
    assert proof_leaf_bound(theory, obs) == 2


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(6, 30))
def test_tractable_agrees_with_bounded_search(seed, n):
    theory, obs = horn_chain_theory(random.Random(seed), n)
    fast = find_constrained_tractable(theory, obs)
    k = proof_leaf_bound(theory, obs)
    slow = find_constrained(theory, obs, max_add=k, max_del=0)
    assert (fast is None) == (not slow.found)
    if fast is not None:
        assert is_constrained(theory, obs, fast)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_tractable_on_random_horn(seed):
    theory, obs = _instance(seed, horn=True)
    assume(len(add_universe(theory, obs)) <= 14)
    fast = find_constrained_tractable(theory, obs)
    k = proof_leaf_bound(theory, obs)
    zero = sum(1 for _, ar in theory.abducibles if ar == 0)
    slow = find_constrained(theory, obs, max_add=k + zero, max_del=0)
    assert (fast is None) == (not slow.found)


def test_constrained_never_uses_fresh_constants():
    theory = parse_theory("goal :- a(X). #abducible a/1.")
    obs = [atom("goal")]
    assert not find_constrained(theory, obs).found
    got = list(iter_constrained(theory, obs, max_add=1, max_del=0, with_fresh=2))
    assert got == []
    assert all(any(is_fresh(c) for c in constants_of(e))
               for e in enumerate_explanations(theory, obs, max_add=1, max_del=0, with_fresh=2))
