"""Hardness-reduction instances built from CNF and exists-forall QBF inputs, plus brute-force oracles.

Each generator assembles the program as text and parses it, so the rule lists
below read like the constructions they encode.  Constants ``0``, ``t``, ``f``,
``c1..cm``, ``x1..xk`` and ``y1..yn`` are all generated, so no user constant
can collide with them.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from .core import AbductiveTheory, Atom, Explanation
from .parser import CNF, QBF, parse_theory

MAX_ORACLE_VARS = 20


class ReductionError(ValueError):
    """The input does not meet a generator's precondition."""


# --- oracles ---------------------------------------------------------------------

def _assignments(variables: Sequence[int]):
    for bits in itertools.product((False, True), repeat=len(variables)):
        yield dict(zip(variables, bits))


def _lit(v: dict[int, bool], lit: int) -> bool:
    return v[abs(lit)] if lit > 0 else not v[abs(lit)]


def cnf_holds(clauses, v: dict[int, bool]) -> bool:
    return all(any(_lit(v, l) for l in c) for c in clauses)


def dnf_holds(terms, v: dict[int, bool]) -> bool:
    return any(all(_lit(v, l) for l in t) for t in terms)


def sat_bruteforce(cnf: CNF) -> bool:
    if cnf.num_vars > MAX_ORACLE_VARS:
        raise ValueError(f"{cnf.num_vars} variables exceed the oracle cap of {MAX_ORACLE_VARS}")
    return any(cnf_holds(cnf.clauses, v) for v in _assignments(range(1, cnf.num_vars + 1)))


def qbf_bruteforce(qbf: QBF) -> bool:
    """Truth of exists X forall Y G, G a DNF."""
    if len(qbf.exists) + len(qbf.forall) > MAX_ORACLE_VARS:
        raise ValueError(f"more than {MAX_ORACLE_VARS} variables")
    for vx in _assignments(qbf.exists):
        if all(dnf_holds(qbf.terms, {**vx, **vy}) for vy in _assignments(qbf.forall)):
            return True
    return False


def cnf_of_negation(terms) -> tuple[tuple[int, ...], ...]:
    """De Morgan: the negation of a DNF as a CNF, one clause per term."""
    return tuple(tuple(-l for l in t) for t in terms)


def allfalse_precondition(qbf: QBF) -> bool:
    """For every assignment to X, setting all of Y false satisfies G."""
    none_true = {y: False for y in qbf.forall}
    return all(dnf_holds(qbf.terms, {**vx, **none_true}) for vx in _assignments(qbf.exists))


# --- shared fact builders ----------------------------------------------------------

def _clause_facts(clauses, name) -> list[str]:
    out = []
    for i, clause in enumerate(clauses, 1):
        if not clause:
            raise ReductionError(f"clause {i} is empty")
        for l in clause:
            out.append(f"{'pos' if l > 0 else 'ngtd'}({name[abs(l)]}, c{i}).")
    return out


def _chain(pred: str, items: Sequence[str]) -> list[str]:
    return [f"{pred}({a}, {b})." for a, b in zip(items, items[1:])]


def _build(facts: list[str], rules: str, extra: str = "") -> AbductiveTheory:
    return parse_theory("\n".join(dict.fromkeys(facts)) + "\n" + rules + extra, file="<generated>")


def _cnf_names(cnf: CNF) -> dict[int, str]:
    return {v: f"y{v}" for v in range(1, cnf.num_vars + 1)}


def _qbf_names(qbf: QBF) -> tuple[dict[int, str], list[str], list[str]]:
    xs = [f"x{i}" for i in range(1, len(qbf.exists) + 1)]
    ys = [f"y{j}" for j in range(1, len(qbf.forall) + 1)]
    name = dict(zip(qbf.exists, xs)) | dict(zip(qbf.forall, ys))
    return name, xs, ys


GOAL = frozenset({Atom("goal")})


# --- coNP: is a given explanation constrained? -------------------------------------

THM4_SAT_RULES = """\
clause(C) :- pos(A, C).
clause(C) :- ngtd(A, C).
true(A) :- in_Y(A), gate(W), not choose(A, W).
holds(C) :- pos(A, C), true(A).
holds(C) :- ngtd(A, C), not true(A).
clfalse :- clause(C), not holds(C).
sat :- not clfalse.
sometrue :- in_Y(A), true(A).
allfalse :- not sometrue.
bad :- choose(A, W), not in_Y(A).
goal :- allfalse, not bad.
goal :- sat, not bad.
#abducible choose/2.
"""


def gen_thm4_sat(cnf: CNF) -> tuple[AbductiveTheory, frozenset[Atom], Explanation]:
    """Stratified non-recursive instance: U is constrained iff the CNF is unsatisfiable.

    The all-false assignment must not satisfy the CNF.
    """
    if cnf_holds(cnf.clauses, {v: False for v in range(1, cnf.num_vars + 1)}):
        raise ReductionError("the all-false assignment satisfies the formula")
    name = _cnf_names(cnf)
    facts = [f"in_Y({y})." for y in name.values()] + ["gate(0)."] + _clause_facts(cnf.clauses, name)
    theory = _build(facts, THM4_SAT_RULES)
    u = Explanation(frozenset(Atom("choose", (y, "0")) for y in name.values()), frozenset())
    return theory, GOAL, u


THM5_SAT_RULES = """\
clause(C) :- pos(A, C).
clause(C) :- ngtd(A, C).
true(A) :- in_Y(A), p(A, Z), p(t, Z).
false(A) :- in_Y(A), p(A, Z), p(f, Z).
clsat(C) :- pos(A, C), true(A).
clsat(C) :- ngtd(A, C), false(A).
ok(t).
ok(A) :- ok(A2), next(A2, A), true(A).
ok(A) :- ok(A2), next(A2, A), false(A).
ok(f) :- ok(A2), next(A2, f).
sat({first}) :- clsat({first}).
sat(C) :- sat(C2), next_C(C2, C), clsat(C).
goal :- ok(f), sat({last}), p(f, Z).
#abducible p/2.
"""


def _p_explanation(ys: Sequence[str]) -> Explanation:
    return Explanation(frozenset(Atom("p", (x, "0")) for x in (*ys, "f")), frozenset())


def gen_thm5_sat(cnf: CNF) -> tuple[AbductiveTheory, frozenset[Atom], Explanation]:
    """Recursive Horn instance: (E, {}) is constrained iff the CNF is unsatisfiable."""
    if not cnf.clauses:
        raise ReductionError("the formula needs at least one clause")
    name = _cnf_names(cnf)
    ys = list(name.values())
    cs = [f"c{i}" for i in range(1, len(cnf.clauses) + 1)]
    facts = [f"in_Y({a})." for a in (*ys, "t", "f")]
    facts += _clause_facts(cnf.clauses, name)
    facts += _chain("next", ["t", *ys, "f"]) + _chain("next_C", cs) + ["p(t, 0)."]
    theory = _build(facts, THM5_SAT_RULES.format(first=cs[0], last=cs[-1]))
    return theory, GOAL, _p_explanation(ys)


THM6_SAT_RULES = """\
clause(C) :- pos(A, C).
clause(C) :- ngtd(A, C).
true(A) :- in_Y(A), p(A, Z), p(t, Z).
false(A) :- in_Y(A), p(A, Z), p(f, Z).
clsat(C) :- pos(A, C), true(A).
clsat(C) :- ngtd(A, C), false(A).
goal :- p(f, X).
#ic clsat(C) :- clause(C).
#ic false(A) | true(A) :- in_Y(A).
#abducible p/2.
"""


def gen_thm6_sat(cnf: CNF) -> tuple[AbductiveTheory, frozenset[Atom], Explanation]:
    """Non-recursive Horn instance with two constraints: (E, {}) constrained iff unsatisfiable."""
    name = _cnf_names(cnf)
    ys = list(name.values())
    facts = [f"in_Y({a})." for a in (*ys, "t", "f")] + _clause_facts(cnf.clauses, name) + ["p(t, 0)."]
    return _build(facts, THM6_SAT_RULES), GOAL, _p_explanation(ys)


# --- Sigma2: does a constrained explanation exist? ---------------------------------

THM4_QBF_RULES = """\
clause(C) :- pos(A, C).
clause(C) :- ngtd(A, C).
true_Y(A) :- in_Y(A), gate(W), not choose(A, W).
true(A) :- true_X(A).
true(A) :- true_Y(A).
holds(C) :- pos(A, C), true(A).
holds(C) :- ngtd(A, C), not true(A).
clfalse :- clause(C), not holds(C).
sat :- not clfalse.
sometrue :- in_Y(A), true_Y(A).
allfalse :- not sometrue.
bad :- choose(A, W), not in_Y(A).
bad :- true_X(A), not in_X(A).
good(A) :- in_Y(A), choose(A, W).
bad :- in_Y(A), not good(A).
goal :- allfalse, not bad.
goal :- sat, not bad.
#abducible true_X/1.
#abducible choose/2.
"""


def _check_qbf(qbf: QBF) -> None:
    if not allfalse_precondition(qbf):
        raise ReductionError("some assignment to X makes the all-false Y assignment falsify G")


def _qbf_clause_facts(qbf: QBF):
    name, xs, ys = _qbf_names(qbf)
    return name, xs, ys, _clause_facts(cnf_of_negation(qbf.terms), name)


def gen_thm4_qbf(qbf: QBF) -> tuple[AbductiveTheory, frozenset[Atom]]:
    """Stratified instance: goal has a constrained explanation iff exists X forall Y G holds."""
    _check_qbf(qbf)
    _, xs, ys, clause_facts = _qbf_clause_facts(qbf)
    facts = [f"in_X({x})." for x in xs] + [f"in_Y({y})." for y in ys] + ["gate(0)."] + clause_facts
    return _build(facts, THM4_QBF_RULES), GOAL


THM5_QBF_RULES = """\
clause(C) :- pos(A, C).
clause(C) :- ngtd(A, C).
true(A) :- true_X(A).
false(A) :- false_X(A).
true(B) :- in_X(B), true_X(A), false_X(A).
false(B) :- in_X(B), true_X(A), false_X(A).
true(B) :- in_Y(B), true_X(A), false_X(A).
false(B) :- in_Y(B), true_X(A), false_X(A).
true(A) :- in_Y(A), assign(A, Z), tr(Z).
false(A) :- in_Y(A), assign(A, Z), fa(Z).
clsat(C) :- pos(A, C), true(A).
clsat(C) :- ngtd(A, C), false(A).
ok_X(A) :- f_X(A), true(A).
ok_X(A) :- f_X(A), false(A).
ok_X(A) :- ok_X(A2), next_X(A2, A), true(A).
ok_X(A) :- ok_X(A2), next_X(A2, A), false(A).
good_X :- ok_X(A), l_X(A).
ok_Y(A) :- f_Y(A), true(A).
ok_Y(A) :- f_Y(A), false(A).
ok_Y(A) :- ok_Y(A2), next_Y(A2, A), true(A).
ok_Y(A) :- ok_Y(A2), next_Y(A2, A), false(A).
good_Y :- ok_Y(A), l_Y(A).
sat(C) :- clsat(C), f_C(C).
sat(C) :- sat(C2), next_C(C2, C), clsat(C).
good_C :- sat(C), l_C(C).
goal :- good_X, good_Y, good_C, fa(Z).
goal :- good_X, good_Y, in_Y(A), false(A), true(A), fa(Z).
#abducible true_X/1.
#abducible false_X/1.
#abducible assign/2.
#abducible fa/1.
"""


GUARDED_RULES = {
    "true(A) :- true_X(A).": "true(A) :- true_X(A), in_X(A).",
    "false(A) :- false_X(A).": "false(A) :- false_X(A), in_X(A).",
}


def gen_thm5_qbf(qbf: QBF, guarded: bool = False) -> tuple[AbductiveTheory, frozenset[Atom]]:
    """Horn instance for exists X forall Y G.

    The index chains need at least one variable on each side.  As transcribed,
    ``true_X``/``false_X`` facts on elements of Y also fix truth values there,
    which can yield a constrained explanation for a false formula.  With
    ``guarded`` the two copying rules only fire for elements of X; the rule
    count is unchanged.
    """
    _check_qbf(qbf)
    if not qbf.exists or not qbf.forall:
        raise ReductionError("both quantifier blocks must be non-empty")
    _, xs, ys, clause_facts = _qbf_clause_facts(qbf)
    cs = [f"c{i}" for i in range(1, len(qbf.terms) + 1)]
    facts = [f"in_X({x})." for x in xs] + [f"in_Y({a})." for a in (*ys, "t", "f")] + clause_facts
    facts += [f"f_X({xs[0]}).", f"l_X({xs[-1]}).", f"f_Y({ys[0]}).", f"l_Y({ys[-1]}).",
              f"f_C({cs[0]}).", f"l_C({cs[-1]})."]
    facts += _chain("next_X", xs) + _chain("next_Y", ys) + _chain("next_C", cs) + ["tr(0)."]
    rules = THM5_QBF_RULES
    if guarded:
        for old, new in GUARDED_RULES.items():
            rules = rules.replace(old, new)
    return _build(facts, rules), GOAL


def thm4_qbf_witness(qbf: QBF, vx: dict[int, bool]) -> Explanation:
    """The explanation built from an assignment to X (constrained when forall Y G|vx holds)."""
    name, _, ys = _qbf_names(qbf)
    add = {Atom("true_X", (name[x],)) for x in qbf.exists if vx[x]}
    add |= {Atom("choose", (y, "0")) for y in ys}
    return Explanation(frozenset(add), frozenset())


def thm5_qbf_witness(qbf: QBF, vx: dict[int, bool]) -> Explanation:
    name, _, ys = _qbf_names(qbf)
    add = {Atom("true_X" if vx[x] else "false_X", (name[x],)) for x in qbf.exists}
    add |= {Atom("assign", (y, "0")) for y in ys} | {Atom("fa", ("0",))}
    return Explanation(frozenset(add), frozenset())


GENERATORS = {
    "thm4-sat": gen_thm4_sat,
    "thm4-qbf": gen_thm4_qbf,
    "thm5-sat": gen_thm5_sat,
    "thm5-qbf": gen_thm5_qbf,
    "thm6-sat": gen_thm6_sat,
}
