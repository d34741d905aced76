"""Random theories, explanations and formulas for property tests and experiments.

All generators take a ``random.Random`` so runs are reproducible from a seed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

from .core import AbductiveTheory, Atom, Explanation, IntegrityConstraint, Rule
from .parser import CNF, QBF

VARS = ("X", "Y")


@dataclass
class TheoryShape:
    """Size knobs for :func:`random_stratified_theory`."""

    max_preds: int = 8
    max_consts: int = 6
    max_arity: int = 2
    max_rules: int = 8
    max_body: int = 3
    negation: bool = True
    constraint_prob: float = 0.3


def _consts(n: int) -> list[str]:
    return [f"k{i}" for i in range(n)]


def _atom_with(rng: random.Random, pred: str, arity: int, terms: Sequence[str]) -> Atom:
    return Atom(pred, tuple(rng.choice(terms) for _ in range(arity)))


def _bind_to(rng: random.Random, a: Atom, allowed: Sequence[str], consts: Sequence[str]) -> Atom:
    """Replace variables of ``a`` that are not in ``allowed`` by constants (keeps rules safe)."""
    return Atom(a.pred, tuple(t if not t[:1].isupper() or t in allowed else rng.choice(consts) for t in a.args))


def random_stratified_theory(rng: random.Random, shape: TheoryShape | None = None,
                             horn: bool = False) -> tuple[AbductiveTheory, list[str]]:
    """A theory whose program is stratified by construction (negation only points to lower levels).

    With ``horn`` there is no negation and no constraint, and rule bodies only
    use strictly lower levels, so the program is also non-recursive.
    """
    shape = shape or TheoryShape()
    consts = _consts(rng.randint(1, shape.max_consts))
    n = rng.randint(2, shape.max_preds)
    preds = [(f"p{i}", rng.randint(0, shape.max_arity)) for i in range(n)]
    n_abd = rng.randint(1, max(1, n // 3))
    abducibles = preds[:n_abd]
    derived = preds[n_abd:]
    level = {p: 0 for p in abducibles}
    for p in derived:
        level[p] = rng.randint(0, 3)
    terms = list(VARS) + consts[:2]

    rules: list[Rule] = []
    for _ in range(rng.randint(1, shape.max_rules)):
        head_pred = rng.choice(derived)
        lv = level[head_pred]
        lower_or_equal = [p for p in preds if level[p] < lv or (not horn and level[p] == lv)] or abducibles
        strictly_lower = [p for p in preds if level[p] < lv]
        pos = [_atom_with(rng, *rng.choice(lower_or_equal), terms) for _ in range(rng.randint(1, shape.max_body))]
        bound = sorted({t for a in pos for t in a.args if t[:1].isupper()})
        neg = []
        if shape.negation and not horn and strictly_lower and rng.random() < 0.5:
            neg.append(_bind_to(rng, _atom_with(rng, *rng.choice(strictly_lower), terms), bound, consts))
        head = _bind_to(rng, _atom_with(rng, *head_pred, terms), bound, consts)
        rules.append(Rule(head, tuple(pos), tuple(neg)))
    base = [p for p in preds if p in abducibles or rng.random() < 0.5]
    for p in base:
        for _ in range(rng.randint(0, 3)):
            rules.append(Rule(_atom_with(rng, *p, consts)))
    constraints = []
    if not horn and rng.random() < shape.constraint_prob:
        body = [_atom_with(rng, *rng.choice(preds), terms) for _ in range(rng.randint(1, 2))]
        bound = sorted({t for a in body for t in a.args if t[:1].isupper()})
        head = ()
        if rng.random() < 0.5:
            head = (_bind_to(rng, _atom_with(rng, *rng.choice(preds), terms), bound, consts),)
        constraints.append(IntegrityConstraint(tuple(body), (), head))
    rules = list(dict.fromkeys(rules))
    theory = AbductiveTheory(tuple(rules), frozenset(abducibles), tuple(constraints))
    return theory, consts


def random_observation(rng: random.Random, theory: AbductiveTheory, consts: Sequence[str],
                       max_size: int = 2) -> frozenset[Atom]:
    sigs = sorted({a.signature for r in theory.rules for a in (r.head, *r.pos, *r.neg)} - set(theory.abducibles))
    if not sigs:
        return frozenset()
    return frozenset(_atom_with(rng, name, arity, consts) for name, arity in
                     (rng.choice(sigs) for _ in range(rng.randint(0, max_size))))


def random_explanation(rng: random.Random, theory: AbductiveTheory, consts: Sequence[str],
                       max_add: int = 2, max_del: int = 1) -> Explanation:
    """A syntactically valid pair: abducible atoms added, facts of B deleted, disjoint."""
    abd = sorted(theory.abducibles)
    add = {_atom_with(rng, name, arity, consts) for name, arity in
           (rng.choice(abd) for _ in range(rng.randint(0, max_add)))} if abd else set()
    b = sorted(theory.abducible_facts - add)
    delete = set(rng.sample(b, min(len(b), rng.randint(0, max_del))))
    return Explanation(frozenset(add), frozenset(delete))


def random_ground_normal_theory(rng: random.Random, n_atoms: int = 6, n_rules: int = 8,
                                constraint_prob: float = 0.3) -> AbductiveTheory:
    """Propositional normal program (possibly non-stratified) with abducible atoms a0, a1, ..."""
    names = [f"q{i}" for i in range(n_atoms)]
    abd = [f"a{i}" for i in range(rng.randint(1, 3))]
    pool = names + abd
    rules = []
    for _ in range(n_rules):
        body = rng.sample(pool, rng.randint(0, 3))
        split = rng.randint(0, len(body))
        rules.append(Rule(Atom(rng.choice(names)), tuple(map(Atom, body[:split])), tuple(map(Atom, body[split:]))))
    for a in abd:
        if rng.random() < 0.4:
            rules.append(Rule(Atom(a)))
    constraints = []
    if rng.random() < constraint_prob:
        body = rng.sample(pool, rng.randint(1, 2))
        head = (Atom(rng.choice(pool)),) if rng.random() < 0.5 else ()
        constraints.append(IntegrityConstraint(tuple(map(Atom, body)), (), head))
    return AbductiveTheory(tuple(dict.fromkeys(rules)), frozenset((a, 0) for a in abd), tuple(constraints))


def random_ground_explanation(rng: random.Random, theory: AbductiveTheory) -> Explanation:
    abd = sorted(Atom(name) for name, _ in theory.abducibles)
    b = theory.abducible_facts
    add = {a for a in abd if a not in b and rng.random() < 0.4}
    delete = {a for a in sorted(b) if rng.random() < 0.3}
    return Explanation(frozenset(add), frozenset(delete))


def random_ground_stratified_program(rng: random.Random, n_atoms: int = 8, n_rules: int = 10) -> list[Rule]:
    """Propositional program with negation only towards lower-numbered atoms."""
    names = [f"q{i}" for i in range(n_atoms)]
    rules = []
    for _ in range(n_rules):
        h = rng.randrange(n_atoms)
        pos = rng.sample(names[:h + 1], rng.randint(0, min(2, h + 1)))
        neg = rng.sample(names[:h], rng.randint(0, min(2, h))) if h else []
        rules.append(Rule(Atom(names[h]), tuple(map(Atom, pos)), tuple(map(Atom, neg))))
    for i in rng.sample(range(n_atoms), rng.randint(0, 3)):
        rules.append(Rule(Atom(names[i])))
    return list(dict.fromkeys(rules))


def horn_chain_theory(rng: random.Random, n_facts: int) -> tuple[AbductiveTheory, frozenset[Atom]]:
    """Non-recursive Horn theory with a fixed rule set and about ``n_facts`` facts.

    The proof leaf bound k is 2 for every size, so the fast path is polynomial
    with a fixed exponent while the fact base grows.  Abducible facts sit on
    constants outside the ``e``/``s`` graph, so the goal always needs abduction.
    """
    n_consts = max(2, n_facts // 3)
    consts = _consts(n_consts)
    rules = [
        Rule(Atom("h", ("X",)), (Atom("e", ("X", "Y")), Atom("a", ("Y",)), Atom("b", ("X",)))),
        Rule(Atom("goal"), (Atom("h", ("X",)), Atom("s", ("X",)))),
    ]
    facts: set[Atom] = set()
    while len(facts) < n_facts:
        kind = rng.random()
        if kind < 0.6:
            facts.add(Atom("e", (rng.choice(consts), rng.choice(consts))))
        elif kind < 0.75:
            facts.add(Atom("s", (rng.choice(consts),)))
        else:
            facts.add(Atom(rng.choice("ab"), (f"m{rng.randrange(n_consts)}",)))
    theory = AbductiveTheory(tuple(rules) + tuple(Rule(f) for f in sorted(facts)),
                             frozenset({("a", 1), ("b", 1)}))
    return theory, frozenset({Atom("goal")})


# --- formulas ---------------------------------------------------------------------

def all_clauses(num_vars: int) -> list[tuple[int, ...]]:
    """Every non-empty, non-tautological clause over variables 1..num_vars (3^n - 1 of them)."""
    out = []
    for signs in itertools.product((0, 1, -1), repeat=num_vars):
        clause = tuple(s * (i + 1) for i, s in enumerate(signs) if s)
        if clause:
            out.append(clause)
    return out


def all_cnfs(max_vars: int, max_clauses: int):
    """Every CNF with 1..max_vars variables and 1..max_clauses distinct clauses."""
    for n in range(1, max_vars + 1):
        clauses = all_clauses(n)
        for m in range(1, max_clauses + 1):
            for combo in itertools.combinations(clauses, m):
                yield CNF(n, combo)


def random_cnf(rng: random.Random, max_vars: int = 3, max_clauses: int = 3) -> CNF:
    n = rng.randint(1, max_vars)
    clauses = all_clauses(n)
    return CNF(n, tuple(rng.sample(clauses, rng.randint(1, min(max_clauses, len(clauses))))))


def random_qbf(rng: random.Random, max_x: int = 2, max_y: int = 2, max_terms: int = 3,
               min_x: int = 0, min_y: int = 1) -> QBF:
    k = rng.randint(min_x, max_x)
    n = rng.randint(min_y, max_y)
    terms = rng.sample(all_clauses(k + n), rng.randint(1, min(max_terms, 3 ** (k + n) - 1)))
    return QBF(k + n, tuple(range(1, k + 1)), tuple(range(k + 1, k + n + 1)), tuple(terms))
