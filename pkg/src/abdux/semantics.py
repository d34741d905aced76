"""Grounding, program classification and stable-model evaluation.

Stratified programs are evaluated SCC by SCC with counter-based propagation, so
each call is linear in the size of the ground program.  Arbitrary normal
programs go through a brute-force enumerator over Gelfond-Lifschitz reducts,
which is kept deliberately simple because it serves as the oracle.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import networkx as nx

from .core import Atom, CapExceeded, IntegrityConstraint, Rule, constants_of

DEFAULT_ATOM_CAP = 24

Model = frozenset  # of ground Atoms


class NotStratified(ValueError):
    pass


class InconsistentProgram(ValueError):
    pass


@dataclass(frozen=True)
class Classification:
    stratified: bool
    non_recursive: bool
    horn: bool


@dataclass(frozen=True)
class GroundProgram:
    rules: tuple[Rule, ...]
    graph: nx.DiGraph
    strata: Mapping[tuple[str, int], int] | None
    stratified: bool
    non_recursive: bool
    horn: bool

    @property
    def facts(self) -> frozenset[Atom]:
        return frozenset(r.head for r in self.rules if not r.pos and not r.neg)

    def atoms(self) -> set[Atom]:
        out: set[Atom] = set()
        for r in self.rules:
            out.add(r.head)
            out.update(r.pos)
            out.update(r.neg)
        return out


def dependency_graph(rules: Iterable[Rule]) -> nx.DiGraph:
    """Predicate graph with an edge body -> head; ``negative`` marks edges through ``not``."""
    g = nx.DiGraph()
    for r in rules:
        h = r.head.signature
        g.add_node(h)
        for a in r.pos:
            if not g.has_edge(a.signature, h):
                g.add_edge(a.signature, h, negative=False)
        for a in r.neg:
            g.add_edge(a.signature, h, negative=True)
    return g


def _analyse(graph: nx.DiGraph, rules: Sequence[Rule]):
    cond = nx.condensation(graph)
    stratified = True
    for u, v, neg in graph.edges(data="negative"):
        if neg and cond.graph["mapping"][u] == cond.graph["mapping"][v]:
            stratified = False
            break
    non_recursive = nx.is_directed_acyclic_graph(graph)
    horn = not any(r.neg for r in rules)
    strata = None
    if stratified:
        position = {scc: i for i, scc in enumerate(nx.topological_sort(cond))}
        strata = {p: position[cond.graph["mapping"][p]] for p in graph.nodes}
    return strata, stratified, non_recursive, horn


def classify(gp: GroundProgram) -> Classification:
    return Classification(gp.stratified, gp.non_recursive, gp.horn)


# --- grounding ---------------------------------------------------------------

def _index(atoms: Iterable[Atom]) -> dict[tuple[str, int], list[Atom]]:
    idx: dict[tuple[str, int], list[Atom]] = defaultdict(list)
    for a in atoms:
        idx[a.signature].append(a)
    return idx


def _unify(pattern: Atom, ground: Atom, binding: dict[str, str]) -> dict[str, str] | None:
    out = binding
    for p, g in zip(pattern.args, ground.args):
        if p[:1].isupper():
            bound = out.get(p)
            if bound is None:
                if out is binding:
                    out = dict(binding)
                out[p] = g
            elif bound != g:
                return None
        elif p != g:
            return None
    return out


def match_body(body: Sequence[Atom], index: Mapping, binding: dict[str, str] | None = None,
               domain: set[str] | None = None) -> Iterator[dict[str, str]]:
    """All extensions of ``binding`` mapping every atom of ``body`` into ``index``."""
    binding = {} if binding is None else binding
    if not body:
        yield binding
        return
    first, rest = body[0], body[1:]
    for cand in index.get(first.signature, ()):
        b = _unify(first, cand, binding)
        if b is None:
            continue
        if domain is not None and any(v not in domain for v in b.values()):
            continue
        yield from match_body(rest, index, b, domain)


def _check_safe(rules: Iterable[Rule]) -> None:
    for r in rules:
        unsafe = r.unsafe_variables()
        if unsafe:
            raise ValueError(f"unsafe rule (variables {sorted(unsafe)} not in a positive body atom): {r}")


def possible_atoms(rules: Sequence[Rule], facts: Iterable[Atom] = ()) -> set[Atom]:
    """Least fixpoint of the rules with negative literals dropped: a superset of every stable model."""
    known = set(facts)
    for r in rules:
        if r.is_fact():
            known.add(r.head)
    proper = [r for r in rules if not r.is_fact()]
    idx = _index(known)
    changed = True
    while changed:
        changed = False
        for r in proper:
            new = []
            for b in match_body(r.pos, idx):
                h = r.head.substitute(b)
                if h not in known:
                    new.append(h)
            for h in new:
                if h not in known:
                    known.add(h)
                    idx[h.signature].append(h)
                    changed = True
    return known


def _relevant_instances(rules: Sequence[Rule], possible: set[Atom]) -> list[Rule]:
    idx = _index(possible)
    out: list[Rule] = []
    seen: set[Rule] = set()
    for r in rules:
        if r.is_fact():
            continue
        for b in match_body(r.pos, idx):
            g = r.substitute(b)
            if g not in seen:
                seen.add(g)
                out.append(g)
    return out


def ground(rules: Sequence[Rule], extra_constants: Iterable[str] = (), relevant: bool = False) -> GroundProgram:
    """Instantiate ``rules`` over the active domain (their constants plus ``extra_constants``).

    With ``relevant=True`` only instances whose positive body can possibly hold
    are produced; both groundings have the same stable models.
    """
    rules = list(rules)
    _check_safe(rules)
    graph = dependency_graph(rules)
    strata, stratified, non_recursive, horn = _analyse(graph, rules)
    if relevant:
        facts = [r for r in rules if r.is_fact()]
        seen = set(facts)
        out = list(dict.fromkeys(facts))
        for g in _relevant_instances(rules, possible_atoms(rules)):
            if g not in seen:
                seen.add(g)
                out.append(g)
        grounded = tuple(out)
    else:
        domain = sorted(constants_of(rules) | set(extra_constants))
        out = []
        seen = set()
        for r in rules:
            vs = sorted(r.variables())
            for values in itertools.product(domain, repeat=len(vs)):
                g = r.substitute(dict(zip(vs, values)))
                if g not in seen:
                    seen.add(g)
                    out.append(g)
        grounded = tuple(out)
    return GroundProgram(grounded, graph, strata, stratified, non_recursive, horn)


# --- evaluation ----------------------------------------------------------------

class StratifiedEvaluator:
    """Reusable perfect-model evaluator for one ground rule set and varying facts.

    ``rules`` must be ground and proper (non-empty body); ``strata`` maps every
    head predicate to its stratum.  The rules are compiled to integer ids once,
    so each evaluation is a linear pass with precomputed watch lists.
    """

    def __init__(self, rules: Iterable[Rule], strata: Mapping[tuple[str, int], int]):
        self.ids: dict[Atom, int] = {}
        self.atoms: list[Atom] = []
        layers: dict[int, list[Rule]] = defaultdict(list)
        for r in rules:
            layers[strata[r.head.signature]].append(r)
        self.layers = []
        for k in sorted(layers):
            heads, pos, neg = [], [], []
            watch: dict[int, list[int]] = defaultdict(list)
            for i, r in enumerate(layers[k]):
                heads.append(self._id(r.head))
                p = tuple(sorted({self._id(a) for a in r.pos}))
                pos.append(p)
                neg.append(tuple(self._id(a) for a in r.neg))
                for a in p:
                    watch[a].append(i)
            self.layers.append((heads, pos, neg, dict(watch)))

    def _id(self, a: Atom) -> int:
        i = self.ids.get(a)
        if i is None:
            i = self.ids[a] = len(self.atoms)
            self.atoms.append(a)
        return i

    def _encode(self, atoms: Iterable[Atom], extra: set[Atom]) -> bytearray:
        vec = bytearray(len(self.atoms))
        ids = self.ids
        for a in atoms:
            i = ids.get(a)
            if i is None:
                extra.add(a)
            else:
                vec[i] = 1
        return vec

    @staticmethod
    def _close(layer, true: bytearray, blocked: bytearray) -> None:
        heads, pos, neg, watch = layer
        count = []
        queue = []
        for i, p in enumerate(pos):
            if any(blocked[a] for a in neg[i]):
                count.append(-1)
                continue
            c = len(p) - sum(true[a] for a in p)
            count.append(c)
            if c == 0:
                queue.append(heads[i])
        while queue:
            h = queue.pop()
            if true[h]:
                continue
            true[h] = 1
            for i in watch.get(h, ()):
                if count[i] > 0:
                    count[i] -= 1
                    if count[i] == 0:
                        queue.append(heads[i])

    def _decode(self, vec: bytearray, extra: set[Atom]) -> set[Atom]:
        atoms = self.atoms
        out = {atoms[i] for i, v in enumerate(vec) if v}
        out |= extra
        return out

    def model(self, facts: Iterable[Atom]) -> frozenset[Atom]:
        extra: set[Atom] = set()
        true = self._encode(facts, extra)
        for layer in self.layers:
            self._close(layer, true, true)
        return frozenset(self._decode(true, extra))

    def bounds(self, sure: Iterable[Atom], maybe: Iterable[Atom]) -> tuple[set[Atom], set[Atom]]:
        """Three-valued evaluation: atoms true in every / some completion of ``maybe``."""
        extra_sure: set[Atom] = set()
        extra_maybe: set[Atom] = set()
        lower = self._encode(sure, extra_sure)
        upper = bytearray(lower)
        for i, v in enumerate(self._encode(maybe, extra_maybe)):
            if v:
                upper[i] = 1
        for layer in self.layers:
            self._close(layer, lower, upper)
            self._close(layer, upper, lower)
        return self._decode(lower, extra_sure), self._decode(upper, extra_sure | extra_maybe)


def stable_model_stratified(gp: GroundProgram) -> frozenset[Atom]:
    """The unique stable (perfect) model of a stratified ground program."""
    if not gp.stratified:
        raise NotStratified("program is not stratified")
    strata = dict(gp.strata)
    proper = [r for r in gp.rules if r.pos or r.neg]
    return StratifiedEvaluator(proper, strata).model(gp.facts)


def least_model(rules: Iterable[Rule]) -> set[Atom]:
    """Naive fixpoint of definite ground rules (negative bodies ignored by the caller)."""
    rules = list(rules)
    true: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        for r in rules:
            if r.head not in true and all(a in true for a in r.pos):
                true.add(r.head)
                changed = True
    return true


def stable_models_bruteforce(gp: GroundProgram, cap: int = DEFAULT_ATOM_CAP) -> list[frozenset[Atom]]:
    """Every M with M = least model of the reduct of ``gp`` by M, by enumeration.

    The reduct only depends on M restricted to atoms that occur negated and can
    be derived, so the guess ranges over those; ``cap`` bounds their number.
    """
    heads = {r.head for r in gp.rules}
    guessable = sorted({a for r in gp.rules for a in r.neg if a in heads})
    if len(guessable) > cap:
        raise CapExceeded(f"{len(guessable)} guessable atoms exceed the cap of {cap}")
    models = []
    for bits in itertools.product((False, True), repeat=len(guessable)):
        guess = {a for a, b in zip(guessable, bits) if b}
        reduct = [r for r in gp.rules if not any(a in guess for a in r.neg)]
        m = least_model(reduct)
        if {a for a in guessable if a in m} == guess:
            models.append(frozenset(m))
    return sorted(models, key=lambda m: sorted(m))


def eval_constraints(model: Iterable[Atom], constraints: Sequence[IntegrityConstraint],
                     active_domain: Iterable[str]) -> bool:
    """True iff every ground instance over ``active_domain`` is satisfied by ``model``."""
    if not constraints:
        return True
    model = model if isinstance(model, (set, frozenset)) else set(model)
    idx = _index(model)
    domain = set(active_domain)
    for c in constraints:
        if violations(c, model, idx, domain):
            return False
    return True


def violations(c: IntegrityConstraint, model, idx, domain) -> bool:
    for b in match_body(c.pos, idx, domain=domain):
        if any(a.substitute(b) in model for a in c.neg):
            continue
        if any(a.substitute(b) in model for a in c.head):
            continue
        return True
    return False


def entails_skeptical(models: Sequence[Iterable[Atom]], phi: Iterable[Atom]) -> bool:
    if not models:
        raise InconsistentProgram("no stable models; skeptical entailment is undefined")
    phi = set(phi)
    return all(phi <= set(m) for m in models)


def stable_models(rules: Sequence[Rule], cap: int = DEFAULT_ATOM_CAP) -> list[frozenset[Atom]]:
    """Stable models of a (non-ground) program: fast path when stratified, brute force otherwise."""
    gp = ground(rules, relevant=True)
    if gp.stratified:
        return [stable_model_stratified(gp)]
    return stable_models_bruteforce(gp, cap)
