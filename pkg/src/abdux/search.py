"""Explanation enumeration, constrained-explanation search, minimality filters.

Candidates are drawn from abducible atoms over the constants of the theory and
the observation.  When the program is stratified the enumeration is a
depth-first search over include/exclude decisions, pruned with a three-valued
evaluation: a partial choice is abandoned as soon as some observed atom cannot
become true or some constraint instance is already violated in every
completion.  Results of each size are sorted before they are emitted, so the
stream order is ``(|E|+|F|, E, F)`` whichever path produced it.
"""

from __future__ import annotations

import itertools
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .abduction import AgreementType, agreement_from_models, is_explanation
from .arbitrariness import (
    DEFAULT_OCCURRENCE_CAP,
    apply_replacement,
    candidate_replacements,
    degree,
    is_constrained,
)
from .core import (
    AbductiveTheory,
    Atom,
    CapExceeded,
    Explanation,
    Rule,
    constants_of,
    fresh_constant,
)
from .semantics import (
    DEFAULT_ATOM_CAP,
    StratifiedEvaluator,
    _analyse,
    _index,
    _relevant_instances,
    dependency_graph,
    match_body,
    possible_atoms,
)

DEFAULT_CANDIDATE_CAP = 1_000_000


@dataclass
class SearchStats:
    candidates_checked: int = 0
    nodes: int = 0
    started: float = field(default_factory=time.perf_counter)

    @property
    def time_ms(self) -> float:
        return (time.perf_counter() - self.started) * 1000.0

    def as_dict(self) -> dict:
        return {"candidates_checked": self.candidates_checked, "time_ms": round(self.time_ms, 3)}


@dataclass
class SearchResult:
    explanation: Explanation | None
    stats: SearchStats
    max_add: int
    max_del: int

    @property
    def found(self) -> bool:
        return self.explanation is not None


def fresh_constants(avoid: Iterable[str], k: int) -> list[str]:
    avoid = set(avoid)
    out = []
    for _ in range(k):
        c = fresh_constant(avoid)
        avoid.add(c)
        out.append(c)
    return out


def abducible_atoms(theory: AbductiveTheory, constants: Iterable[str]) -> list[Atom]:
    """Every ground abducible atom over ``constants``, sorted."""
    consts = sorted(set(constants))
    out = []
    for name, arity in sorted(theory.abducibles):
        for args in itertools.product(consts, repeat=arity):
            out.append(Atom(name, args))
    return sorted(out)


def add_universe(theory: AbductiveTheory, obs: Iterable[Atom], with_fresh: int = 0) -> list[Atom]:
    consts = constants_of(theory, frozenset(obs))
    return abducible_atoms(theory, consts | set(fresh_constants(consts, with_fresh)))


def inert_atoms(theory: AbductiveTheory, candidates: Iterable[Atom]) -> set[Atom]:
    """Candidates that no rule or constraint instance can ever look at.

    Adding such an atom changes every stable model only by adding the atom
    itself, and the same holds after renaming one of its constants to a fresh
    one.
    """
    candidates = set(candidates)
    facts = {r.head for r in theory.rules if r.is_fact()}
    possible = possible_atoms(list(theory.rules), facts | candidates)
    used: set[Atom] = set()
    for g in _relevant_instances(list(theory.rules), possible):
        used.update(g.pos)
        used.update(g.neg)
    idx = _index(possible)
    for c in theory.constraints:
        for b in match_body(c.pos, idx):
            used.update(a.substitute(b) for a in c.atoms())
    return candidates - used


class _Space:
    """Pre-grounded program for one (theory, observation) pair and candidate universe."""

    def __init__(self, theory: AbductiveTheory, obs: frozenset[Atom], universe: Iterable[Atom],
                 kind: AgreementType, literal_c: bool, cap: int = DEFAULT_ATOM_CAP):
        self.theory = theory
        self.obs = obs
        self.kind = kind
        self.literal_c = literal_c
        self.cap = cap
        self.facts = frozenset(r.head for r in theory.rules if r.is_fact())
        self.base_facts = self.facts - theory.abducible_facts
        rules = list(theory.rules)
        graph = dependency_graph(rules)
        strata, self.stratified, _, horn = _analyse(graph, rules)
        if self.stratified:
            possible = possible_atoms(rules, self.facts | set(universe))
            self.ground_rules = _relevant_instances(rules, possible)
            self.evaluator = StratifiedEvaluator(self.ground_rules, strata)
        self.domain = constants_of(theory, obs)
        self.prunable = self.stratified and not (literal_c and kind is AgreementType.C)
        # adding atoms never retracts a consequence
        self.monotone = horn and not theory.constraints

    def verdict(self, add: frozenset[Atom], delete: frozenset[Atom]) -> bool:
        if not self.stratified:
            return is_explanation(self.theory, self.obs, Explanation(add, delete), self.kind,
                                  literal_c=self.literal_c, cap=self.cap)
        model = self.evaluator.model((self.facts - delete) | add)
        domain = self.domain | constants_of(add)
        return agreement_from_models([model], self.theory.constraints, self.obs, domain, self.kind,
                                     self.literal_c)

    def constrained(self, expl: Explanation, xi: str, occurrence_cap: int) -> bool:
        """Degree zero; every image atom must lie in the grounded universe."""
        for f in candidate_replacements(expl.add, occurrence_cap):
            if self.verdict(apply_replacement(f, expl.add, xi), expl.delete):
                return False
        return True

    def hopeless(self, sure: set[Atom], maybe: set[Atom]) -> bool:
        lower, upper = self.evaluator.bounds(sure, maybe)
        if not self.obs <= upper:
            return True
        if self.theory.constraints:
            idx = _index(lower)
            for c in self.theory.constraints:
                for b in match_body(c.pos, idx):
                    if any(a.substitute(b) in upper for a in c.neg):
                        continue
                    if any(a.substitute(b) in upper for a in c.head):
                        continue
                    return True
        return False


def _check_one(args) -> bool:
    theory, obs, add, delete, kind, literal_c, cap = args
    return is_explanation(theory, obs, Explanation(add, delete), kind, literal_c=literal_c, cap=cap)


def _level_naive(space: _Space, adds, dels, size, max_add, max_del, stats, jobs, cap):
    cands = []
    for na in range(max(0, size - max_del), min(size, max_add) + 1):
        nd = size - na
        for e in itertools.combinations(adds, na):
            es = frozenset(e)
            for f in itertools.combinations(dels, nd):
                fs = frozenset(f)
                if es & fs:
                    continue
                cands.append((es, fs))
    stats.candidates_checked += len(cands)
    if jobs > 1 and len(cands) > 1:
        payload = [(space.theory, space.obs, e, f, space.kind, space.literal_c, cap) for e, f in cands]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(_check_one, payload, chunksize=max(1, len(payload) // (4 * jobs))))
    else:
        verdicts = [space.verdict(e, f) for e, f in cands]
    return [Explanation(e, f) for (e, f), ok in zip(cands, verdicts) if ok]


def _level_pruned(space: _Space, adds, dels, size, max_add, max_del, stats, node_cap):
    # decision variables grouped by (kind, predicate); small groups first
    groups: dict[tuple, list[Atom]] = defaultdict(list)
    for a in adds:
        groups[(0, a.signature)].append(a)
    for b in dels:
        groups[(1, b.signature)].append(b)
    order = sorted(groups, key=lambda g: (len(groups[g]), g))
    variables = [(g[0] == 1, a) for g in order for a in sorted(groups[g])]
    n = len(variables)
    rem_add = [0] * (n + 1)
    rem_del = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        rem_add[i] = rem_add[i + 1] + (not variables[i][0])
        rem_del[i] = rem_del[i + 1] + variables[i][0]
    abducible_facts = space.theory.abducible_facts
    found: list[Explanation] = []

    def search(i, chosen_add, chosen_del, na, nd):
        need_a, need_d = na - len(chosen_add), nd - len(chosen_del)
        if need_a > rem_add[i] or need_d > rem_del[i]:
            return
        stats.nodes += 1
        if stats.nodes > node_cap:
            raise CapExceeded(f"search visited more than {node_cap} nodes")
        if need_a == 0 and need_d == 0:
            stats.candidates_checked += 1
            if space.verdict(chosen_add, chosen_del):
                found.append(Explanation(chosen_add, chosen_del))
            return
        if space.prunable:
            open_add = {a for is_del, a in variables[i:] if not is_del and a not in chosen_del} if need_a else set()
            open_del = {b for is_del, b in variables[i:] if is_del and b not in chosen_add} if need_d else set()
            present_b = {b for b in abducible_facts if b not in chosen_del and b not in open_del}
            sure = set(space.base_facts) | present_b | chosen_add
            maybe = (open_add | open_del) - sure
            if space.hopeless(sure, maybe):
                return
        is_del, a = variables[i]
        if is_del:
            if need_d and a not in chosen_add:
                search(i + 1, chosen_add, chosen_del | {a}, na, nd)
        elif need_a and a not in chosen_del:
            search(i + 1, chosen_add | {a}, chosen_del, na, nd)
        search(i + 1, chosen_add, chosen_del, na, nd)

    for na in range(max(0, size - max_del), min(size, max_add) + 1):
        search(0, frozenset(), frozenset(), na, size - na)
    return found


def _explanations(space: _Space, max_add, max_del, adds, dels, *, candidate_cap=DEFAULT_CANDIDATE_CAP,
                  stats=None, jobs=1):
    if max_add < 0 or max_del < 0:
        raise ValueError("size bounds must be non-negative")
    stats = stats if stats is not None else SearchStats()
    if not space.prunable:
        total = sum(
            _comb(len(adds), na) * _comb(len(dels), nd)
            for na in range(max_add + 1) for nd in range(max_del + 1)
        )
        if total > candidate_cap:
            raise CapExceeded(f"{total} candidates exceed the cap of {candidate_cap}")
    for size in range(max_add + max_del + 1):
        if space.prunable:
            level = _level_pruned(space, adds, dels, size, max_add, max_del, stats, candidate_cap)
        else:
            level = _level_naive(space, adds, dels, size, max_add, max_del, stats, jobs, space.cap)
        yield from sorted(level, key=Explanation.sort_key)


@lru_cache(maxsize=None)
def _comb(n: int, k: int) -> int:
    from math import comb
    return comb(n, k)


def enumerate_explanations(theory: AbductiveTheory, obs: Iterable[Atom],
                           kind: AgreementType = AgreementType.D, max_add: int = 1, max_del: int = 1, *,
                           with_fresh: int = 0, literal_c: bool = False, cap: int = DEFAULT_ATOM_CAP,
                           candidate_cap: int = DEFAULT_CANDIDATE_CAP, stats: SearchStats | None = None,
                           jobs: int = 1) -> Iterator[Explanation]:
    """All explanations within the size bounds, by (|E|+|F|, E, F).

    Added atoms range over the constants of the theory and observation plus
    ``with_fresh`` canonical fresh constants; deleted atoms over B.
    """
    obs = frozenset(obs)
    adds = add_universe(theory, obs, with_fresh)
    dels = sorted(theory.abducible_facts)
    space = _Space(theory, obs, adds, kind, literal_c, cap)
    return _explanations(space, max_add, max_del, adds, dels, candidate_cap=candidate_cap, stats=stats,
                         jobs=jobs)


def constrained_candidates(theory: AbductiveTheory, obs: Iterable[Atom]) -> tuple[list[Atom], list[Atom]]:
    """Add/delete universes that still contain the first constrained explanation in stream order.

    Only constants of the theory and observation are needed.  Atoms already in
    B never need adding (dropping one keeps an explanation constrained and
    makes it smaller), and inert atoms never occur in the first constrained
    explanation.
    """
    adds = add_universe(theory, obs)
    b = theory.abducible_facts
    inert = inert_atoms(theory, set(adds) | b)
    adds = [a for a in adds if a not in b and a not in inert]
    dels = sorted(x for x in b if x not in inert)
    return adds, dels


def _antichain_add(family: list[frozenset], s: frozenset) -> bool:
    if any(t <= s for t in family):
        return False
    family[:] = [t for t in family if not s <= t]
    family.append(s)
    return True


def _cross(families, limit: int) -> list[frozenset]:
    out: list[frozenset] = [frozenset()]
    for fam in families:
        nxt: list[frozenset] = []
        for a in out:
            for b in fam:
                u = a | b
                if len(u) <= limit:
                    _antichain_add(nxt, u)
        out = nxt
        if not out:
            break
    return out


def minimal_supports(space: _Space, adds: Sequence[Atom], delete: frozenset[Atom], limit: int,
                     cap: int = DEFAULT_CANDIDATE_CAP) -> list[frozenset]:
    """Subset-minimal E from ``adds`` with |E| <= limit deriving O, for a Horn program without constraints."""
    supp: dict[Atom, list[frozenset]] = defaultdict(list)
    for a in space.facts - delete:
        supp[a].append(frozenset())
    for a in adds:
        _antichain_add(supp[a], frozenset({a}))
    watch: dict[Atom, list[Rule]] = defaultdict(list)
    for r in space.ground_rules:
        for a in set(r.pos):
            watch[a].append(r)
    queue = list(space.ground_rules)
    queued = set(queue)
    total = 0
    while queue:
        r = queue.pop()
        queued.discard(r)
        if any(a not in supp for a in r.pos):
            continue
        grew = False
        for u in _cross([supp[a] for a in r.pos], limit):
            if _antichain_add(supp[r.head], u):
                grew = True
                total += 1
        if total > cap:
            raise CapExceeded(f"more than {cap} partial supports")
        if grew:
            for nxt in watch.get(r.head, ()):
                if nxt not in queued:
                    queued.add(nxt)
                    queue.append(nxt)
    if any(o not in supp for o in space.obs):
        return []
    return _cross([supp[o] for o in sorted(space.obs)], limit)


def find_constrained(theory: AbductiveTheory, obs: Iterable[Atom], kind: AgreementType = AgreementType.D,
                     max_add: int = 1, max_del: int = 1, *, literal_c: bool = False,
                     cap: int = DEFAULT_ATOM_CAP, candidate_cap: int = DEFAULT_CANDIDATE_CAP,
                     occurrence_cap: int = DEFAULT_OCCURRENCE_CAP, jobs: int = 1) -> SearchResult:
    """The first explanation in stream order whose degree of arbitrariness is 0.

    For Horn programs without constraints only subset-minimal add parts are
    tried: a replacement valid for a smaller explanation with the same delete
    part stays valid for a larger one, so the first constrained explanation is
    minimal.
    """
    obs = frozenset(obs)
    stats = SearchStats()
    adds, dels = constrained_candidates(theory, obs)
    known = constants_of(theory, obs)
    xi = fresh_constant(known)
    images = abducible_atoms(theory, known | {xi})
    space = _Space(theory, obs, images, kind, literal_c, cap)

    if space.prunable and space.monotone:
        candidates = []
        for nd in range(min(max_del, len(dels)) + 1):
            for f in itertools.combinations(dels, nd):
                fs = frozenset(f)
                usable = [a for a in adds if a not in fs]
                candidates += [Explanation(e, fs) for e in minimal_supports(space, usable, fs, max_add, candidate_cap)]
        stream: Iterable[Explanation] = sorted(candidates, key=Explanation.sort_key)
    else:
        stream = _explanations(space, max_add, max_del, adds, dels, candidate_cap=candidate_cap,
                               stats=stats, jobs=jobs)
    for expl in stream:
        if space.prunable and space.monotone:
            stats.candidates_checked += 1
        if space.constrained(expl, xi, occurrence_cap):
            stray = constants_of(expl) - known
            if stray:
                raise AssertionError(f"constrained explanation uses constants outside T and O: {sorted(stray)}")
            return SearchResult(expl, stats, max_add, max_del)
    return SearchResult(None, stats, max_add, max_del)


def iter_constrained(theory, obs, kind=AgreementType.D, max_add=1, max_del=1, **kwargs) -> Iterator[Explanation]:
    """Every constrained explanation within the bounds, in stream order."""
    obs = frozenset(obs)
    for expl in enumerate_explanations(theory, obs, kind, max_add, max_del, **kwargs):
        if is_constrained(theory, obs, expl, kind):
            yield expl


# --- filters and ranking ---------------------------------------------------------

def _proper_subpairs(expl: Explanation) -> Iterator[Explanation]:
    add, delete = sorted(expl.add), sorted(expl.delete)
    for i in range(len(add) + 1):
        for e in itertools.combinations(add, i):
            for j in range(len(delete) + 1):
                if i == len(add) and j == len(delete):
                    continue
                for f in itertools.combinations(delete, j):
                    yield Explanation(frozenset(e), frozenset(f))


def filter_subset_minimal(expls: Iterable[Explanation], theory: AbductiveTheory, obs: Iterable[Atom],
                          kind: AgreementType = AgreementType.D, **kwargs) -> list[Explanation]:
    """Explanations with no other explanation (E', F') such that E' <= E and F' <= F.

    Every such (E', F') is smaller than the candidate, so checking its proper
    sub-pairs decides minimality against the whole candidate space.
    """
    obs = frozenset(obs)
    out = []
    for expl in sorted(set(expls), key=Explanation.sort_key):
        if not any(is_explanation(theory, obs, sub, kind, **kwargs) for sub in _proper_subpairs(expl)):
            out.append(expl)
    return out


def filter_card_minimal(expls: Iterable[Explanation], theory: AbductiveTheory, obs: Iterable[Atom],
                        kind: AgreementType = AgreementType.D, max_add: int = 1, max_del: int = 1,
                        **kwargs) -> list[Explanation]:
    """Explanations of minimum |E|+|F| over the bounded candidate space."""
    expls = sorted(set(expls), key=Explanation.sort_key)
    if not expls:
        return []
    smallest = expls[0].size
    first = next(iter(enumerate_explanations(theory, obs, kind, min(max_add, smallest), min(max_del, smallest),
                                             **kwargs)), None)
    best = smallest if first is None else min(smallest, first.size)
    return [e for e in expls if e.size == best]


def rank_by_arbitrariness(expls: Iterable[Explanation], theory: AbductiveTheory, obs: Iterable[Atom],
                          kind: AgreementType = AgreementType.D, **kwargs) -> list[tuple[Explanation, int]]:
    obs = frozenset(obs)
    scored = [(e, degree(theory, obs, e, kind, **kwargs)) for e in set(expls)]
    return sorted(scored, key=lambda pair: (pair[1], pair[0].sort_key()))


# --- tractable case: non-recursive Horn programs without constraints -------------

class ClassMismatch(ValueError):
    pass


def proof_leaf_bound(theory: AbductiveTheory, obs: Iterable[Atom]) -> int:
    """Most abducible atoms any proof of the observation can use (rules unfolded)."""
    proper: dict[tuple[str, int], list[Rule]] = defaultdict(list)
    for r in theory.rules:
        if not r.is_fact():
            proper[r.head.signature].append(r)

    @lru_cache(maxsize=None)
    def leaves(sig) -> int:
        if sig in theory.abducibles:
            return 1
        return max((sum(leaves(a.signature) for a in r.pos) for r in proper.get(sig, ())), default=0)

    return sum(leaves(a.signature) for a in obs)


def _relevant_to(obs: frozenset[Atom], ground_rules: Sequence[Rule]) -> set[Atom]:
    by_head: dict[Atom, list[Rule]] = defaultdict(list)
    for r in ground_rules:
        by_head[r.head].append(r)
    seen: set[Atom] = set()
    stack = list(obs)
    while stack:
        a = stack.pop()
        if a in seen:
            continue
        seen.add(a)
        for r in by_head.get(a, ()):
            stack.extend(r.pos)
    return seen


def find_constrained_tractable(theory: AbductiveTheory, obs: Iterable[Atom],
                               stats: SearchStats | None = None) -> Explanation | None:
    """Constrained explanation with F = {} for non-recursive Horn theories without constraints.

    Candidates hold every zero-arity abducible of B, any choice of the other
    zero-arity abducibles, and at most k positive-arity abducibles that some
    proof of the observation can use, where k bounds the abducible leaves of
    an unfolded proof.  The number of candidates is polynomial in |B| + |O|.
    """
    obs = frozenset(obs)
    stats = stats if stats is not None else SearchStats()
    rules = list(theory.rules)
    graph = dependency_graph(rules)
    strata, _, non_recursive, horn = _analyse(graph, rules)
    if not (non_recursive and horn) or theory.constraints:
        raise ClassMismatch("tractable search needs a non-recursive Horn program without constraints")
    k = proof_leaf_bound(theory, obs)
    b = theory.abducible_facts
    facts = frozenset(r.head for r in rules if r.is_fact())
    zero_b = frozenset(a for a in b if a.arity == 0)
    zero_other = sorted(Atom(name) for name, arity in theory.abducibles if arity == 0 and Atom(name) not in b)
    positive = [a for a in add_universe(theory, obs) if a.arity > 0 and a not in b]

    possible = possible_atoms(rules, facts | set(positive) | set(zero_other))
    ground_rules = _relevant_instances(rules, possible)
    relevant = _relevant_to(obs, ground_rules)
    positive = [a for a in positive if a in relevant]
    evaluator = StratifiedEvaluator(ground_rules, strata)

    for size in range(k + 1):
        for chosen in itertools.combinations(positive, size):
            for nz in range(len(zero_other) + 1):
                for zs in itertools.combinations(zero_other, nz):
                    add = zero_b | frozenset(chosen) | frozenset(zs)
                    stats.candidates_checked += 1
                    if not obs <= evaluator.model(facts | add):
                        continue
                    expl = Explanation(add, frozenset())
                    if is_constrained(theory, obs, expl):
                        return expl
    return None
