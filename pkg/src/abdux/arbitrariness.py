"""Occurrences, replacement functions and the degree of arbitrariness."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .abduction import AgreementType, is_explanation
from .core import (
    AbductiveTheory,
    Atom,
    CapExceeded,
    Explanation,
    Occurrence,
    constants_of,
    fresh_constant,
)
from .semantics import DEFAULT_ATOM_CAP

DEFAULT_OCCURRENCE_CAP = 20


class NotAnExplanation(ValueError):
    pass


@dataclass(frozen=True)
class ReplacementFunction:
    constant: str
    occurrences: frozenset[Occurrence]

    def __post_init__(self):
        object.__setattr__(self, "occurrences", frozenset(self.occurrences))
        if not self.occurrences:
            raise ValueError("a replacement function needs a non-empty occurrence set")
        for occ in self.occurrences:
            if occ.constant != self.constant:
                raise ValueError(f"occurrence {occ} does not refer to {self.constant}")

    def sort_key(self):
        return (self.constant, len(self.occurrences), sorted(self.occurrences))

    def __str__(self) -> str:
        occs = ", ".join(str(o) for o in sorted(self.occurrences))
        return f"{self.constant} @ {{{occs}}}"


def occurrences(atoms: Iterable[Atom], constant: str) -> frozenset[Occurrence]:
    return frozenset(
        Occurrence(a, k)
        for a in atoms
        for k, arg in enumerate(a.args, 1)
        if arg == constant
    )


def apply_replacement(f: ReplacementFunction, atoms: Iterable[Atom], x: str) -> frozenset[Atom]:
    """Rewrite exactly the occurrences named by ``f`` to ``x``; atoms may merge."""
    atoms = frozenset(atoms)
    positions: dict[Atom, set[int]] = defaultdict(set)
    for occ in f.occurrences:
        if occ.atom not in atoms:
            raise ValueError(f"stale occurrence {occ}: atom not in the set")
        positions[occ.atom].add(occ.position)
    out = set()
    for a in atoms:
        ks = positions.get(a)
        if ks:
            a = Atom(a.pred, tuple(x if k in ks else arg for k, arg in enumerate(a.args, 1)))
        out.add(a)
    return frozenset(out)


def independent(f1: ReplacementFunction, f2: ReplacementFunction) -> bool:
    return f1.constant != f2.constant or not (f1.occurrences & f2.occurrences)


def candidate_replacements(atoms: Iterable[Atom], cap: int = DEFAULT_OCCURRENCE_CAP) -> Iterator[ReplacementFunction]:
    """All replacement functions for ``atoms``: per constant, every non-empty occurrence subset."""
    atoms = frozenset(atoms)
    consts = sorted(constants_of(atoms))
    per_constant = [sorted(occurrences(atoms, c)) for c in consts]
    total = sum(len(o) for o in per_constant)
    if total > cap:
        raise CapExceeded(f"{total} occurrences exceed the cap of {cap}")
    for c, occs in zip(consts, per_constant):
        for size in range(1, len(occs) + 1):
            for chosen in itertools.combinations(occs, size):
                yield ReplacementFunction(c, frozenset(chosen))


def replacement_constant(theory: AbductiveTheory, obs: Iterable[Atom], expl: Explanation) -> str:
    """The fresh constant used for replacements: avoids the theory (constraints included), O and Δ."""
    return fresh_constant(constants_of(theory, obs, expl))


def _require_explanation(theory, obs, expl, kind, literal_c, cap):
    if not is_explanation(theory, obs, expl, kind, literal_c=literal_c, cap=cap):
        raise NotAnExplanation(f"{expl} is not an explanation")


def _is_valid(f, theory, obs, expl, kind, xi, literal_c, cap) -> bool:
    replaced = Explanation(apply_replacement(f, expl.add, xi), expl.delete)
    return is_explanation(theory, obs, replaced, kind, literal_c=literal_c, cap=cap)


def valid_replacements(theory: AbductiveTheory, obs: Iterable[Atom], expl: Explanation,
                       kind: AgreementType = AgreementType.D, *, xi: str | None = None,
                       occurrence_cap: int = DEFAULT_OCCURRENCE_CAP, literal_c: bool = False,
                       cap: int = DEFAULT_ATOM_CAP) -> list[ReplacementFunction]:
    """Replacement functions over E whose image at a fresh constant is still an explanation."""
    obs = frozenset(obs)
    _require_explanation(theory, obs, expl, kind, literal_c, cap)
    if xi is None:
        xi = replacement_constant(theory, obs, expl)
    elif xi in constants_of(theory, obs, expl):
        raise ValueError(f"{xi} is not fresh")
    return [f for f in candidate_replacements(expl.add, occurrence_cap)
            if _is_valid(f, theory, obs, expl, kind, xi, literal_c, cap)]


def max_disjoint_packing(sets: Iterable[frozenset]) -> int:
    """Largest number of pairwise-disjoint sets among ``sets`` (exact, memoised on bitmasks)."""
    sets = list({frozenset(s) for s in sets if s})
    if not sets:
        return 0
    elements = sorted({e for s in sets for e in s})
    bit = {e: 1 << i for i, e in enumerate(elements)}
    masks = [sum(bit[e] for e in s) for s in sets]
    by_low: dict[int, list[int]] = defaultdict(list)
    for m in masks:
        rest = m
        while rest:
            low = rest & -rest
            by_low[low].append(m)
            rest ^= low

    @lru_cache(maxsize=None)
    def best(avail: int) -> int:
        if not avail:
            return 0
        low = avail & -avail
        result = best(avail ^ low)
        for m in by_low.get(low, ()):
            if m & avail == m:
                result = max(result, 1 + best(avail & ~m))
        return result

    return best((1 << len(elements)) - 1)


def degree_from_replacements(valid: Iterable[ReplacementFunction]) -> int:
    by_constant: dict[str, list[frozenset[Occurrence]]] = defaultdict(list)
    for f in valid:
        by_constant[f.constant].append(f.occurrences)
    return sum(max_disjoint_packing(sets) for sets in by_constant.values())


def degree(theory: AbductiveTheory, obs: Iterable[Atom], expl: Explanation,
           kind: AgreementType = AgreementType.D, **kwargs) -> int:
    """Maximum number of pairwise independent valid replacement functions.

    Functions for different constants are always independent, so the maximum
    is the sum over constants of the largest disjoint packing of valid
    occurrence sets.
    """
    return degree_from_replacements(valid_replacements(theory, obs, expl, kind, **kwargs))


def is_constrained(theory: AbductiveTheory, obs: Iterable[Atom], expl: Explanation,
                   kind: AgreementType = AgreementType.D, *, xi: str | None = None,
                   occurrence_cap: int = DEFAULT_OCCURRENCE_CAP, literal_c: bool = False,
                   cap: int = DEFAULT_ATOM_CAP) -> bool:
    """Degree zero, decided by stopping at the first valid replacement."""
    obs = frozenset(obs)
    _require_explanation(theory, obs, expl, kind, literal_c, cap)
    if xi is None:
        xi = replacement_constant(theory, obs, expl)
    for f in candidate_replacements(expl.add, occurrence_cap):
        if _is_valid(f, theory, obs, expl, kind, xi, literal_c, cap):
            return False
    stray = constants_of(expl) - constants_of(theory, obs)
    if stray:
        raise AssertionError(f"constrained explanation uses constants outside T and O: {sorted(stray)}")
    return True
