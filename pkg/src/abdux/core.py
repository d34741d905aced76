"""Vocabulary-level types: atoms, rules, constraints, theories, explanations."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

FRESH_SIGIL = "@"


def is_variable(term: str) -> bool:
    return term[:1].isupper()


def is_fresh(term: str) -> bool:
    return term.startswith(FRESH_SIGIL)


@functools.total_ordering
@dataclass(frozen=True, eq=False)
class Atom:
    pred: str
    args: tuple[str, ...] = ()
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.pred, self.args)))

    # hand-written because atoms are hashed and compared in every inner loop
    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Atom):
            return NotImplemented
        return self._hash == other._hash and self.pred == other.pred and self.args == other.args

    def __lt__(self, other) -> bool:
        if not isinstance(other, Atom):
            return NotImplemented
        return (self.pred, self.args) < (other.pred, other.args)

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def signature(self) -> tuple[str, int]:
        return (self.pred, len(self.args))

    def is_ground(self) -> bool:
        return not any(is_variable(a) for a in self.args)

    def variables(self) -> set[str]:
        return {a for a in self.args if is_variable(a)}

    def substitute(self, binding: Mapping[str, str]) -> "Atom":
        if not self.args:
            return self
        return Atom(self.pred, tuple(binding.get(a, a) for a in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(self.args)})"


def atom(text: str) -> Atom:
    """Shorthand constructor: ``atom("p(a,X)")``. No validation beyond splitting."""
    text = text.strip()
    if "(" not in text:
        return Atom(text)
    pred, rest = text.split("(", 1)
    args = tuple(a.strip() for a in rest.rstrip(")").split(","))
    return Atom(pred.strip(), args)


@dataclass(frozen=True)
class Rule:
    head: Atom
    pos: tuple[Atom, ...] = ()
    neg: tuple[Atom, ...] = ()

    def is_fact(self) -> bool:
        return not self.pos and not self.neg and self.head.is_ground()

    def is_ground(self) -> bool:
        return all(a.is_ground() for a in (self.head, *self.pos, *self.neg))

    def variables(self) -> set[str]:
        out = self.head.variables()
        for a in itertools.chain(self.pos, self.neg):
            out |= a.variables()
        return out

    def unsafe_variables(self) -> set[str]:
        bound: set[str] = set()
        for a in self.pos:
            bound |= a.variables()
        return self.variables() - bound

    def substitute(self, binding: Mapping[str, str]) -> "Rule":
        return Rule(
            self.head.substitute(binding),
            tuple(a.substitute(binding) for a in self.pos),
            tuple(a.substitute(binding) for a in self.neg),
        )

    def __str__(self) -> str:
        if not self.pos and not self.neg:
            return f"{self.head}."
        body = [str(a) for a in self.pos] + [f"not {a}" for a in self.neg]
        return f"{self.head} :- {', '.join(body)}."


def fact(a: Atom) -> Rule:
    return Rule(a)


@dataclass(frozen=True)
class IntegrityConstraint:
    """Universally closed ``pos & not neg -> head_1 | ... | head_m``; m = 0 is a denial."""

    pos: tuple[Atom, ...]
    neg: tuple[Atom, ...] = ()
    head: tuple[Atom, ...] = ()

    def atoms(self) -> tuple[Atom, ...]:
        return (*self.head, *self.pos, *self.neg)

    def unsafe_variables(self) -> set[str]:
        bound: set[str] = set()
        for a in self.pos:
            bound |= a.variables()
        used: set[str] = set()
        for a in self.atoms():
            used |= a.variables()
        return used - bound

    def substitute(self, binding: Mapping[str, str]) -> "IntegrityConstraint":
        return IntegrityConstraint(
            tuple(a.substitute(binding) for a in self.pos),
            tuple(a.substitute(binding) for a in self.neg),
            tuple(a.substitute(binding) for a in self.head),
        )

    def __str__(self) -> str:
        body = [str(a) for a in self.pos] + [f"not {a}" for a in self.neg]
        head = " | ".join(str(a) for a in self.head)
        lead = f"#ic {head} :- " if head else "#ic :- "
        return lead + ", ".join(body) + "."


class TheoryError(ValueError):
    pass


class CapExceeded(RuntimeError):
    """A configured resource cap (atoms, occurrences, candidates) was hit."""


@dataclass(frozen=True)
class AbductiveTheory:
    rules: tuple[Rule, ...]
    abducibles: frozenset[tuple[str, int]]
    constraints: tuple[IntegrityConstraint, ...] = ()

    def __post_init__(self):
        for r in self.rules:
            if r.head.signature in self.abducibles and not r.is_fact():
                raise TheoryError(f"rule with abducible head must be a ground fact: {r}")

    def is_abducible(self, a: Atom) -> bool:
        return a.signature in self.abducibles

    @property
    def abducible_facts(self) -> frozenset[Atom]:
        """B: the ground abducible facts of the program."""
        return frozenset(r.head for r in self.rules if self.is_abducible(r.head))

    @property
    def remainder(self) -> tuple[Rule, ...]:
        """R: every rule that is not an abducible fact."""
        return tuple(r for r in self.rules if not self.is_abducible(r.head))

    def revised_rules(self, add: Iterable[Atom], delete: Iterable[Atom]) -> list[Rule]:
        """Rules of (P u E) \\ F."""
        delete = set(delete)
        kept = [r for r in self.rules if not (r.is_fact() and r.head in delete)]
        present = {r.head for r in kept if r.is_fact()}
        kept.extend(Rule(a) for a in sorted(set(add)) if a not in present and a not in delete)
        return kept


@dataclass(frozen=True)
class Explanation:
    add: frozenset[Atom] = frozenset()
    delete: frozenset[Atom] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "add", frozenset(self.add))
        object.__setattr__(self, "delete", frozenset(self.delete))
        overlap = self.add & self.delete
        if overlap:
            shown = ", ".join(str(a) for a in sorted(overlap))
            raise ValueError(f"add and delete sets are not disjoint: {shown}")
        for a in self.add | self.delete:
            if not a.is_ground():
                raise ValueError(f"explanation atom is not ground: {a}")

    @property
    def size(self) -> int:
        return len(self.add) + len(self.delete)

    def sort_key(self):
        return (self.size, tuple(sorted(self.add)), tuple(sorted(self.delete)))

    def __str__(self) -> str:
        add = ", ".join(str(a) for a in sorted(self.add))
        delete = ", ".join(str(a) for a in sorted(self.delete))
        return f"({{{add}}}, {{{delete}}})"


@dataclass(frozen=True, order=True)
class Occurrence:
    atom: Atom
    position: int  # 1-based

    @property
    def constant(self) -> str:
        return self.atom.args[self.position - 1]

    def __str__(self) -> str:
        return f"{self.atom}^{self.position}"


def constants_of(*items) -> set[str]:
    """Constants syntactically occurring in theories, explanations, atoms, rules or collections of them."""
    out: set[str] = set()
    for item in items:
        _collect_constants(item, out)
    return out


def _collect_constants(item, out: set[str]) -> None:
    if isinstance(item, Atom):
        out.update(a for a in item.args if not is_variable(a))
    elif isinstance(item, Rule):
        for a in (item.head, *item.pos, *item.neg):
            _collect_constants(a, out)
    elif isinstance(item, IntegrityConstraint):
        for a in item.atoms():
            _collect_constants(a, out)
    elif isinstance(item, AbductiveTheory):
        for r in item.rules:
            _collect_constants(r, out)
        for c in item.constraints:
            _collect_constants(c, out)
    elif isinstance(item, Explanation):
        for a in item.add | item.delete:
            _collect_constants(a, out)
    elif isinstance(item, Occurrence):
        _collect_constants(item.atom, out)
    elif isinstance(item, str):
        raise TypeError("constants_of expects structured values, not strings")
    else:
        for sub in item:
            _collect_constants(sub, out)


def fresh_constant(avoid: Iterable[str]) -> str:
    """Lowest-indexed constant of the reserved ``@k`` namespace not in ``avoid``."""
    avoid = set(avoid)
    for i in itertools.count():
        candidate = f"{FRESH_SIGIL}{i}"
        if candidate not in avoid:
            return candidate
    raise AssertionError("unreachable")


def rename(value, mapping: Mapping[str, str]):
    """Apply a constant renaming uniformly to any core value (or set/tuple/list of them)."""
    if isinstance(value, Atom):
        return Atom(value.pred, tuple(mapping.get(a, a) for a in value.args))
    if isinstance(value, Rule):
        return Rule(rename(value.head, mapping), tuple(rename(a, mapping) for a in value.pos),
                    tuple(rename(a, mapping) for a in value.neg))
    if isinstance(value, IntegrityConstraint):
        return IntegrityConstraint(tuple(rename(a, mapping) for a in value.pos),
                                   tuple(rename(a, mapping) for a in value.neg),
                                   tuple(rename(a, mapping) for a in value.head))
    if isinstance(value, AbductiveTheory):
        return AbductiveTheory(tuple(rename(r, mapping) for r in value.rules), value.abducibles,
                               tuple(rename(c, mapping) for c in value.constraints))
    if isinstance(value, Explanation):
        return Explanation(frozenset(rename(a, mapping) for a in value.add),
                           frozenset(rename(a, mapping) for a in value.delete))
    if isinstance(value, (set, frozenset)):
        return frozenset(rename(v, mapping) for v in value)
    if isinstance(value, (list, tuple)):
        return type(value)(rename(v, mapping) for v in value)
    raise TypeError(f"cannot rename {type(value).__name__}")

