"""Agreement notions A-D and explanation checking."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import AbductiveTheory, Atom, Explanation, IntegrityConstraint, Rule, constants_of
from .semantics import (
    DEFAULT_ATOM_CAP,
    eval_constraints,
    ground,
    stable_model_stratified,
    stable_models_bruteforce,
)


class AgreementType(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"

    def __lt__(self, other):
        if not isinstance(other, AgreementType):
            return NotImplemented
        return self.value < other.value

    @classmethod
    def parse(cls, text: str) -> "AgreementType":
        return cls(text.strip().upper())


ALL_TYPES = tuple(AgreementType)


def _models(rules: Sequence[Rule], cap: int) -> list[frozenset[Atom]]:
    gp = ground(rules, relevant=True)
    if gp.stratified:
        return [stable_model_stratified(gp)]
    return stable_models_bruteforce(gp, cap)


def agreement_from_models(models, constraints, obs, domain, kind: AgreementType,
                          literal_c: bool = False) -> bool:
    obs = frozenset(obs)
    sat_c = [eval_constraints(m, constraints, domain) for m in models]
    sat_o = [obs <= m for m in models]
    if kind is AgreementType.A:
        return bool(models) and all(sat_c) and all(sat_o)
    if kind is AgreementType.B:
        return bool(models) and all(sat_o) and any(sat_c)
    if kind is AgreementType.C:
        universal = all(o for c, o in zip(sat_c, sat_o) if c)
        return universal if literal_c else universal and any(sat_c)
    return any(c and o for c, o in zip(sat_c, sat_o))


def agrees(rules: Sequence[Rule], constraints: Sequence[IntegrityConstraint], obs: Iterable[Atom],
           kind: AgreementType = AgreementType.D, *, literal_c: bool = False,
           cap: int = DEFAULT_ATOM_CAP) -> bool:
    """Does the observation agree with the program and constraints under ``kind``?

    ``literal_c`` drops the existential conjunct from type C, leaving only the
    universal condition.
    """
    obs = frozenset(obs)
    domain = constants_of(rules, constraints, obs)
    return agreement_from_models(_models(rules, cap), constraints, obs, domain, kind, literal_c)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_explanation(theory: AbductiveTheory, obs: Iterable[Atom], expl: Explanation,
                      kind: AgreementType = AgreementType.D, *, literal_c: bool = False,
                      cap: int = DEFAULT_ATOM_CAP) -> Verdict:
    """Like :func:`is_explanation` but says why a candidate fails."""
    for a in sorted(expl.add | expl.delete):
        if not theory.is_abducible(a):
            return Verdict(False, f"{a} is not an abducible")
    missing = expl.delete - theory.abducible_facts
    if missing:
        shown = ", ".join(str(a) for a in sorted(missing))
        return Verdict(False, f"deleted atoms are not facts of the program: {shown}")
    rules = theory.revised_rules(expl.add, expl.delete)
    if agrees(rules, theory.constraints, obs, kind, literal_c=literal_c, cap=cap):
        return Verdict(True)
    return Verdict(False, f"observation does not agree (type {kind.value}) with the revised program")


def is_explanation(theory: AbductiveTheory, obs: Iterable[Atom], expl: Explanation,
                   kind: AgreementType = AgreementType.D, *, literal_c: bool = False,
                   cap: int = DEFAULT_ATOM_CAP) -> bool:
    return check_explanation(theory, obs, expl, kind, literal_c=literal_c, cap=cap).ok


def explanation_types(theory: AbductiveTheory, obs: Iterable[Atom], expl: Explanation, *,
                      literal_c: bool = False, cap: int = DEFAULT_ATOM_CAP) -> list[AgreementType]:
    """The agreement types under which ``expl`` explains ``obs`` (one model computation)."""
    if not all(theory.is_abducible(a) for a in expl.add | expl.delete):
        return []
    if not expl.delete <= theory.abducible_facts:
        return []
    rules = theory.revised_rules(expl.add, expl.delete)
    obs = frozenset(obs)
    models = _models(rules, cap)
    domain = constants_of(rules, theory.constraints, obs)
    return [k for k in ALL_TYPES
            if agreement_from_models(models, theory.constraints, obs, domain, k, literal_c)]
