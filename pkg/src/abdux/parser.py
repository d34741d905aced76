"""Text formats: theories, observations, explanations, DIMACS CNF and QDIMACS.

Lexical convention follows Prolog: variables start with an uppercase letter,
constants are lowercase identifiers or integers. ``%`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    FRESH_SIGIL,
    AbductiveTheory,
    Atom,
    Explanation,
    IntegrityConstraint,
    Rule,
    TheoryError,
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    col_start: int
    col_end: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col_start}-{self.col_end}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<directive>\#[a-z]+)
  | (?P<neck>:-)
  | (?P<fresh>@[0-9]+)
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<punct>[(),.|/])
    """,
    re.VERBOSE,
)

DIRECTIVES = {"#abducible", "#ic", "#add", "#del"}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    span: SourceSpan


def _tokenize(text: str, file: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(file, line, col, col))
        kind = m.lastgroup
        lexeme = m.group()
        if kind != "ws":
            span = SourceSpan(file, line, col, col + len(lexeme) - 1)
            if kind == "directive" and lexeme not in DIRECTIVES:
                raise ParseError(f"unknown directive {lexeme}", span)
            toks.append(_Tok(kind, lexeme, span))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + lexeme.rindex("\n") + 1
        pos = m.end()
    end_col = len(text) - line_start + 1
    toks.append(_Tok("eof", "", SourceSpan(file, line, end_col, end_col)))
    return toks


class _Parser:
    def __init__(self, text: str, file: str, allow_fresh: bool = False):
        self.toks = _tokenize(text, file)
        self.i = 0
        self.allow_fresh = allow_fresh

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.span)

    def take(self, text: str | None = None, kind: str | None = None) -> _Tok:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text is not None else kind
            got = repr(t.text) if t.kind != "eof" else "end of input"
            self.error(f"expected {want}, found {got}")
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text

    def term(self) -> str:
        t = self.tok
        if t.kind in ("var", "ident", "int"):
            self.i += 1
            return t.text
        if t.kind == "fresh":
            if not self.allow_fresh:
                self.error(f"reserved constant {t.text} is not allowed here")
            self.i += 1
            return t.text
        self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def atom(self) -> tuple[Atom, SourceSpan]:
        name = self.tok
        if name.kind != "ident" or name.text == "not":
            self.error(f"expected a predicate name, found {name.text or 'end of input'!r}")
        self.i += 1
        args: list[str] = []
        if self.at("("):
            self.take("(")
            args.append(self.term())
            while self.at(","):
                self.take(",")
                args.append(self.term())
            self.take(")")
        return Atom(name.text, tuple(args)), name.span

    def literal(self) -> tuple[bool, Atom, SourceSpan]:
        negated = False
        if self.tok.kind == "ident" and self.tok.text == "not" and self.toks[self.i + 1].kind == "ident":
            self.i += 1
            negated = True
        a, span = self.atom()
        return negated, a, span

    def body(self):
        pos, neg = [], []
        while True:
            negated, a, _ = self.literal()
            (neg if negated else pos).append(a)
            if not self.at(","):
                return tuple(pos), tuple(neg)
            self.take(",")


def _span_join(a: SourceSpan, b: SourceSpan) -> SourceSpan:
    if a.line == b.line:
        return SourceSpan(a.file, a.line, a.col_start, max(a.col_end, b.col_end))
    return a


def parse_theory(text: str, file: str = "<theory>") -> AbductiveTheory:
    p = _Parser(text, file)
    rules: list[tuple[Rule, SourceSpan]] = []
    constraints: list[tuple[IntegrityConstraint, SourceSpan]] = []
    abducibles: dict[tuple[str, int], SourceSpan] = {}
    while p.tok.kind != "eof":
        start = p.tok
        if start.text == "#abducible":
            p.take()
            name = p.take(kind="ident")
            p.take("/")
            arity = p.take(kind="int")
            p.take(".")
            abducibles[(name.text, int(arity.text))] = start.span
        elif start.text == "#ic":
            p.take()
            head = []
            if not p.at(":-"):
                head.append(p.atom()[0])
                while p.at("|"):
                    p.take("|")
                    head.append(p.atom()[0])
            p.take(":-")
            pos, neg = p.body()
            end = p.take(".")
            ic = IntegrityConstraint(pos, neg, tuple(head))
            span = _span_join(start.span, end.span)
            unsafe = ic.unsafe_variables()
            if unsafe:
                raise ParseError(f"unsafe constraint: variables {sorted(unsafe)} occur in no positive body atom", span)
            constraints.append((ic, span))
        elif start.kind == "directive":
            p.error(f"directive {start.text} is not allowed in a theory")
        else:
            head, _ = p.atom()
            pos, neg = (), ()
            if p.at(":-"):
                p.take(":-")
                pos, neg = p.body()
            end = p.take(".")
            rule = Rule(head, pos, neg)
            span = _span_join(start.span, end.span)
            unsafe = rule.unsafe_variables()
            if unsafe:
                raise ParseError(f"unsafe rule: variables {sorted(unsafe)} occur in no positive body atom", span)
            rules.append((rule, span))

    arities: dict[str, tuple[int, SourceSpan]] = {}

    def note(a: Atom, span: SourceSpan):
        seen = arities.setdefault(a.pred, (a.arity, span))
        if seen[0] != a.arity:
            raise ParseError(f"predicate {a.pred} used with arity {a.arity} and {seen[0]}", span)

    for (name, arity), span in abducibles.items():
        note(Atom(name, ("_",) * arity), span)
    for r, span in rules:
        for a in (r.head, *r.pos, *r.neg):
            note(a, span)
    for c, span in constraints:
        for a in c.atoms():
            note(a, span)
    for r, span in rules:
        if r.head.signature in abducibles and not r.is_fact():
            raise ParseError(f"rule with abducible head {r.head.pred}/{r.head.arity} must be a ground fact", span)
    try:
        return AbductiveTheory(tuple(r for r, _ in rules), frozenset(abducibles),
                               tuple(c for c, _ in constraints))
    except TheoryError as e:  # pragma: no cover - caught above with a span
        raise ParseError(str(e), SourceSpan(file, 1, 1, 1)) from e


def parse_observation(text: str, theory: AbductiveTheory | None = None,
                      file: str = "<observation>") -> frozenset[Atom]:
    p = _Parser(text, file)
    out = set()
    while p.tok.kind != "eof":
        a, span = p.atom()
        p.take(".")
        if not a.is_ground():
            raise ParseError(f"observation atom {a} is not ground", span)
        if theory is not None and theory.is_abducible(a):
            raise ParseError(f"observation atom {a} has an abducible predicate", span)
        out.add(a)
    return frozenset(out)


def parse_explanation(text: str, file: str = "<explanation>") -> Explanation:
    p = _Parser(text, file, allow_fresh=True)
    add, delete = set(), set()
    while p.tok.kind != "eof":
        d = p.tok
        if d.text not in ("#add", "#del"):
            p.error(f"expected #add or #del, found {d.text!r}")
        p.take()
        a, span = p.atom()
        p.take(".")
        if not a.is_ground():
            raise ParseError(f"explanation atom {a} is not ground", span)
        (add if d.text == "#add" else delete).add(a)
        if a in add and a in delete:
            raise ParseError(f"{a} is both added and deleted (add and delete sets must be disjoint)", span)
    return Explanation(frozenset(add), frozenset(delete))


# --- pretty printing -------------------------------------------------------------

def format_theory(theory: AbductiveTheory) -> str:
    lines = [str(r) for r in theory.rules]
    lines += [str(c) for c in theory.constraints]
    lines += [f"#abducible {name}/{arity}." for name, arity in sorted(theory.abducibles)]
    return "\n".join(lines) + "\n"


def format_observation(obs) -> str:
    return "".join(f"{a}.\n" for a in sorted(obs))


def format_explanation(expl: Explanation) -> str:
    lines = [f"#add {a}." for a in sorted(expl.add)]
    lines += [f"#del {a}." for a in sorted(expl.delete)]
    return "".join(line + "\n" for line in lines)


# --- DIMACS / QDIMACS ---------------------------------------------------------

@dataclass(frozen=True)
class CNF:
    """Clauses of DIMACS literals over variables 1..num_vars (named y1..yn)."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class QBF:
    """exists X forall Y G, with G in disjunctive normal form.

    ``terms`` are conjunctions of DIMACS literals; variables in ``exists`` are
    named x1..xk and those in ``forall`` y1..yn, in listed order.
    """

    num_vars: int
    exists: tuple[int, ...]
    forall: tuple[int, ...]
    terms: tuple[tuple[int, ...], ...]


def _dimacs_lines(text: str, file: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        yield n, raw, line


def _literals(line: str, n: int, raw: str, file: str, num_vars: int) -> list[int]:
    out = []
    col = 1
    for tok in line.split():
        col = raw.index(tok, col - 1) + 1
        span = SourceSpan(file, n, col, col + len(tok) - 1)
        try:
            lit = int(tok)
        except ValueError:
            raise ParseError(f"expected an integer literal, found {tok!r}", span) from None
        if abs(lit) > num_vars:
            raise ParseError(f"variable {abs(lit)} out of range 1..{num_vars}", span)
        out.append(lit)
        col += len(tok)
    return out


def _header(lines, kind: str, file: str):
    for n, raw, line in lines:
        parts = line.split()
        span = SourceSpan(file, n, 1, len(raw))
        if parts[0] != "p" or len(parts) != 4 or parts[1] != kind:
            raise ParseError(f"expected header 'p {kind} <vars> <clauses>'", span)
        try:
            return int(parts[2]), int(parts[3]), span
        except ValueError:
            raise ParseError("malformed header counts", span) from None
    raise ParseError("missing header", SourceSpan(file, 1, 1, 1))


def _clauses(lines, file: str, num_vars: int, num_clauses: int, header_span: SourceSpan):
    clauses, current = [], []
    last = header_span
    for n, raw, line in lines:
        last = SourceSpan(file, n, 1, max(1, len(raw)))
        for lit in _literals(line, n, raw, file, num_vars):
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        raise ParseError("last clause is not terminated by 0", last)
    if len(clauses) != num_clauses:
        raise ParseError(f"header announces {num_clauses} clauses, found {len(clauses)}", header_span)
    return tuple(clauses)


def parse_dimacs(text: str, file: str = "<cnf>") -> CNF:
    lines = iter(list(_dimacs_lines(text, file)))
    num_vars, num_clauses, span = _header(lines, "cnf", file)
    return CNF(num_vars, _clauses(lines, file, num_vars, num_clauses, span))


def parse_qdimacs(text: str, file: str = "<qdimacs>") -> QBF:
    """QDIMACS with prefix ``e ... 0`` then ``a ... 0``; matrix lines are read as DNF terms."""
    lines = list(_dimacs_lines(text, file))
    it = iter(lines)
    num_vars, num_terms, span = _header(it, "cnf", file)
    rest = list(it)
    blocks = []
    while rest and rest[0][2].split()[0] in ("e", "a"):
        n, raw, line = rest.pop(0)
        q, *nums = line.split()
        lits = _literals(" ".join(nums), n, raw, file, num_vars)
        if not lits or lits[-1] != 0 or any(v <= 0 for v in lits[:-1]):
            raise ParseError("quantifier block must list positive variables and end with 0",
                             SourceSpan(file, n, 1, len(raw)))
        blocks.append((q, tuple(lits[:-1]), SourceSpan(file, n, 1, len(raw))))
    kinds = "".join(q for q, _, _ in blocks)
    if kinds not in ("ea", "a", "e"):
        where = blocks[0][2] if blocks else span
        raise ParseError(f"unsupported quantifier prefix {kinds!r}; expected 'e' block then 'a' block", where)
    exists = next((v for q, v, _ in blocks if q == "e"), ())
    forall = next((v for q, v, _ in blocks if q == "a"), ())
    if set(exists) & set(forall):
        raise ParseError("a variable is quantified twice", blocks[-1][2])
    terms = _clauses(iter(rest), file, num_vars, num_terms, span)
    bound = set(exists) | set(forall)
    for t in terms:
        for lit in t:
            if abs(lit) not in bound:
                raise ParseError(f"variable {abs(lit)} is free", span)
    return QBF(num_vars, tuple(exists), tuple(forall), terms)


def format_dimacs(cnf: CNF) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    lines += [" ".join(str(lit) for lit in (*c, 0)) for c in cnf.clauses]
    return "\n".join(lines) + "\n"


def format_qdimacs(qbf: QBF) -> str:
    lines = [f"p cnf {qbf.num_vars} {len(qbf.terms)}"]
    if qbf.exists:
        lines.append("e " + " ".join(str(v) for v in (*qbf.exists, 0)))
    if qbf.forall:
        lines.append("a " + " ".join(str(v) for v in (*qbf.forall, 0)))
    lines += [" ".join(str(lit) for lit in (*t, 0)) for t in qbf.terms]
    return "\n".join(lines) + "\n"
