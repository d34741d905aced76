"""Command-line front end.

Exit codes: 0 true / found, 1 false / none found, 2 usage or input error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .abduction import AgreementType, check_explanation, explanation_types
from .arbitrariness import DEFAULT_OCCURRENCE_CAP, NotAnExplanation, degree, is_constrained
from .core import CapExceeded, Explanation
from .parser import (
    ParseError,
    format_explanation,
    format_observation,
    format_theory,
    parse_dimacs,
    parse_explanation,
    parse_observation,
    parse_qdimacs,
    parse_theory,
)
from .reductions import GENERATORS, ReductionError, qbf_bruteforce, sat_bruteforce
from .search import (
    DEFAULT_CANDIDATE_CAP,
    SearchStats,
    enumerate_explanations,
    filter_card_minimal,
    filter_subset_minimal,
    find_constrained,
    rank_by_arbitrariness,
)
from .semantics import DEFAULT_ATOM_CAP, classify, ground

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e


def _load(args, need_expl: bool = False):
    if not args.theory or not args.observation:
        raise InputError("-t/--theory and -o/--observation are required")
    theory = parse_theory(_read(args.theory), args.theory)
    obs = parse_observation(_read(args.observation), theory, args.observation)
    expl = None
    if need_expl:
        if not args.explanation:
            raise InputError("-e/--explanation is required")
        expl = parse_explanation(_read(args.explanation), args.explanation)
    return theory, obs, expl


def _expl_json(expl: Explanation | None):
    if expl is None:
        return None
    return {"add": [str(a) for a in sorted(expl.add)], "del": [str(a) for a in sorted(expl.delete)]}


def _emit(args, record: dict, human: str) -> None:
    if args.json:
        print(json.dumps(record, sort_keys=True), flush=True)
    else:
        print(human, flush=True)


def _record(verdict, stats: SearchStats, expl=None, deg=None, types=None, **extra) -> dict:
    out = {"verdict": verdict, "explanation": _expl_json(expl), "degree": deg,
           "types": None if types is None else [t.value for t in types], "stats": stats.as_dict()}
    out.update(extra)
    return out


def _common(args) -> dict:
    return {"literal_c": args.agreement_c_literal, "cap": args.cap_atoms}


def cmd_check(args) -> int:
    stats = SearchStats()
    theory, obs, expl = _load(args, need_expl=True)
    kind = args.type
    verdict = check_explanation(theory, obs, expl, kind, **_common(args))
    types = explanation_types(theory, obs, expl, **_common(args))
    stats.candidates_checked = 1
    if not verdict.ok:
        _emit(args, _record(False, stats, expl, None, types, reason=verdict.reason),
              f"explanation: no ({verdict.reason})")
        return EXIT_FALSE
    d = degree(theory, obs, expl, kind, occurrence_cap=args.cap_occurrences, **_common(args))
    shown = ",".join(t.value for t in types)
    _emit(args, _record(True, stats, expl, d, types, constrained=d == 0),
          f"explanation: yes (types {shown}), constrained: {'yes' if d == 0 else 'no'}, degree: {d}")
    return EXIT_TRUE


def cmd_degree(args) -> int:
    stats = SearchStats()
    theory, obs, expl = _load(args, need_expl=True)
    d = degree(theory, obs, expl, args.type, occurrence_cap=args.cap_occurrences, **_common(args))
    _emit(args, _record(True, stats, expl, d), str(d))
    return EXIT_TRUE


def cmd_constrained(args) -> int:
    theory, obs, expl = _load(args, need_expl=bool(args.explanation))
    if expl is not None:
        stats = SearchStats()
        ok = is_constrained(theory, obs, expl, args.type, occurrence_cap=args.cap_occurrences, **_common(args))
        _emit(args, _record(ok, stats, expl, 0 if ok else None), "constrained: yes" if ok else "constrained: no")
        return EXIT_TRUE if ok else EXIT_FALSE
    result = find_constrained(theory, obs, args.type, args.max_add, args.max_del,
                              candidate_cap=args.cap_candidates, occurrence_cap=args.cap_occurrences,
                              jobs=args.jobs, **_common(args))
    bounds = {"max_add": args.max_add, "max_del": args.max_del}
    if result.found:
        _emit(args, _record(True, result.stats, result.explanation, 0, bounds=bounds),
              f"constrained explanation: {result.explanation}")
        return EXIT_TRUE
    _emit(args, _record(False, result.stats, bounds=bounds),
          f"no constrained explanation with |E| <= {args.max_add}, |F| <= {args.max_del}")
    return EXIT_FALSE


def cmd_find(args) -> int:
    theory, obs, _ = _load(args)
    stats = SearchStats()
    kw = dict(kind=args.type, max_add=args.max_add, max_del=args.max_del, with_fresh=args.with_fresh,
              candidate_cap=args.cap_candidates, **_common(args))
    stream = enumerate_explanations(theory, obs, stats=stats, jobs=args.jobs, **kw)
    deg_kw = dict(occurrence_cap=args.cap_occurrences, **_common(args))
    if args.constrained:
        stream = (e for e in stream if is_constrained(theory, obs, e, args.type, **deg_kw))
    post = args.minimality != "none" or args.rank_arbitrariness
    if not post:
        found = False
        for expl in stream:
            found = True
            _emit(args, _record(True, stats, expl, 0 if args.constrained else None), str(expl))
        return EXIT_TRUE if found else EXIT_FALSE
    expls = list(stream)
    search_kw = {k: v for k, v in kw.items() if k not in ("kind", "max_add", "max_del")}
    if args.minimality == "subset":
        expls = filter_subset_minimal(expls, theory, obs, args.type, **_common(args))
    elif args.minimality == "card":
        expls = filter_card_minimal(expls, theory, obs, args.type, args.max_add, args.max_del, **search_kw)
    if args.rank_arbitrariness:
        ranked = rank_by_arbitrariness(expls, theory, obs, args.type, **deg_kw)
    else:
        ranked = [(e, None) for e in sorted(expls, key=Explanation.sort_key)]
    for expl, d in ranked:
        _emit(args, _record(True, stats, expl, d), str(expl) if d is None else f"{expl}  degree {d}")
    return EXIT_TRUE if ranked else EXIT_FALSE


def cmd_classify(args) -> int:
    if not args.theory:
        raise InputError("-t/--theory is required")
    theory = parse_theory(_read(args.theory), args.theory)
    c = classify(ground(theory.rules, relevant=True))
    flags = {"stratified": c.stratified, "non_recursive": c.non_recursive, "horn": c.horn,
             "constraints": len(theory.constraints)}
    human = ", ".join(f"{k}: {'yes' if v is True else 'no' if v is False else v}" for k, v in flags.items())
    _emit(args, _record(True, SearchStats(), classification=flags), human)
    return EXIT_TRUE


def cmd_gen(args) -> int:
    text = _read(args.input)
    if args.kind.endswith("sat"):
        formula = parse_dimacs(text, args.input)
    else:
        formula = parse_qdimacs(text, args.input)
    gen = GENERATORS[args.kind]
    out = gen(formula, guarded=True) if args.guarded and args.kind == "thm5-qbf" else gen(formula)
    theory, obs = out[0], out[1]
    files = {"theory.abd": format_theory(theory), "observation.obs": format_observation(obs)}
    if len(out) == 3:
        files["explanation.exp"] = format_explanation(out[2])
    if args.out:
        target = Path(args.out)
        target.mkdir(parents=True, exist_ok=True)
        for name, body in files.items():
            (target / name).write_text(body)
    record = _record(True, SearchStats(), out[2] if len(out) == 3 else None,
                     files=sorted(files), rules=sum(1 for r in theory.rules if not r.is_fact()))
    human = "\n".join(f"% {name}\n{body}" for name, body in files.items()) if not args.out else \
        f"wrote {', '.join(sorted(files))} to {args.out}"
    _emit(args, record, human)
    return EXIT_TRUE


def cmd_oracle(args) -> int:
    text = _read(args.input)
    t0 = time.perf_counter()
    if args.kind == "sat":
        ok = sat_bruteforce(parse_dimacs(text, args.input))
    else:
        ok = qbf_bruteforce(parse_qdimacs(text, args.input))
    stats = SearchStats(started=t0)
    _emit(args, _record(ok, stats), "true" if ok else "false")
    return EXIT_TRUE if ok else EXIT_FALSE


def _kind(text: str) -> AgreementType:
    try:
        return AgreementType.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid type {text!r} (choose A, B, C or D)")


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abdux", description="Abductive explanations and their arbitrariness.")
    sub = p.add_subparsers(dest="command", required=True)

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("-t", "--theory")
    shared.add_argument("-o", "--observation")
    shared.add_argument("-e", "--explanation")
    shared.add_argument("--type", type=_kind, default=AgreementType.D)
    shared.add_argument("--max-add", type=_nonneg, default=2)
    shared.add_argument("--max-del", type=_nonneg, default=1)
    shared.add_argument("--with-fresh", type=_nonneg, default=0)
    shared.add_argument("--agreement-c-literal", action="store_true",
                        help="type C without the existential conjunct")
    shared.add_argument("--cap-occurrences", type=_nonneg, default=DEFAULT_OCCURRENCE_CAP)
    shared.add_argument("--cap-atoms", type=_nonneg, default=DEFAULT_ATOM_CAP)
    shared.add_argument("--cap-candidates", type=_nonneg, default=DEFAULT_CANDIDATE_CAP)
    shared.add_argument("--jobs", type=_nonneg, default=1)
    shared.add_argument("--json", action="store_true")

    sub.add_parser("check", parents=[shared], help="is -e an explanation; its types and degree").set_defaults(
        func=cmd_check)
    sub.add_parser("degree", parents=[shared], help="degree of arbitrariness of -e").set_defaults(func=cmd_degree)
    sub.add_parser("constrained", parents=[shared],
                   help="is -e constrained; without -e, search for a constrained explanation").set_defaults(
        func=cmd_constrained)
    find = sub.add_parser("find", parents=[shared], help="enumerate explanations within the size bounds")
    find.add_argument("--constrained", action="store_true", help="only constrained explanations")
    find.add_argument("--minimality", choices=("none", "subset", "card"), default="none")
    find.add_argument("--rank-arbitrariness", action="store_true")
    find.set_defaults(func=cmd_find)
    sub.add_parser("classify", parents=[shared], help="stratified / non-recursive / Horn flags").set_defaults(
        func=cmd_classify)

    gen = sub.add_parser("gen", help="reduction instance from a DIMACS/QDIMACS file")
    gen.add_argument("kind", choices=sorted(GENERATORS))
    gen.add_argument("input")
    gen.add_argument("--out", help="directory for theory.abd, observation.obs, explanation.exp")
    gen.add_argument("--guarded", action="store_true", help="thm5-qbf: copy X truth values only for X")
    gen.add_argument("--json", action="store_true")
    gen.set_defaults(func=cmd_gen)

    oracle = sub.add_parser("oracle", help="brute-force SAT / exists-forall QBF")
    oracle.add_argument("kind", choices=("sat", "qbf"))
    oracle.add_argument("input")
    oracle.add_argument("--json", action="store_true")
    oracle.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, InputError, ReductionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NotAnExplanation as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FALSE
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); silence the final flush
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_TRUE


if __name__ == "__main__":
    sys.exit(main())
