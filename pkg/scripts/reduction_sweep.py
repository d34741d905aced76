"""Check the hardness reductions against brute-force SAT/QBF oracles.

CNF generators are swept exhaustively up to --vars/--clauses; QBF generators
are sampled (admissible instances only).  One CSV row per instance goes to --csv.
"""

import argparse
import csv
import random
import sys
import time

from abdux.arbitrariness import is_constrained
from abdux.parser import format_dimacs, format_qdimacs
from abdux.random_instances import all_cnfs, random_qbf
from abdux.reductions import (GENERATORS, ReductionError, allfalse_precondition, gen_thm5_qbf, qbf_bruteforce,
                              sat_bruteforce)
from abdux.search import find_constrained

SAT_KINDS = ("thm4-sat", "thm5-sat", "thm6-sat")
QBF_KINDS = ("thm4-qbf", "thm5-qbf", "thm5-qbf-guarded")


def sat_rows(kind, max_vars, max_clauses):
    for cnf in all_cnfs(max_vars, max_clauses):
        try:
            theory, obs, u = GENERATORS[kind](cnf)
        except ReductionError:
            continue
        t0 = time.perf_counter()
        verdict = is_constrained(theory, obs, u)
        truth = sat_bruteforce(cnf)
        yield kind, format_dimacs(cnf).replace("\n", " "), not truth, verdict, time.perf_counter() - t0


def qbf_rows(kind, samples, seed):
    rng = random.Random(seed)
    seen = []
    while len(seen) < samples:
        q = random_qbf(rng, min_x=0 if kind == "thm4-qbf" else 1)
        if allfalse_precondition(q) and q not in seen:
            seen.append(q)
    for q in seen:
        if kind == "thm4-qbf":
            theory, obs = GENERATORS[kind](q)
            bound = len(q.exists) + len(q.forall)
        else:
            theory, obs = gen_thm5_qbf(q, guarded=kind.endswith("guarded"))
            bound = len(q.exists) + len(q.forall) + 1
        t0 = time.perf_counter()
        found = find_constrained(theory, obs, max_add=bound, max_del=0).found
        yield kind, format_qdimacs(q).replace("\n", " "), qbf_bruteforce(q), found, time.perf_counter() - t0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("kinds", nargs="*", default=list(SAT_KINDS + QBF_KINDS),
                    choices=list(SAT_KINDS + QBF_KINDS))
    ap.add_argument("--vars", type=int, default=3)
    ap.add_argument("--clauses", type=int, default=3)
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--csv")
    args = ap.parse_args(argv)

    out = csv.writer(open(args.csv, "w", newline="")) if args.csv else None
    if out:
        out.writerow(["generator", "formula", "expected", "got", "seconds"])
    failed = False
    for kind in args.kinds:
        rows = sat_rows(kind, args.vars, args.clauses) if kind in SAT_KINDS else qbf_rows(kind, args.samples, args.seed)
        n = bad = 0
        total = 0.0
        for row in rows:
            n += 1
            bad += row[2] != row[3]
            total += row[4]
            if out:
                out.writerow(row)
        failed |= bad > 0
        print(f"{kind:18} {n:5} instances  {bad:3} mismatches  {total:7.1f}s")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
