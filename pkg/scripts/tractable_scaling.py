"""Wall time of the non-recursive Horn fast path as the fact base grows.

Prints one line per size and the slope of log(time) against log(|facts|).
"""

import argparse
import math
import random
import statistics
import time

from abdux.random_instances import horn_chain_theory
from abdux.search import find_constrained, find_constrained_tractable, proof_leaf_bound


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 20, 40, 80, 120, 160, 200, 300])
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--compare", action="store_true", help="also time bounded generic search")
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    xs, ys = [], []
    print(f"{'facts':>6} {'|B|':>5} {'fast s':>9}" + (f" {'generic s':>10}" if args.compare else ""))
    for n in args.sizes:
        fast, slow, b = [], [], []
        for _ in range(args.reps):
            theory, obs = horn_chain_theory(rng, n)
            b.append(len(theory.abducible_facts))
            t0 = time.perf_counter()
            find_constrained_tractable(theory, obs)
            fast.append(time.perf_counter() - t0)
            if args.compare:
                t0 = time.perf_counter()
                find_constrained(theory, obs, max_add=proof_leaf_bound(theory, obs), max_del=0)
                slow.append(time.perf_counter() - t0)
        med = statistics.median(fast)
        xs.append(math.log(n))
        ys.append(math.log(med))
        line = f"{n:6} {statistics.median(b):5.0f} {med:9.4f}"
        if args.compare:
            line += f" {statistics.median(slow):10.4f}"
        print(line)
    print(f"fitted exponent: {statistics.linear_regression(xs, ys).slope:.2f}")


if __name__ == "__main__":
    main()
