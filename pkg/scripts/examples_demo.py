"""Degrees and preferred explanations for the bundled worked examples."""

from importlib import resources

from abdux.arbitrariness import degree, is_constrained
from abdux.parser import parse_explanation, parse_observation, parse_theory
from abdux.search import filter_card_minimal, filter_subset_minimal, find_constrained

DATA = resources.files("abdux") / "data"


def load(name):
    theory = parse_theory((DATA / f"{name}.abd").read_text())
    return theory, parse_observation((DATA / f"{name}.obs").read_text(), theory)


def expl(name):
    return parse_explanation((DATA / f"{name}.exp").read_text())


def main():
    for example, names in (("ex6", ["d1", "d2", "d3", "dx"]), ("ex7", ["dx1x2", "dxx", "dx3", "d"])):
        theory, obs = load(example)
        print(f"{example}:")
        for n in names:
            e = expl(f"{example}_{n}")
            print(f"  {n:6} {e}  degree {degree(theory, obs, e)}")
        r = find_constrained(theory, obs, max_add=3, max_del=1)
        print(f"  first constrained explanation: {r.explanation}")

    theory, obs = load("breach")
    family = [expl(f"breach_{n}") for n in ("e_tom", "e_mary", "s_tom", "e_dan", "v_dan", "e_tom_dan")]
    print("breach:")
    for e in family:
        print(f"  {e}  degree {degree(theory, obs, e)}")
    subset = filter_subset_minimal(family, theory, obs)
    print("  subset-minimal:", ", ".join(map(str, subset)))
    print("  cardinality-minimal:", ", ".join(map(str, filter_card_minimal(family, theory, obs, max_add=4, max_del=0))))
    print("  subset-minimal and constrained:",
          ", ".join(str(e) for e in subset if is_constrained(theory, obs, e)))


if __name__ == "__main__":
    main()
