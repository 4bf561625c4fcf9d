"""Exhaustive check that equal support sets transfer membership."""
import argparse
import os
import time

from tm1.crossing import transfer_counterexamples
from tm1.machine import HALF, load_machine
from tm1.simulator import acceptance_probability, accepts_nondet, count_and_gap, mod_predicate

FIX = os.path.join(os.path.dirname(__file__), "..", "src", "tm1", "fixtures")
RUNS = [
    ("guess_11", "boolean", None),
    ("mark_one", "boolean", None),
    ("prob_endcheck", "bucketed", None),
    ("prob_parity_vote", "bucketed", None),
    ("count_as", "mod-k", 3),
]


def member_for(mode, k):
    if mode == "bucketed":
        return lambda t: acceptance_probability(t) > HALF
    if mode == "mod-k":
        return lambda t: mod_predicate(count_and_gap(t).sharp, k, {0})
    return accepts_nondet


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[4, 6, 8])
    a = ap.parse_args()
    for name, mode, k in RUNS:
        m = load_machine(os.path.join(FIX, name + ".tm"))
        for n in a.n:
            t0 = time.time()
            bad, checked, groups = transfer_counterexamples(
                m, n, mode, member_for(mode, k), {"k": k} if k else None)
            print(f"{name:16s} {mode:8s} n={n}: classes={groups:4d} checked={checked:7d} "
                  f"counterexamples={len(bad)} ({time.time() - t0:.1f}s)")


if __name__ == "__main__":
    main()
