"""Size of folded and output-recovered machines and a brute-force equivalence check."""
import argparse
import os

from tm1.folding import choose_k, fold_machine, fold_output_recovery
from tm1.langlab import strings
from tm1.machine import load_machine
from tm1.simulator import acceptance_probability, count_and_gap, explore

FIX = os.path.join(os.path.dirname(__file__), "..", "src", "tm1", "fixtures")


def value(m, x):
    t = explore(m, x)
    return acceptance_probability(t) if m.variant == "probabilistic" else count_and_gap(t)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*",
                    default=["sweep_parity", "two_pass", "guess_all", "copy", "coin_then_check"])
    ap.add_argument("--max-len", type=int, default=5)
    a = ap.parse_args()
    for name in a.names:
        m = load_machine(os.path.join(FIX, name + ".tm"))
        k = choose_k(m, a.max_len)
        f = fold_machine(m, k)
        r = fold_output_recovery(f)
        ok = all(value(m, x) == value(f, x) == value(r, x)
                 for x in strings(m.input_alphabet, a.max_len))
        print(f"{name:16s} k={k} original {len(m.states)}q/{len(m.tape_alphabet)}s  "
              f"folded {len(f.states)}q/{len(f.tape_alphabet)}s  "
              f"recovered {len(r.states)}q/{len(r.tape_alphabet)}s  equivalent={ok}")


if __name__ == "__main__":
    main()
