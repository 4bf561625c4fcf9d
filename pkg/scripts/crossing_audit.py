"""Crossing-length table, crossing-DFA sizes and N_L(n) bounds per fixture."""
import argparse
import os

from tm1.crossing import UnboundedCrossing, enumerate_crossing_set, max_crossing_length
from tm1.langlab import minimize_dfa, non_regularity
from tm1.machine import load_machine
from tm1.transforms import crossing_dfa, machine_language

FIX = os.path.join(os.path.dirname(__file__), "..", "src", "tm1", "fixtures")
DEFAULT = ["sweep_parity", "two_pass", "guess_all", "guess_11", "mark_one", "count_as",
           "center_to_A", "pal_zigzag"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=DEFAULT)
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--nonreg-max", type=int, default=6)
    a = ap.parse_args()
    for name in a.names:
        m = load_machine(os.path.join(FIX, name + ".tm"))
        audit = max_crossing_length(m, a.n_max)
        row = " ".join(str(audit.table[n]) for n in sorted(audit.table))
        print(f"{name:14s} max crossing by n: {row}  stabilized={audit.stabilized()}")
        try:
            d = crossing_dfa(m, audit_len=a.n_max)
        except UnboundedCrossing:
            print(f"{'':14s} no crossing DFA: lengths keep growing")
            continue
        print(f"{'':14s} crossing DFA: {len(d.states)} reachable, "
              f"{len(minimize_dfa(d).states)} minimal")
        L = machine_language(m)
        for n in range(a.nonreg_max + 1):
            s = len(enumerate_crossing_set(m, n))
            v = non_regularity(L, n).value
            print(f"{'':14s} n={n}: N_L(n)={v}  |S_n|={s}  bound 2^|S_n|={2 ** s}")


if __name__ == "__main__":
    main()
