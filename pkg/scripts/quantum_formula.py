"""Quantum simulation of PFA fixtures: measured acceptance vs the closed formula,
and the integer gap identity."""
import argparse
import os
from fractions import Fraction

from tm1.gpfa import load_gpfa
from tm1.langlab import strings
from tm1.simulator import quantum_run
from tm1.transforms import (NonDyadicTransition, dyadic_padding, nqtm_expected, pfa_to_nqtm,
                            qtm_to_gap)

FIX = os.path.join(os.path.dirname(__file__), "..", "src", "tm1", "fixtures")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=["pfa_half", "pfa_mixed_start", "pfa_thirds"])
    ap.add_argument("--max-len", type=int, default=3)
    a = ap.parse_args()
    for name in a.names:
        g = load_gpfa(os.path.join(FIX, name + ".gpfa"))
        try:
            q = pfa_to_nqtm(g)
        except NonDyadicTransition:
            print(f"{name}: non-dyadic, padding first")
            g = dyadic_padding(g)
            q = pfa_to_nqtm(g)
        bits = int(q.meta["m"])
        d, ev = qtm_to_gap(q)
        print(f"{name}: m={bits} states={len(q.states)} symbols={len(q.tape_alphabet)} d={d}")
        for x in strings(g.alphabet, a.max_len, 1):
            r = quantum_run(q, x)
            want = nqtm_expected(g, x, bits)
            gr = ev(x)
            same = Fraction(gr.gap, d ** gr.time) == r.p
            print(f"  {x:6s} time={r.time:3d} p={float(r.p):.6f} formula_match={r.p == want} "
                  f"gap_match={same}")


if __name__ == "__main__":
    main()
