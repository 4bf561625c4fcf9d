"""Command-line front end.

Exit codes: 0 success or property holds, 1 property violated (witness in the
report), 2 usage or parse error, 3 fuel or budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import crossing, folding, gpfa, langlab, machine, simulator, transforms
from .machine import HALF

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
SUITES = ("step-sum", "gpfa-exact", "gaf-exact", "sync-ptm", "nqtm-formula", "qtm-gap",
          "refinement", "dfa-equiv", "support-transfer", "reversible", "norm")
MODES = {"det": "deterministic", "nondet": "nondeterministic", "alt": "alternating",
         "count": "counting", "gap": "counting", "prob": "probabilistic", "quantum": "quantum"}


class Violation(Exception):
    def __init__(self, msg, witness=None):
        self.witness = witness
        super().__init__(msg)


class Report:
    def __init__(self, fmt, out):
        self.fmt = fmt
        self.out = out

    def emit(self, kind, **fields):
        fields = {k: _plain(v) for k, v in fields.items()}
        if self.fmt == "jsonl":
            self.out.write(json.dumps({"kind": kind, **fields}, sort_keys=True) + "\n")
        else:
            body = " ".join(f"{k}={_text(v)}" for k, v in fields.items())
            self.out.write(f"{kind}: {body}\n" if body else f"{kind}\n")


def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in sorted(v.items(), key=lambda kv: str(kv[0]))}
    return v


def _text(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def resolve(path):
    if os.path.exists(path):
        return path
    alt = os.path.join(FIXTURES, path)
    if os.path.exists(alt):
        return alt
    raise FileNotFoundError(f"no such file: {path}")


def load_any(path):
    path = resolve(path)
    if path.endswith(".gpfa"):
        return gpfa.load_gpfa(path)
    return machine.load_machine(path)


def _write(text, out_path):
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _fraction(s):
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {s!r}")


# ---------------------------------------------------------------- commands

def cmd_run(a, rep):
    spec = load_any(a.machine)
    mode = a.mode
    if mode == "auto":
        mode = {v: k for k, v in MODES.items() if k != "gap"}[spec.variant]
    if MODES[mode] != spec.variant and not (mode in ("count", "gap", "nondet")
                                            and spec.variant in ("counting", "nondeterministic")):
        raise machine.PreconditionError(f"mode {mode} does not fit a {spec.variant} machine")
    x = a.input
    if mode == "quantum":
        r = simulator.quantum_run(spec, x, a.fuel)
        rep.emit("run", input=x, time=r.time, accept=r.p > 0, p=r.p)
        return 0
    t = simulator.explore(spec, x, a.fuel)
    fields = {"input": x, "time": simulator.running_time(t)}
    if mode == "alt":
        fields["accept"] = simulator.evaluate_alternating(spec, t)
    elif mode == "prob":
        p = simulator.acceptance_probability(t)
        fields.update(accept=p > HALF, p=p)
    else:
        cg = simulator.count_and_gap(t)
        fields["accept"] = cg.sharp > 0
        if mode in ("count", "gap", "nondet"):
            fields.update(accepting=cg.sharp, gap=cg.gap)
    fields["synchronous"] = simulator.is_synchronous(t)
    oc = simulator.collect_outcomes(t)
    if oc.counts:
        fields["outcomes"] = dict(oc.counts)
    rep.emit("run", **fields)
    return 0


def cmd_crossings(a, rep):
    spec = load_any(a.machine)
    t = simulator.explore(spec, a.input, a.fuel)
    if not 0 <= a.path_index < len(t.leaves):
        raise machine.PreconditionError(f"path index {a.path_index} out of range 0..{len(t.leaves) - 1}")
    leaf = t.leaves[a.path_index]
    prof = crossing.crossing_profile(t.path_configs(leaf))
    for b in range(-1, len(a.input) + 2):
        rep.emit("crossing", boundary=b, seq=list(prof.at(b)))
    rep.emit("path", index=a.path_index, state=t.nodes[leaf].config.state,
             length=len(t.path_configs(leaf)) - 1, total=prof.total())
    return 0


def cmd_fold(a, rep):
    spec = load_any(a.machine)
    if a.auto_k:
        k = folding.choose_k(spec, a.max_len, a.fuel)
        f = folding.fold_machine(spec, k, (3, a.max_len))
    elif a.k is not None:
        f = folding.fold_machine(spec, a.k)
    else:
        raise machine.PreconditionError("fold needs -k K or --auto-k")
    if a.recover:
        f = folding.fold_output_recovery(f)
    _write(machine.render_machine(f), a.output)
    rep.emit("fold", k=f.meta["k"], states=len(f.states), symbols=len(f.tape_alphabet),
             recovered=f.meta.get("recovered", "no"), output=a.output)
    return 0


def cmd_convert(a, rep):
    if a.pfa:
        g = load_any(a.pfa)
        if a.to == "sync-ptm":
            m = transforms.pfa_to_sync_ptm(g, a.cut)
        elif a.to == "nqtm":
            m = transforms.pfa_to_nqtm(g, a.cut)
        else:
            raise machine.PreconditionError(f"--to {a.to} needs -m MACHINE")
        _write(machine.render_machine(m), a.output)
        rep.emit("convert", to=a.to, states=len(m.states), rules=len(m.rules), output=a.output)
        return 0
    if not a.machine:
        raise machine.PreconditionError("convert needs -m MACHINE or -p PFA")
    spec = load_any(a.machine)
    if a.to == "refinement":
        m = transforms.ntm_to_refinement(spec, a.k)
        text, size = machine.render_machine(m), len(m.states)
    elif a.to == "dfa":
        d = transforms.crossing_dfa(spec, a.k)
        text, size = langlab.render_dfa(d), len(d.states)
    elif a.to in ("gpfa", "gaf"):
        if a.to == "gpfa" or spec.variant == "probabilistic":
            g = transforms.ptm_to_gpfa(spec, a.k)
        else:
            g = transforms.ctm_to_gaf(spec, a.k)
        text, size = gpfa.render_gpfa(g), g.n_states
    else:
        raise machine.PreconditionError(f"--to {a.to} needs -p PFA")
    _write(text, a.output)
    rep.emit("convert", to=a.to, states=size, output=a.output)
    return 0


def cmd_nonreg(a, rep):
    if a.lang:
        L = langlab.builtin_language(a.lang)
    else:
        L = transforms.machine_language(load_any(a.machine), a.fuel)
    r = langlab.non_regularity(L, a.n)
    rep.emit("nonreg", language=L.name, n=a.n, value=r.value, witness=r.witness,
             karp_bound_exceeded=2 * r.value > a.n + 2)
    return 0


def cmd_reduce(a, rep):
    red = load_any(a.machine)
    if a.lang:
        target = langlab.builtin_language(a.lang)
    elif a.gpfa:
        target = transforms.gpfa_language(load_any(a.gpfa), gpfa.CutPoint(a.cut, a.cmp))
    else:
        raise machine.PreconditionError("reduce needs --lang or --gpfa")
    t = transforms.check_reduction_contract(red, a.input, a.fuel)
    oc = simulator.collect_outcomes(t)
    ys = sorted(oc.counts)
    hits = [y for y in ys if target(y)]
    rep.emit("reduce", input=a.input, outcomes=ys, member=bool(hits),
             witness=hits[0] if hits else None)
    return 0


# ------------------------------------------------------------------ suites

def _inputs(alphabet, max_len, min_len=0):
    return list(langlab.strings(alphabet, max_len, min_len))


def suite_step_sum(obj, a):
    for x in _inputs(obj.input_alphabet, a.max_len):
        t = simulator.explore(obj, x, a.fuel)
        for leaf in t.leaves:
            cs = t.path_configs(leaf)
            if any(p.head == q.head for p, q in zip(cs, cs[1:])):
                continue
            total = crossing.crossing_profile(cs).total()
            if total != len(cs) - 1:
                yield x, False, {"leaf": leaf, "length": len(cs) - 1, "sum": total}
        yield x, True, {}


def suite_gpfa_exact(obj, a):
    g = transforms.ptm_to_gpfa(obj, a.k)
    for x in _inputs(obj.input_alphabet, a.max_len):
        want = simulator.acceptance_probability(simulator.explore(obj, x, a.fuel))
        got = gpfa.acceptance_value(g, x)
        yield x, got == want, {"gpfa": got, "machine": want}


def suite_gaf_exact(obj, a):
    g = transforms.ctm_to_gaf(obj, a.k)
    h = transforms.ctm_to_gap_gaf(obj, a.k)
    for x in _inputs(obj.input_alphabet, a.max_len):
        cg = simulator.count_and_gap(simulator.explore(obj, x, a.fuel))
        got, gap = gpfa.acceptance_value(g, x), gpfa.acceptance_value(h, x)
        yield x, got == cg.sharp and gap == cg.gap, {"gaf": got, "count": cg.sharp,
                                                      "gap_gaf": gap, "gap": cg.gap}


def suite_sync_ptm(obj, a):
    m = transforms.pfa_to_sync_ptm(obj, a.cut)
    for x in _inputs(obj.alphabet, a.max_len):
        t = simulator.explore(m, x, a.fuel)
        p = simulator.acceptance_probability(t)
        want = gpfa.acceptance_value(obj, x) > a.cut
        ok = simulator.is_synchronous(t) and (p > HALF) == want
        yield x, ok, {"p": p, "synchronous": simulator.is_synchronous(t)}


def suite_nqtm_formula(obj, a):
    m = transforms.pfa_to_nqtm(obj, a.cut)
    bits = int(m.meta["m"])
    for x in _inputs(obj.alphabet, a.max_len, 1):
        r = simulator.quantum_run(m, x, a.fuel)
        want = transforms.nqtm_expected(obj, x, bits, a.cut)
        yield x, r.p == want, {"p": r.p, "formula": want}


def suite_qtm_gap(obj, a):
    if isinstance(obj, gpfa.Gpfa):
        obj = transforms.pfa_to_nqtm(obj, a.cut)
    _, gap_eval = transforms.qtm_to_gap(obj, fuel=a.fuel)
    for x in _inputs(obj.input_alphabet, a.max_len):
        r = simulator.quantum_run(obj, x, a.fuel)
        g = gap_eval(x)
        got = Fraction(g.gap, g.d ** g.time)
        yield x, got == r.p, {"p": r.p, "gap": g.gap, "d": g.d, "time": g.time}


def suite_refinement(obj, a):
    ref = transforms.ntm_to_refinement(obj, a.k, check_len=a.max_len)
    for x in _inputs(obj.input_alphabet, a.max_len):
        f = set(simulator.collect_outcomes(simulator.explore(obj, x, a.fuel)).counts)
        t = simulator.explore(ref, x, a.fuel)
        g = sorted(simulator.collect_outcomes(t).counts)
        ok = len(t.leaves) == 1 and (g[0] in f if f else not g) and (len(g) == 1) == bool(f)
        yield x, ok, {"f": sorted(f), "g": g}


def suite_dfa_equiv(obj, a):
    d = transforms.crossing_dfa(obj, a.k)
    L = transforms.machine_language(obj, a.fuel)
    for x in _inputs(obj.input_alphabet, a.max_len):
        yield x, d.accepts(x) == L(x), {"dfa": d.accepts(x), "machine": L(x)}


def suite_support_transfer(obj, a):
    if obj.variant == "probabilistic":
        mode, member = "bucketed", lambda t: simulator.acceptance_probability(t) > HALF
    elif a.mod_k:
        k = a.mod_k
        mode = "mod-k"
        member = lambda t: simulator.count_and_gap(t).sharp % k != 0
    else:
        mode, member = "boolean", simulator.accepts_nondet
    bad, checked, groups = crossing.transfer_counterexamples(
        obj, a.max_len, mode, member, {"k": a.mod_k} if a.mod_k else None, fuel=a.fuel)
    for x, y, z in bad:
        yield f"{x}|{y}|{z}", False, {"mode": mode}
    yield "", True, {"mode": mode, "checked": checked, "classes": groups}


def suite_reversible(obj, a):
    r = simulator.check_reversible_dynamic(obj, _inputs(obj.input_alphabet, a.max_len), a.fuel)
    yield "", r.ok, {"witness": [str(c) for c in r.witness] if r.witness else None}


def suite_norm(obj, a):
    if isinstance(obj, gpfa.Gpfa):
        obj = transforms.pfa_to_nqtm(obj, a.cut)
    for x in _inputs(obj.input_alphabet, a.max_len):
        if obj.variant == "quantum":
            r = simulator.quantum_run(obj, x, a.fuel, check_norm=False)
            yield x, all(v == 1 for v in r.norm_trace), {"time": r.time}
        else:
            m = simulator.total_mass(simulator.explore(obj, x, a.fuel))
            yield x, m == 1, {"mass": m}


SUITE_FUNCS = {
    "step-sum": suite_step_sum, "gpfa-exact": suite_gpfa_exact, "gaf-exact": suite_gaf_exact,
    "sync-ptm": suite_sync_ptm, "nqtm-formula": suite_nqtm_formula, "qtm-gap": suite_qtm_gap,
    "refinement": suite_refinement, "dfa-equiv": suite_dfa_equiv,
    "support-transfer": suite_support_transfer, "reversible": suite_reversible, "norm": suite_norm,
}


def cmd_verify(a, rep):
    obj = load_any(a.machine)
    failed = 0
    cases = 0
    for x, ok, detail in SUITE_FUNCS[a.suite](obj, a):
        cases += 1
        if not ok:
            failed += 1
            rep.emit("violation", suite=a.suite, input=x, **detail)
        elif a.verbose:
            rep.emit("case", suite=a.suite, input=x, **detail)
    rep.emit("verify", suite=a.suite, cases=cases, failed=failed, ok=failed == 0)
    return 0 if failed == 0 else 1


# ------------------------------------------------------------------ parser

def build_parser():
    p = argparse.ArgumentParser(prog="tm1", description="One-tape machine laboratory.")
    p.add_argument("--report", choices=("text", "jsonl"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fuel=True):
        sp.add_argument("--report", choices=("text", "jsonl"), default=argparse.SUPPRESS)
        if fuel:
            sp.add_argument("--fuel", type=int, default=None)

    sp = sub.add_parser("run", help="simulate a machine on one input")
    sp.add_argument("-m", "--machine", required=True)
    sp.add_argument("-x", "--input", default="")
    sp.add_argument("--mode", choices=("auto",) + tuple(MODES), default="auto")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("crossings", help="crossing sequences of one computation path")
    sp.add_argument("-m", "--machine", required=True)
    sp.add_argument("-x", "--input", default="")
    sp.add_argument("--path-index", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_crossings)

    sp = sub.add_parser("fold", help="confine a linear-time machine to the input area")
    sp.add_argument("-m", "--machine", required=True)
    sp.add_argument("-k", type=int, default=None)
    sp.add_argument("--auto-k", action="store_true")
    sp.add_argument("--max-len", type=int, default=6)
    sp.add_argument("--recover", action="store_true", help="also recover the output")
    sp.add_argument("-o", "--output", required=True)
    common(sp)
    sp.set_defaults(func=cmd_fold)

    sp = sub.add_parser("convert", help="machine/automaton conversions")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("-m", "--machine")
    g.add_argument("-p", "--pfa")
    sp.add_argument("--to", required=True, choices=("refinement", "dfa", "gpfa", "gaf",
                                                     "sync-ptm", "nqtm"))
    sp.add_argument("-k", type=int, default=None)
    sp.add_argument("--cut", type=_fraction, default=HALF)
    sp.add_argument("-o", "--output", required=True)
    common(sp, fuel=False)
    sp.set_defaults(func=cmd_convert)

    sp = sub.add_parser("nonreg", help="exact non-regularity N_L(n)")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--lang")
    g.add_argument("-m", "--machine")
    sp.add_argument("-n", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_nonreg)

    sp = sub.add_parser("reduce", help="membership through a reducer")
    sp.add_argument("-m", "--machine", required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--lang")
    g.add_argument("--gpfa")
    sp.add_argument("--cut", type=_fraction, default=HALF)
    sp.add_argument("--cmp", choices=("gt", "eq"), default="gt")
    sp.add_argument("-x", "--input", default="")
    common(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("verify", help="run an invariant suite")
    sp.add_argument("--suite", required=True, choices=SUITES)
    sp.add_argument("-m", "--machine", required=True)
    sp.add_argument("--max-len", type=int, default=4)
    sp.add_argument("-k", type=int, default=None)
    sp.add_argument("--cut", type=_fraction, default=HALF)
    sp.add_argument("--mod-k", type=int, default=None)
    sp.add_argument("-v", "--verbose", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


VIOLATIONS = (crossing.UnboundedCrossing, crossing.LengthBoundExceeded,
              transforms.NotLengthPreserving, transforms.ReductionContractViolation,
              transforms.NotStationary, transforms.NonDyadicTransition,
              simulator.HaltingViolation, simulator.NormViolation, Violation)
EXHAUSTED = (simulator.FuelExhausted, langlab.BudgetExceeded, folding.AlphabetBudgetExceeded,
             folding.NoLinearBoundWitness)


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if not hasattr(a, "fuel"):
        a.fuel = None
    rep = Report(a.report, out)
    try:
        return a.func(a, rep)
    except VIOLATIONS as e:
        w = getattr(e, "witness", None) or getattr(e, "table", None) or getattr(e, "path", None)
        if isinstance(w, list):
            w = [str(c) for c in w]
        rep.emit("violation", error=type(e).__name__, message=str(e), witness=w)
        return 1
    except EXHAUSTED as e:
        rep.emit("exhausted", error=type(e).__name__, message=str(e))
        return 3
    except (machine.MachineError, OSError, ValueError) as e:
        rep.emit("error", error=type(e).__name__, message=str(e))
        return 2


if __name__ == "__main__":
    sys.exit(main())
