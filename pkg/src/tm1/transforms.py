"""Conversions between machines and automata.

Crossing-sequence constructions (GPFA/GAF, crossing DFA, refinement) work on
the folded, output-recovered machine, where every halting path crosses the
right input boundary last and in its halting state.  The PFA constructions
build synchronous probabilistic and quantum machines directly.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .crossing import (crossing_relation, require_bounded, seq_key, sort_seqs)
from .folding import (FoldingPrereqMissing, NoLinearBoundWitness, choose_k,
                      fold_machine, fold_output_recovery)
from .gpfa import (Gpfa, acceptance_value, as_pfa, cut_language_member, vecmat)
from .langlab import Dfa, LanguageOracle, strings
from .machine import HALF, MachineError, MachineSpec, PreconditionError, Rule
from .simulator import (HaltingViolation, NormViolation, accepts_nondet,
                        acceptance_probability, collect_outcomes, default_fuel,
                        evaluate_alternating, explore, outcome_of, quantum_run)
from .machine import initial_configuration, successors


class NotLengthPreserving(MachineError):
    def __init__(self, msg, witness=None):
        self.witness = witness
        super().__init__(msg)


class IrrationalCutPoint(MachineError):
    pass


class NonDyadicTransition(MachineError):
    pass


class NotStationary(MachineError):
    pass


class ReductionContractViolation(MachineError):
    def __init__(self, msg, path=None):
        self.path = path
        super().__init__(msg)


def seq_name(v):
    return "(" + ",".join(v) + ")"


# ------------------------------------------------------- folding front door

def folded_recovered(spec, k=None, sample_max_len=6, fuel=None):
    """The folded, output-recovered version of spec (k chosen if not given)."""
    if spec.meta.get("folded") == "yes":
        f = spec
    else:
        if k is None:
            try:
                k = choose_k(spec, sample_max_len, fuel)
            except NoLinearBoundWitness as e:
                raise FoldingPrereqMissing(f"no linear time bound established: {e}") from e
            f = fold_machine(spec, k, (3, sample_max_len))
        else:
            f = fold_machine(spec, k)
    return f if f.meta.get("recovered") == "yes" else fold_output_recovery(f)


def _relation_gpfa(rel, end):
    idx = {v: i for i, v in enumerate(rel.states)}
    n = len(rel.states)
    T = {}
    for a in rel.machine.input_alphabet:
        T[a] = [[0] * n for _ in range(n)]
    for (u, a, v), w in rel.entries.items():
        T[a][idx[u]][idx[v]] = w
    pi = [0] * n
    if () in idx:
        pi[idx[()]] = 1
    eta = [end.get(v, 0) for v in rel.states]
    return Gpfa(pi, T, eta, tuple(rel.machine.input_alphabet), [seq_name(v) for v in rel.states],
                {"k": rel.machine.meta.get("k"), "length_bound": rel.length_bound})


def ptm_to_gpfa(spec, k=None, sample_max_len=6, fuel=None):
    """GPFA over crossing sequences whose value equals the acceptance probability."""
    if spec.variant != "probabilistic":
        raise PreconditionError("ptm_to_gpfa needs a probabilistic machine")
    rel = crossing_relation(folded_recovered(spec, k, sample_max_len, fuel), "probability")
    return _relation_gpfa(rel, rel.rho)


def ctm_to_gaf(spec, k=None, sample_max_len=6, fuel=None):
    """GPFA whose value is the number of accepting paths."""
    if spec.variant not in ("counting", "nondeterministic", "deterministic"):
        raise PreconditionError("ctm_to_gaf needs a counting (or nondeterministic) machine")
    rel = crossing_relation(folded_recovered(spec, k, sample_max_len, fuel), "count")
    return _relation_gpfa(rel, rel.rho)


def ctm_to_gap_gaf(spec, k=None, sample_max_len=6, fuel=None):
    """GPFA whose value is #accepting - #rejecting paths."""
    rel = crossing_relation(folded_recovered(spec, k, sample_max_len, fuel), "count",
                            keep_reject=True)
    end = {v: rel.rho.get(v, 0) - rel.rho_reject.get(v, 0) for v in rel.states}
    return _relation_gpfa(rel, end)


# ----------------------------------------------------------- crossing DFA

@dataclass
class CrossingDfa(Dfa):
    subsets: list = field(default_factory=list)
    audit: object = None


def _subset_step(rel, S, a):
    out = set()
    for v in S:
        out |= set(rel._succ.get((v, a), ()))
    return frozenset(out)


def crossing_dfa(spec, k=None, audit_len=8, sample_max_len=6, fuel=None):
    """Subset automaton over crossing sequences of the folded machine."""
    audit = require_bounded(spec, audit_len, fuel)
    rel = crossing_relation(folded_recovered(spec, k, sample_max_len, fuel), "count")
    start = frozenset({()})
    index = {start: 0}
    order = [start]
    delta = {}
    i = 0
    while i < len(order):
        S = order[i]
        for a in spec.input_alphabet:
            S2 = _subset_step(rel, S, a)
            if S2 not in index:
                index[S2] = len(order)
                order.append(S2)
            delta[(i, a)] = index[S2]
        i += 1
    acc = {index[S] for S in order if any(rel.rho.get(v, 0) for v in S)}
    subsets = [sort_seqs(rel.machine, S) for S in order]
    return CrossingDfa(list(range(len(order))), tuple(spec.input_alphabet), 0, acc, delta,
                       subsets, audit)


# ------------------------------------------------------------- refinement

def check_length_preserving(spec, max_len, fuel=None):
    for x in strings(spec.input_alphabet, max_len):
        t = explore(spec, x, fuel)
        for leaf in t.accepting_leaves():
            y = outcome_of(t.nodes[leaf].config, spec.blank)
            if y is None or len(y) != len(x):
                raise NotLengthPreserving(f"outcome {y!r} on input {x!r}", (x, y))


def ntm_to_refinement(spec, k=None, check_len=5, sample_max_len=6, fuel=None):
    """Deterministic machine computing one value of the multi-valued function of spec.

    Forward pass: carry the set S_i of crossing sequences reachable at the
    left boundary of cell i, write sigma_i together with V_i (the members of
    S_i that have a successor) and move right; reject as soon as S_{i+1} is
    empty.  At the blank pick the least accepting v_n.  Backward pass: from
    v_i pick the least v_{i-1} in V_i with v_{i-1} -> v_i and write the
    output symbol of that cell history."""
    check_length_preserving(spec, check_len, fuel)
    rel = crossing_relation(folded_recovered(spec, k, sample_max_len, fuel), "count")
    N = rel.machine
    key = lambda v: seq_key(N, v)
    sigma = spec.input_alphabet
    blank = spec.blank
    out_order = {a: i for i, a in enumerate(spec.tape_alphabet)}

    subsets = [frozenset({()})]
    sidx = {subsets[0]: 0}
    vsets = []
    vidx = {}
    rules = []
    written = set()
    seqs = {v: i for i, v in enumerate(rel.states)}
    seqs.setdefault((), len(seqs))

    def vname(V):
        if V not in vidx:
            vidx[V] = len(vsets)
            vsets.append(V)
        return vidx[V]

    i = 0
    while i < len(subsets):
        S = subsets[i]
        for a in sigma:
            V = frozenset(v for v in S if rel._succ.get((v, a)))
            S2 = _subset_step(rel, S, a)
            if not S2:
                rules.append(Rule(f"F{i}", a, "rej", a, "N"))
                continue
            if S2 not in sidx:
                sidx[S2] = len(subsets)
                subsets.append(S2)
            sym = f"{a}/V{vname(V)}"
            written.add((a, V, sym))
            rules.append(Rule(f"F{i}", a, f"F{sidx[S2]}", sym, "R"))
        W = [v for v in S if rel.rho.get(v, 0)]
        if W:
            v = min(W, key=key)
            rules.append(Rule(f"F{i}", blank, f"B{seqs[v]}", blank, "L"))
        else:
            rules.append(Rule(f"F{i}", blank, "rej", blank, "N"))
        i += 1
    back = set()
    for a, V, sym in sorted(written, key=lambda t: t[2]):
        for v, j in seqs.items():
            W = [u for u in V if (u, a, v) in rel.entries]
            if not W:
                continue
            u = min(W, key=key)
            fin = min(rel.symb[(u, a, v)], key=lambda s: out_order.get(s, len(out_order)))
            rules.append(Rule(f"B{j}", sym, f"B{seqs[u]}", fin, "L"))
            back.add(j)
    rules.append(Rule(f"B{seqs[()]}", blank, "acc", blank, "N"))
    states = tuple(f"F{i}" for i in range(len(subsets))) + \
        tuple(f"B{j}" for j in range(len(seqs))) + ("acc", "rej")
    tape = list(spec.tape_alphabet)
    tape += sorted({sym for _, _, sym in written})
    return MachineSpec("deterministic", states, tuple(sigma), tuple(tape), blank, tuple(rules),
                       "F0", "acc", "rej", {}, None,
                       {"refines": "yes", "k": N.meta.get("k"), "validated": N.meta.get("validated")})


# --------------------------------------------------------------- PFA side

def _check_cut(cut):
    if isinstance(cut, float) or not isinstance(cut, (int, Fraction)):
        raise IrrationalCutPoint(f"cut point {cut!r} is not an exact rational")
    return Fraction(cut)


def normalize_pfa(g, cut=HALF):
    """PFA h with a point-mass start and, for |x| >= 1, p_h(x) > 1/2 iff p_g(x) > cut.

    A cut point other than 1/2 is moved by mixing with a constant automaton:
    p_h(x) = (p_g(x) + 1 - cut)/2.  A mixed start distribution is folded into
    a fresh start state.  The fresh start state is final iff the empty input
    is in the cut language.  Returns (h, notes)."""
    as_pfa(g)
    cut = _check_cut(cut)
    n = g.n_states
    A = g.alphabet
    pl = acceptance_value(g, "")
    notes = {}
    point = sum(1 for v in g.pi if v == 1) == 1
    if cut != HALF:
        size = n + 3
        T = {}
        for a in A:
            m = [[Fraction(0)] * size for _ in range(size)]
            row = vecmat(g.pi, g.T[a])
            m[0][1:n + 1] = [v / 2 for v in row]
            m[0][n + 1] = (1 - cut) / 2
            m[0][n + 2] = cut / 2
            for i in range(n):
                m[i + 1][1:n + 1] = g.T[a][i]
            m[n + 1][n + 1] = Fraction(1)
            m[n + 2][n + 2] = Fraction(1)
            T[a] = m
        eta = [Fraction(int(pl > cut))] + list(g.eta) + [Fraction(1), Fraction(0)]
        pi = [Fraction(1)] + [Fraction(0)] * (n + 2)
        notes["cut_shift"] = str(cut)
        return Gpfa(pi, T, eta, A), notes
    if not point:
        size = n + 1
        T = {}
        for a in A:
            m = [[Fraction(0)] * size for _ in range(size)]
            m[0][1:] = vecmat(g.pi, g.T[a])
            for i in range(n):
                m[i + 1][1:] = g.T[a][i]
            T[a] = m
        eta = [Fraction(int(pl > HALF))] + list(g.eta)
        notes["fresh_start"] = "yes"
        return Gpfa([Fraction(1)] + [Fraction(0)] * n, T, eta, A), notes
    return g, notes


def _lcm_denominators(g):
    d = 1
    for m in g.T.values():
        for row in m:
            for v in row:
                d = math.lcm(d, Fraction(v).denominator)
    return d


def _bits_for(d):
    """Minimal m with 2^(m-1) < d <= 2^m (m = 0 for d = 1)."""
    m = 0
    while 2 ** m < d:
        m += 1
    return m


def pfa_to_sync_ptm(g, cut=HALF):
    """Synchronous probabilistic machine with p > 1/2 exactly where p_g > cut.

    Per input symbol every path takes m coin tosses (stay moves) and one
    right move.  Of the 2^m outcomes the first d pick the next automaton
    state by cumulative ranges; the rest toss once more for a fixed 0/1
    decision and then idle in step.  So
    p_M(x) = (d/2^m)^n p(x) + (1 - (d/2^m)^n)/2 for the normalized p."""
    h, notes = normalize_pfa(g, cut)
    d = _lcm_denominators(h)
    m = _bits_for(d)
    start = h.pi.index(1)
    A = h.alphabet
    blank = "_"
    rules = []
    states = []

    def st(name):
        if name not in states:
            states.append(name)
        return name

    for s in range(h.n_states):
        for depth in range(m + 1):
            for b in range(2 ** depth):
                bits = format(b, f"0{depth}b") if depth else ""
                src = st(f"s{s}~{bits}" if bits else f"s{s}")
                for a in A:
                    if depth < m:
                        for c in "01":
                            nb = bits + c
                            rules.append(Rule(src, a, st(f"s{s}~{nb}"), a, "N", HALF))
                        continue
                    val = b
                    if val < d:
                        acc = 0
                        for t, p in enumerate(h.T[a][s]):
                            acc += int(p * d)
                            if val < acc:
                                rules.append(Rule(src, a, st(f"s{t}"), a, "R"))
                                break
                    else:
                        rules.append(Rule(src, a, st("D0.0"), a, "R", HALF))
                        rules.append(Rule(src, a, st("D1.0"), a, "R", HALF))
        rules.append(Rule(f"s{s}", blank, "acc" if h.eta[s] == 1 else "rej", blank, "N"))
    if "D0.0" in states:
        for v in "01":
            for j in range(m + 1):
                src = st(f"D{v}.{j}")
                for a in A:
                    if j < m:
                        rules.append(Rule(src, a, st(f"D{v}.{j + 1}"), a, "N"))
                    else:
                        rules.append(Rule(src, a, f"D{v}.0", a, "R"))
            rules.append(Rule(f"D{v}.0", blank, "acc" if v == "1" else "rej", blank, "N"))
    meta = {"d": str(d), "m": str(m)}
    meta.update(notes)
    return MachineSpec("probabilistic", tuple(states) + ("acc", "rej"), tuple(A),
                       tuple(A) + (blank,), blank, tuple(rules), f"s{start}", "acc", "rej",
                       {}, None, meta)


def dyadic_padding(g):
    """PFA with power-of-two denominators and the same sign of p - 1/2.

    Each row is scaled by d/2^m and the missing mass goes half to an
    absorbing accepting state and half to an absorbing rejecting one, so
    p'(x) - 1/2 = (d/2^m)^|x| (p(x) - 1/2).  This changes the value of p,
    so the quantum formula then holds for p', not p."""
    as_pfa(g)
    d = _lcm_denominators(g)
    m = _bits_for(d)
    if 2 ** m == d:
        return g
    n = g.n_states
    scale = Fraction(d, 2 ** m)
    spill = (1 - scale) / 2
    T = {}
    for a in g.alphabet:
        mm = [[Fraction(0)] * (n + 2) for _ in range(n + 2)]
        for i in range(n):
            mm[i][:n] = [v * scale for v in g.T[a][i]]
            mm[i][n] = spill
            mm[i][n + 1] = spill
        mm[n][n] = Fraction(1)
        mm[n + 1][n + 1] = Fraction(1)
        T[a] = mm
    return Gpfa(list(g.pi) + [0, 0], T, list(g.eta) + [1, 0], g.alphabet, meta={"padded": "yes"})


# quantum gadgets: M[t][s] = <t|M|s>
F35, F45 = Fraction(3, 5), Fraction(4, 5)
U_GATE = [[F35, -F45, 0, 0], [F45, F35, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
V_GATE = [[F45, 0, F35, 0], [0, F35, 0, F45], [F35, 0, -F45, 0], [0, -F45, 0, F35]]


def _mul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(4)), Fraction(0)) for j in range(4)]
            for i in range(4)]


W_GATE = _mul(U_GATE, V_GATE)


def is_unitary(M):
    n = len(M)
    for i in range(n):
        for j in range(n):
            if sum((Fraction(M[k][i]) * M[k][j] for k in range(n)), Fraction(0)) != (i == j):
                return False
    return True


def apply_gate(M, s):
    """Amplitudes of M|s> as a list over |0>..|3>."""
    return [M[t][s] for t in range(4)]


def pfa_to_nqtm(g, cut=HALF):
    """Quantum machine with p_M(x) = (24/25)^(2mn+2) (p(x) - 1/2)^2 for |x| = n >= 1.

    The automaton is normalized first (point-mass start, cut point 1/2); p
    is the normalized value.  Every cell gets m coin bits put in the
    superposition U^m|0^m>; the automaton is then run classically, choosing
    successors by the bit pattern and recording the previous state in the
    cell so that the sweep can be undone.  After writing the outcome bit,
    undoing the sweep, applying U^m again and W = UV to the outcome cell, the
    machine accepts exactly on the all-ones pattern with outcome 0."""
    cut = _check_cut(cut)
    lam_in = acceptance_value(g, "") != cut
    h, notes = normalize_pfa(g, cut)
    d = _lcm_denominators(h)
    m = max(1, _bits_for(d))
    if 2 ** _bits_for(d) != d:
        raise NonDyadicTransition(f"common denominator {d} is not a power of two; "
                                  "apply dyadic_padding first")
    A = h.alphabet
    S = range(h.n_states)
    start = h.pi.index(1)
    F = {s for s in S if h.eta[s] == 1}
    blank = "_"
    allbits = [format(b, f"0{m}b") for b in range(2 ** m)]
    ones = "1" * m
    ranges = {}
    for a in A:
        for s in S:
            acc, rs = 0, []
            for t in S:
                acc += int(h.T[a][s][t] * 2 ** m)
                rs.append((acc, t))
            ranges[(a, s)] = rs

    def target(a, s, bits):
        l = int(bits, 2)
        for hi, t in ranges[(a, s)]:
            if l < hi:
                return t
        raise MachineError("row does not sum to one")

    def mk(a, bits, rec="-"):
        return f"{a}.{bits}.{rec}"

    rules = []
    R = lambda *args: rules.append(Rule(*args))
    R("q0", blank, "acc" if lam_in else "rej", blank, "N")
    for a in A:
        R("q0", a, "P1", mk(a, "0" * m), "R")
        R("P1", a, "P1", mk(a, "0" * m), "R")
    R("P1", blank, "B1", blank, "L")
    plain = [(a, k) for a in A for k in allbits]
    for a, k in plain:
        R("B1", mk(a, k), "B1", mk(a, k), "L")
        R("B2", mk(a, k), "B2", mk(a, k), "L")
    R("B1", blank, "u0", blank, "R")
    R("B2", blank, f"p{start}", blank, "R")
    for phase in "uv":
        for i in range(m):
            for a, k in plain:
                col = apply_gate(U_GATE, int(k[i]))
                for t in (0, 1):
                    if col[t]:
                        nk = k[:i] + str(t) + k[i + 1:]
                        if i < m - 1:
                            R(f"{phase}{i}", mk(a, k), f"{phase}{i + 1}", mk(a, nk), "N", col[t])
                        else:
                            R(f"{phase}{i}", mk(a, k), f"{phase}0", mk(a, nk), "R", col[t])
    R("u0", blank, "B2", blank, "L")
    for s in S:
        for a, k in plain:
            R(f"p{s}", mk(a, k), f"p{target(a, s, k)}", mk(a, k, s), "R")
        R(f"p{s}", blank, f"t{s}", "o0" if s in F else "o1", "L")
        for a, k in plain:
            R(f"t{target(a, s, k)}", mk(a, k, s), f"t{s}", mk(a, k), "L")
    R(f"t{start}", blank, "v0", blank, "R")
    for r in (0, 1):
        for s, amp in enumerate(apply_gate(V_GATE, r)):
            if amp:
                R("v0", f"o{r}", "Vd", f"w{s}", "N", amp)
    for s in range(4):
        for t, amp in enumerate(apply_gate(U_GATE, s)):
            if amp:
                R("Vd", f"w{s}", "cok" if t == 0 else "cbad", f"w{t}", "L", amp)
    for a, k in plain:
        R("cok", mk(a, k), "cok" if k == ones else "cbad", mk(a, k), "L")
        R("cbad", mk(a, k), "cbad", mk(a, k), "L")
    R("cok", blank, "acc", blank, "R")
    R("cbad", blank, "rej", blank, "R")
    # drop duplicate (t_b, symbol) rules produced when several b share a row
    seen, uniq = set(), []
    for r in rules:
        if r not in seen:
            seen.add(r)
            uniq.append(r)
    states = ["q0", "P1", "B1", "B2", "Vd", "cok", "cbad"]
    states += [f"{ph}{i}" for ph in "uv" for i in range(m)]
    states += [f"p{s}" for s in S] + [f"t{s}" for s in S] + ["acc", "rej"]
    tape = list(A) + [blank] + [mk(a, k) for a, k in plain] + \
        [mk(a, k, s) for a, k in plain for s in S] + ["o0", "o1", "w0", "w1", "w2", "w3"]
    meta = {"m": str(m)}
    meta.update(notes)
    return MachineSpec("quantum", tuple(states), tuple(A), tuple(tape), blank, tuple(uniq),
                       "q0", "acc", "rej", {}, None, meta)


def nqtm_expected(g, x, m, cut=HALF):
    """(24/25)^(2mn+2) (p - 1/2)^2 for the normalized automaton."""
    h, _ = normalize_pfa(g, cut)
    p = acceptance_value(h, x)
    n = len(x)
    return Fraction(24, 25) ** (2 * m * n + 2) * (p - HALF) ** 2


# ------------------------------------------------------------ quantum gaps

@dataclass
class GapResult:
    gap: int
    time: int
    d: int


def qtm_to_gap(spec, k=None, fuel=None):
    """(d, gap_eval) with p_M(x) = gap_eval(x).gap * d^-time.

    Every amplitude is r/c for the least common denominator c; a rule of
    amplitude r/c stands for |r| parallel paths, and the sign is tracked by
    keeping positive and negative path counts per configuration.  The
    acceptance probability is the sum over accepting configurations of the
    squared signed count, over c^(2 time) = d^time."""
    if spec.variant != "quantum":
        raise PreconditionError("qtm_to_gap needs a quantum machine")
    c = 1
    for r in spec.rules:
        c = math.lcm(c, Fraction(r.weight).denominator)
    d = c * c

    def gap_eval(x):
        f = fuel if fuel is not None else default_fuel(spec, len(x))
        cur = {initial_configuration(spec, x): (1, 0)}
        t = 0
        while True:
            live = [cf for cf, (p, q) in cur.items() if p != q]
            halting = [cf for cf in live if spec.is_halting(cf.state)]
            if len(halting) == len(live):
                break
            if halting:
                raise HaltingViolation(f"halting configuration at time {t} before all branches halt")
            if t >= f:
                from .simulator import FuelExhausted
                raise FuelExhausted(f"superposition not halted after {f} steps")
            nxt = {}
            for cf, (p, q) in cur.items():
                if p == q:
                    continue
                for _, c2, w in successors(spec, cf):
                    r = Fraction(w) * c
                    mult = abs(r.numerator)
                    a, b = (p * mult, q * mult) if r > 0 else (q * mult, p * mult)
                    o = nxt.get(c2, (0, 0))
                    nxt[c2] = (o[0] + a, o[1] + b)
            cur = nxt
            t += 1
            norm = sum(((p - q) ** 2 for p, q in cur.values()), 0)
            if norm != c ** (2 * t):
                raise NormViolation(f"squared norm {Fraction(norm, c ** (2 * t))} at time {t}")
        for cf, (p, q) in cur.items():
            if p != q and cf.head != 0:
                raise NotStationary(f"halting configuration with head at {cf.head} on {x!r}")
        gap = sum(((p - q) ** 2 for cf, (p, q) in cur.items() if cf.state == spec.accept), 0)
        return GapResult(gap, t, d)

    return d, gap_eval


# ----------------------------------------------------------- gap closures

def totalize(spec):
    """Same machine with every implicit reject written out as a rule."""
    extra = []
    for q in spec.states:
        if spec.is_halting(q):
            continue
        for a in spec.tape_alphabet:
            if not spec.rules_for(q, a):
                extra.append(Rule(q, a, spec.reject, a, "N"))
    if not extra:
        return spec
    return MachineSpec(spec.variant, spec.states, spec.input_alphabet, spec.tape_alphabet,
                       spec.blank, spec.rules + tuple(extra), spec.start, spec.accept,
                       spec.reject, dict(spec.labels), spec.declared_bound, dict(spec.meta))


def _prefixed(spec, tag, halt_map, start_map=None):
    """Rules and states of spec under prefix tag; halting targets via halt_map."""
    states, rules = [], []
    for q in spec.states:
        if not spec.is_halting(q):
            states.append(f"{tag}.{q}")
    for r in spec.rules:
        dst = halt_map[r.dst] if spec.is_halting(r.dst) else f"{tag}.{r.dst}"
        rules.append(Rule(f"{tag}.{r.src}", r.read, dst, r.write, r.move, r.weight))
    return states, rules


def _union_tape(*specs):
    out = []
    for s in specs:
        for a in s.tape_alphabet:
            if a not in out:
                out.append(a)
    return tuple(out)


def check_clean(spec, max_len=4, fuel=None):
    """Every halting configuration has the head on cell 0 and the input intact."""
    for x in strings(spec.input_alphabet, max_len):
        t = explore(spec, x, fuel)
        init = initial_configuration(spec, x)
        for leaf in t.leaves:
            c = t.nodes[leaf].config
            if c.head != 0 or c.tape != init.tape:
                raise PreconditionError(f"machine is not clean on {x!r}: halts at {c}")


def _branch(spec_f, spec_g, swap_g):
    F, G = totalize(spec_f), totalize(spec_g)
    sf, rf = _prefixed(F, "F", {F.accept: "acc", F.reject: "rej"})
    gmap = {G.accept: "rej", G.reject: "acc"} if swap_g else {G.accept: "acc", G.reject: "rej"}
    sg, rg = _prefixed(G, "G", gmap)
    tape = _union_tape(F, G)
    start = [Rule("S0", a, f"F.{F.start}", a, "N") for a in tape] + \
            [Rule("S0", a, f"G.{G.start}", a, "N") for a in tape]
    start.sort(key=lambda r: tape.index(r.read))
    return MachineSpec("counting", ("S0",) + tuple(sf) + tuple(sg) + ("acc", "rej"),
                       F.input_alphabet, tape, F.blank, tuple(start + rf + rg), "S0",
                       "acc", "rej")


def gap_sum(F, G):
    """gap = gap_F + gap_G: a first nondeterministic stay-step picks F or G."""
    return _branch(F, G, False)


def gap_difference(F, G):
    """gap = gap_F - gap_G: as the sum, with G's outcomes swapped."""
    return _branch(F, G, True)


def gap_product(F, G, check_len=4):
    """gap = gap_F * gap_G: run F, then G from the untouched input, accept iff
    both runs end alike.  F must halt on cell 0 with the input intact."""
    check_clean(F, check_len)
    F, G = totalize(F), totalize(G)
    sf, rf = _prefixed(F, "F", {F.accept: f"G+.{G.start}", F.reject: f"G-.{G.start}"})
    sgp, rgp = _prefixed(G, "G+", {G.accept: "acc", G.reject: "rej"})
    sgm, rgm = _prefixed(G, "G-", {G.accept: "rej", G.reject: "acc"})
    tape = _union_tape(F, G)
    return MachineSpec("counting", tuple(sf) + tuple(sgp) + tuple(sgm) + ("acc", "rej"),
                       F.input_alphabet, tape, F.blank, tuple(rf + rgp + rgm), f"F.{F.start}",
                       "acc", "rej")


# ------------------------------------------------------------- reductions

def check_reduction_contract(spec, x, fuel=None, tree=None):
    """Raise unless every path ends on the start cell and every accepting
    path leaves a valid outcome.  Returns the tree."""
    t = tree if tree is not None else explore(spec, x, fuel)
    for leaf in t.leaves:
        c = t.nodes[leaf].config
        if c.head != 0:
            raise ReductionContractViolation(f"path ends on cell {c.head} for input {x!r}",
                                             t.path_configs(leaf))
        if c.state == spec.accept and outcome_of(c, spec.blank) is None:
            raise ReductionContractViolation(f"scattered output on input {x!r}",
                                             t.path_configs(leaf))
    return t


def compose_reductions(first, second, check_len=3, fuel=None):
    """Run first; when it accepts, run second on the value it left on the tape."""
    for x in strings(first.input_alphabet, check_len):
        check_reduction_contract(first, x, fuel)
    for x in strings(second.input_alphabet, check_len):
        check_reduction_contract(second, x, fuel)
    A, B = totalize(first), totalize(second)
    sa, ra = _prefixed(A, "1", {A.accept: f"2.{B.start}", A.reject: "rej"})
    sb, rb = _prefixed(B, "2", {B.accept: "acc", B.reject: "rej"})
    variant = "deterministic" if A.variant == B.variant == "deterministic" else "nondeterministic"
    return MachineSpec(variant, tuple(sa) + tuple(sb) + ("acc", "rej"), A.input_alphabet,
                       _union_tape(A, B), A.blank, tuple(ra + rb), f"1.{A.start}", "acc", "rej")


def reduce_membership(reducer, target, x, fuel=None):
    """True iff some accepting path leaves a value in the target language."""
    t = check_reduction_contract(reducer, x, fuel)
    oc = collect_outcomes(t)
    return any(target(y) for y in sorted(oc.counts))


def gpfa_language(g, cp, name="gpfa"):
    return LanguageOracle(name, tuple(g.alphabet), lambda x: cut_language_member(g, cp, x))


def machine_language(spec, fuel=None, name=None):
    """Language of a machine under the acceptance rule of its variant."""
    v = spec.variant

    @functools.lru_cache(maxsize=None)
    def member(x):
        t = None if v == "quantum" else explore(spec, x, fuel)
        if v == "alternating":
            return evaluate_alternating(spec, t)
        if v == "probabilistic":
            return acceptance_probability(t) > HALF
        if v == "quantum":
            return quantum_run(spec, x, fuel).p > 0
        return accepts_nondet(t)

    return LanguageOracle(name or "L(M)", tuple(spec.input_alphabet), member)
