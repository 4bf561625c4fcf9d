"""Folding a linear-time machine into its input area.

The original tape is cut into 4k blocks of width n-1 (n = |x| >= 3).  Block
i becomes track i of a composite tape symbol; even tracks run left to right,
odd tracks run right to left, so a walk off the end of one block lands on the
neighbouring track of the same folded cell.  Cell 0 carries '¢' on odd tracks
and cell n-1 carries '$' on even tracks; reading a marker on track i means the
original head is really on track i+1.

Inputs of length 0, 1 and 2 are handled by replaying the original machine's
configurations in the finite control while the head sits still.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .langlab import strings
from .machine import MachineError, MachineSpec, PreconditionError, Rule, successors
from .simulator import FuelExhausted, default_fuel, explore, running_time

LEFT_MARK = "¢"
RIGHT_MARK = "$"
REVERSE = {"L": "R", "R": "L", "N": "N"}


class NoLinearBoundWitness(MachineError):
    pass


class FoldingPrereqMissing(MachineError):
    pass


class AlphabetBudgetExceeded(MachineError):
    pass


@dataclass(frozen=True)
class FoldingLayout:
    k: int

    @property
    def track_count(self):
        return 4 * self.k

    @property
    def tracks(self):
        return range(-2 * self.k, 2 * self.k)

    def slot(self, i):
        return i + 2 * self.k

    def original_cell(self, n, track, j):
        """Original tape cell shown at folded cell j on the given track."""
        w = n - 1
        return track * w + (j if track % 2 == 0 else w - j)


def choose_k(spec, sample_max_len, fuel=None):
    """Minimal k with Time(x) <= k|x| over all inputs of length 3..sample_max_len."""
    k = 1
    for n in range(3, sample_max_len + 1):
        for x in strings(spec.input_alphabet, n, n):
            f = fuel if fuel is not None else default_fuel(spec, n)
            try:
                t = running_time(explore(spec, x, f))
            except FuelExhausted as e:
                raise NoLinearBoundWitness(f"no halting within {f} steps on {x!r}") from e
            k = max(k, math.ceil(t / n))
    return k


# ------------------------------------------------------------------ composites

class _Composites:
    """Materialized composite symbols: (kind, track contents) -> name."""

    def __init__(self, spec, layout, budget):
        self.spec = spec
        self.layout = layout
        b = spec.blank
        writes = {}
        for r in spec.rules:
            writes.setdefault(r.read, set()).add(r.write)

        def closure(init):
            seen = set(init)
            todo = list(init)
            while todo:
                a = todo.pop()
                for c in writes.get(a, ()):
                    if c not in seen:
                        seen.add(c)
                        todo.append(c)
            return sorted(seen, key=spec.symbol_index.__getitem__)

        sigma = list(spec.input_alphabet)
        data = closure(sigma + [b])
        blank_only = closure([b])
        per_kind = {}
        for kind in "LMR":
            cols = []
            for i in layout.tracks:
                if kind == "L" and i % 2:
                    cols.append([LEFT_MARK])
                elif kind == "R" and i % 2 == 0:
                    cols.append([RIGHT_MARK])
                elif (kind != "R" and i == 0) or (kind == "R" and i == 1):
                    cols.append(data)
                else:
                    cols.append(blank_only)
            per_kind[kind] = cols
        total = sum(math.prod(len(c) for c in cols) for cols in per_kind.values())
        if total > budget:
            raise AlphabetBudgetExceeded(f"{total} composite symbols exceed the budget {budget}")
        self.items = []
        for kind in "LMR":
            for combo in itertools.product(*per_kind[kind]):
                self.items.append((kind, combo))
        self.names = {it: self.name(*it) for it in self.items}

    @staticmethod
    def name(kind, combo):
        return f"[{kind}:{'|'.join(combo)}]"

    def initial(self, kind, a):
        b = self.spec.blank
        combo = []
        for i in self.layout.tracks:
            if kind == "L" and i % 2:
                combo.append(LEFT_MARK)
            elif kind == "R" and i % 2 == 0:
                combo.append(RIGHT_MARK)
            elif (kind != "R" and i == 0) or (kind == "R" and i == 1):
                combo.append(a)
            else:
                combo.append(b)
        return kind, tuple(combo)


# --------------------------------------------------------------------- builder

def _track_state(i, q):
    return f"<{i},{q}>"


class _Builder:
    def __init__(self, spec, k, recover, budget):
        if spec.variant == "quantum":
            raise PreconditionError("folding is not provided for quantum machines")
        self.m = spec
        self.k = k
        self.layout = FoldingLayout(k)
        self.recover = recover
        self.comp = _Composites(spec, self.layout, budget)
        self.rules = []
        self.states = []
        self.labels = {}
        self._seen_states = set()
        self.acc, self.rej = spec.accept, spec.reject

    def state(self, q, label=None):
        if q not in self._seen_states:
            if q in (self.acc, self.rej):
                raise MachineError(f"generated state {q!r} collides with a halting state")
            self._seen_states.add(q)
            self.states.append(q)
        if label is not None and self.m.variant == "alternating":
            self.labels[q] = label
        return q

    def add(self, src, read, dst, write, move, weight=1):
        self.rules.append(Rule(src, read, dst, write, move, weight))

    def label_of(self, q):
        return self.m.labels.get(q, "E")

    def rules_or_reject(self, q, a):
        """Original rules for (q, a); a missing rule is the explicit reject."""
        rs = [r for _, r in self.m.rules_for(q, a)]
        return rs or [Rule(q, a, self.m.reject, a, "N")]

    # halting: either the original halting state or the output walk
    def halt_target(self, h):
        if not self.recover:
            return h
        return self.state(f"W:{h}", "E")

    # -------------------------------------------------------------- phase 3
    def simulation(self):
        m, lay = self.m, self.layout
        lo, hi = -2 * self.k, 2 * self.k - 1
        live = [q for q in m.states if not m.is_halting(q)]
        for i in lay.tracks:
            for q in live:
                self.state(_track_state(i, q), self.label_of(q))
        for i in lay.tracks:
            for q in live:
                src = _track_state(i, q)
                for kind, combo in self.comp.items:
                    cname = self.comp.names[(kind, combo)]
                    t = i
                    if combo[lay.slot(t)] in (LEFT_MARK, RIGHT_MARK):
                        t = i + 1
                        if t > hi:
                            self.add(src, cname, self.halt_target(self.rej), cname, "N")
                            continue
                    a = combo[lay.slot(t)]
                    for r in self.rules_or_reject(q, a):
                        new = list(combo)
                        new[lay.slot(t)] = r.write
                        wname = self.comp.names.get((kind, tuple(new)))
                        if wname is None:
                            raise MachineError("composite closure is incomplete")
                        if t % 2 == 0:
                            if kind == "L" and r.move == "L":
                                move, nt = "R", t - 1
                            else:
                                move, nt = r.move, t
                        else:
                            if kind == "R" and r.move == "L":
                                move, nt = "L", t - 1
                            else:
                                move, nt = REVERSE[r.move], t
                        if m.is_halting(r.dst):
                            dst = self.halt_target(r.dst)
                        elif nt < lo:
                            dst, move = self.halt_target(self.rej), "N"
                        else:
                            dst = _track_state(nt, r.dst)
                        self.add(src, cname, dst, wname, move, r.weight)

    # -------------------------------------------------------------- phase 2
    def preprocessing(self):
        m, comp = self.m, self.comp
        sig = m.input_alphabet
        b = m.blank
        name = lambda kind, a: comp.names[comp.initial(kind, a)]
        q1, q2, q3 = self.state("P1", "E"), self.state("P2", "E"), self.state("P3", "E")
        for a in sig:
            self.add("F0", a, self.state(f"A1:{a}", "E"), name("L", a), "R")
        for a in sig:
            for c in sig:
                self.add(f"A1:{a}", c, self.state(f"A2:{a}|{c}", "E"), name("M", c), "R")
        for a in sig:
            for c in sig:
                for e in sig:
                    self.add(f"A2:{a}|{c}", e, q1, name("M", e), "R")
        for a in sig:
            self.add(q1, a, q1, name("M", a), "R")
        self.add(q1, b, q2, b, "L")
        for a in sig:
            self.add(q2, name("M", a), q3, name("R", a), "L")
            self.add(q3, name("M", a), q3, name("M", a), "L")
        # at the left end q3 behaves exactly as <0, start>
        start = _track_state(0, m.start)
        for a in sig:
            c = name("L", a)
            for r in [r for r in self.rules if r.src == start and r.read == c]:
                self.add(q3, c, r.dst, r.write, r.move, r.weight)

    # -------------------------------------------------------------- phase 1
    def short_inputs(self):
        m, comp = self.m, self.comp
        sig = m.input_alphabet
        b = m.blank
        # n = 0: the outcome on the empty input is always the empty string
        tree = explore(m, "")
        if len(tree.leaves) == 1:
            self.add("F0", b, tree.nodes[tree.leaves[0]].config.state, b, "N")
        else:
            self.replay("F0", "", b, 0)
        for a in sig:
            self.replay(f"A1:{a}", a, b, 1)
        for a in sig:
            for c in sig:
                # step back onto cell 1 before replaying
                root = self.state(f"R:{a}{c}:0", self.label_of(m.start))
                self.add(f"A2:{a}|{c}", b, root, b, "L")
                self.replay(root, a + c, comp.names[comp.initial("M", c)], 2)

    def replay(self, entry, x, parked, n):
        """Rules that walk through the original configurations on x in place.

        `entry` performs the root configuration's step; later configurations
        get their own states R:x:j.  The head stays on the parked cell."""
        m = self.m
        tree = explore(m, x)
        ids = {}
        order = []
        for nd in tree.nodes:
            c = nd.config
            if not m.is_halting(c.state) and c not in ids:
                ids[c] = len(ids)
                order.append(c)
        root = tree.nodes[0].config

        def sname(c):
            return entry if c == root else self.state(f"R:{x}:{ids[c]}", self.label_of(c.state))

        for c in order:
            src = sname(c)
            for _, c2, w in successors(m, c):
                if m.is_halting(c2.state):
                    self.halt_short(src, parked, c2, x, n, w)
                else:
                    self.add(src, parked, sname(c2), parked, "N", w)

    def halt_short(self, src, parked, c, x, n, w):
        """Transition into the original halting configuration c on a short input."""
        h = c.state
        if not self.recover:
            self.add(src, parked, h, parked, "N", w)
            return
        d = c.tape_dict()
        b = self.m.blank
        outs = [d.get(i, b) for i in range(n)]
        if n == 0:
            self.add(src, parked, h, b, "N", w)
            return
        if n == 1:
            wo = self.state(f"O1:{h}:{outs[0]}", "E")
            self.add(src, parked, wo, b, "L", w)
            return
        wo = self.state(f"O2:{h}:{outs[0]}", "E")
        self.add(src, parked, wo, outs[1], "L", w)

    # ---------------------------------------------------------- recovery
    def recovery(self):
        m, comp, lay = self.m, self.comp, self.layout
        b = m.blank
        for h in (self.acc, self.rej):
            walk, out = f"W:{h}", self.state(f"O:{h}", "E")
            self.state(walk, "E")
            for (kind, combo), cname in comp.names.items():
                if kind == "L":
                    self.add(walk, cname, out, combo[lay.slot(0)], "R")
                else:
                    self.add(walk, cname, walk, cname, "L")
                if kind == "M":
                    self.add(out, cname, out, combo[lay.slot(0)], "R")
                elif kind == "R":
                    self.add(out, cname, h, combo[lay.slot(1)], "R")
        # short-input write-out states
        lcomps = [(combo, cname) for (kind, combo), cname in comp.names.items() if kind == "L"]
        for q in list(self.states):
            if q.startswith("O1:"):
                _, h, o = q.split(":", 2)
                for combo, cname in lcomps:
                    self.add(q, cname, h, o, "R")
            elif q.startswith("O2:"):
                _, h, o = q.split(":", 2)
                fin = self.state(f"O3:{h}", "E")
                for combo, cname in lcomps:
                    self.add(q, cname, fin, o, "R")
        for h in (self.acc, self.rej):
            fin = f"O3:{h}"
            if fin in self._seen_states:
                for a in m.tape_alphabet:
                    self.add(fin, a, h, a, "R")

    def build(self):
        m = self.m
        self.state("F0", "E")
        self.simulation()
        self.preprocessing()
        self.short_inputs()
        if self.recover:
            self.recovery()
        tape = list(m.tape_alphabet) + [n for n in self.comp.names.values()]
        states = tuple(self.states) + (m.accept, m.reject)
        # order rules so each (state, symbol) group keeps the original branch order
        meta = {"folded": "yes", "k": str(self.k), "recovered": "yes" if self.recover else "no",
                "q1": "P1", "q2": "P2", "_source": m}
        return MachineSpec(m.variant, states, m.input_alphabet, tuple(tape), m.blank,
                           tuple(self.rules), "F0", m.accept, m.reject, dict(self.labels),
                           None, meta)


def fold_machine(spec, k, validated=None, budget=20000):
    """Folded machine whose head never leaves the input area (n >= 3).

    `validated` records how k was obtained: a (lo, hi) length range from
    choose_k, or None for a user-supplied (trusted) k."""
    if k < 1:
        raise MachineError("k must be positive")
    f = _Builder(spec, k, False, budget).build()
    f.meta["validated"] = "trusted" if validated is None else f"{validated[0]}..{validated[1]}"
    return f


def fold_output_recovery(folded, budget=20000):
    """Folded machine that rewrites the tape to the original outcome before halting.

    After recovery every halting path ends one cell right of the input, so the
    right input boundary is crossed last in the halting state."""
    src = folded.meta.get("_source")
    if folded.meta.get("folded") != "yes" or src is None:
        raise FoldingPrereqMissing("fold_output_recovery needs a machine built by fold_machine")
    f = _Builder(src, int(folded.meta["k"]), True, budget).build()
    f.meta["validated"] = folded.meta.get("validated", "trusted")
    return f


def fold_auto(spec, sample_max_len, fuel=None, recover=False, budget=20000):
    k = choose_k(spec, sample_max_len, fuel)
    f = fold_machine(spec, k, (3, sample_max_len), budget)
    return fold_output_recovery(f, budget) if recover else f


def preprocessing_states(folded):
    """States of the reversible preprocessing phase."""
    return {q for q in folded.states
            if q in ("F0", "P1", "P2", "P3") or q.startswith(("A1:", "A2:"))}
