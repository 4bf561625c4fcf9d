"""Exhaustive execution of machines under the strong running-time convention.

The central object is the computation tree: every branch of every rule is
expanded until it halts (or fuel runs out).  Counting, probabilities,
alternating evaluation and outcome extraction are all read off the tree.
Quantum machines are evolved as merged superpositions instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .machine import (Configuration, MachineError, initial_configuration,
                      successors, PreconditionError)


class FuelExhausted(MachineError):
    def __init__(self, msg, prefix=None):
        self.prefix = prefix or []
        super().__init__(msg)


class NotHalted(MachineError):
    pass


class MissingLabel(MachineError):
    pass


class HaltingViolation(MachineError):
    pass


class NormViolation(MachineError):
    pass


class BadResidueSet(MachineError):
    pass


def default_fuel(spec, n):
    if spec.declared_bound is not None:
        return int(spec.declared_bound(n))
    return 64 * (n + 1)


@dataclass
class Node:
    config: Configuration
    parent: int | None
    rule: int | None          # index into spec.rules, None for root / implicit reject
    weight: Fraction
    depth: int
    toss: bool
    children: list = field(default_factory=list)


@dataclass
class ComputationTree:
    spec: object
    input: str
    nodes: list
    leaves: list              # node indices, in canonical (rule-order DFS) order
    stuck: list = field(default_factory=list)   # nodes that used the implicit reject

    @property
    def root(self):
        return self.nodes[0].config

    def path(self, leaf):
        out = []
        i = leaf
        while i is not None:
            out.append(i)
            i = self.nodes[i].parent
        return out[::-1]

    def paths(self):
        return [self.path(l) for l in self.leaves]

    def path_configs(self, leaf):
        return [self.nodes[i].config for i in self.path(leaf)]

    def accepting_leaves(self):
        acc = self.spec.accept
        return [l for l in self.leaves if self.nodes[l].config.state == acc]

    def rejecting_leaves(self):
        rej = self.spec.reject
        return [l for l in self.leaves if self.nodes[l].config.state == rej]

    def tosses(self, leaf):
        return sum(1 for i in self.path(leaf) if self.nodes[i].toss)

    def weight(self, leaf):
        w = Fraction(1)
        for i in self.path(leaf)[1:]:
            w *= self.nodes[i].weight
        return w


def explore(spec, x, fuel=None):
    """Full computation tree of spec on x."""
    if fuel is None:
        fuel = default_fuel(spec, len(x))
    if fuel < 0:
        raise PreconditionError("fuel must be nonnegative")
    root = initial_configuration(spec, x)
    nodes = [Node(root, None, None, Fraction(1), 0, False)]
    leaves, stuck = [], []
    stack = [0]
    while stack:
        i = stack.pop()
        nd = nodes[i]
        c = nd.config
        if spec.is_halting(c.state):
            leaves.append(i)
            continue
        if nd.depth >= fuel:
            tree = ComputationTree(spec, x, nodes, leaves)
            raise FuelExhausted(f"path not halted after {fuel} steps on {x!r}",
                                tree.path_configs(i))
        succ = successors(spec, c)
        toss = len(succ) == 2
        kids = []
        for ri, c2, w in succ:
            nodes.append(Node(c2, i, ri, w, nd.depth + 1, toss))
            j = len(nodes) - 1
            if ri is None:
                stuck.append(j)
            kids.append(j)
        nd.children = kids
        stack.extend(reversed(kids))
    return ComputationTree(spec, x, nodes, leaves, stuck)


def _require_halted(tree):
    if not tree.leaves:
        raise NotHalted("tree has no leaves")


def running_time(tree):
    _require_halted(tree)
    return max(tree.nodes[l].depth for l in tree.leaves)


def is_synchronous(tree):
    _require_halted(tree)
    return len({tree.nodes[l].depth for l in tree.leaves}) == 1


def accepts_nondet(tree):
    return bool(tree.accepting_leaves())


def evaluate_alternating(spec, tree):
    """Bottom-up AND/OR evaluation of the tree; leaves are true iff accepting."""
    if spec.variant != "alternating":
        raise PreconditionError("evaluate_alternating needs an alternating machine")
    value = {}
    for i in reversed(range(len(tree.nodes))):
        nd = tree.nodes[i]
        q = nd.config.state
        if not nd.children:
            value[i] = q == spec.accept
            continue
        lab = spec.labels.get(q)
        if lab is None:
            raise MissingLabel(f"state {q!r} has no label")
        vals = [value[j] for j in nd.children]
        value[i] = any(vals) if lab == "E" else all(vals)
    return value[0]


def alternation_count(labels):
    """Number of label switches along a sequence of E/A labels."""
    labels = [l for l in labels if l is not None]
    return sum(1 for a, b in zip(labels, labels[1:]) if a != b)


def path_labels(spec, tree, leaf):
    return [spec.labels.get(tree.nodes[i].config.state) for i in tree.path(leaf)]


@dataclass(frozen=True)
class CountingResult:
    sharp: int
    gap: int


def count_and_gap(tree):
    _require_halted(tree)
    a = len(tree.accepting_leaves())
    r = len(tree.rejecting_leaves())
    return CountingResult(a, a - r)


def acceptance_probability(tree):
    """Sum over accepting leaves of 2^-(coin tosses on the path)."""
    _require_halted(tree)
    return sum((Fraction(1, 2 ** tree.tosses(l)) for l in tree.accepting_leaves()), Fraction(0))


def total_mass(tree):
    _require_halted(tree)
    return sum((Fraction(1, 2 ** tree.tosses(l)) for l in tree.leaves), Fraction(0))


def mod_predicate(count, k, residues):
    residues = set(residues)
    if k < 2 or not residues or not residues < set(range(k)):
        raise BadResidueSet(f"need k >= 2 and a nonempty proper subset of [0,{k-1}]")
    return count % k in residues


# ------------------------------------------------------------------ outcomes

def outcome_of(config, blank):
    """Valid outcome of a halting configuration, or None if the tape is scattered."""
    cells = [c for c, _ in config.tape]
    if not cells:
        return ""
    if cells[0] != 0 or cells[-1] != len(cells) - 1:
        return None
    return "".join(a for _, a in config.tape)


@dataclass
class Outcomes:
    counts: dict
    invalid: list

    def strings(self):
        return set(self.counts)


def collect_outcomes(tree):
    _require_halted(tree)
    counts, invalid = {}, []
    for l in tree.accepting_leaves():
        c = tree.nodes[l].config
        s = outcome_of(c, tree.spec.blank)
        if s is None:
            invalid.append(c)
        else:
            counts[s] = counts.get(s, 0) + 1
    return Outcomes(counts, invalid)


@dataclass
class SimulationResult:
    time: int
    accepting_paths: int
    rejecting_paths: int
    synchronous: bool
    outcomes: dict
    stuck: int = 0


def run(spec, x, fuel=None):
    t = explore(spec, x, fuel)
    oc = collect_outcomes(t)
    return SimulationResult(running_time(t), len(t.accepting_leaves()), len(t.rejecting_leaves()),
                            is_synchronous(t), oc.counts, len(t.stuck))


# ------------------------------------------------------------- reversibility

@dataclass
class ReversibilityResult:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def check_reversible_dynamic(spec, inputs, fuel=None):
    """True iff no reachable configuration has two distinct predecessors."""
    pred = {}
    for x in inputs:
        t = explore(spec, x, fuel)
        for nd in t.nodes:
            if nd.parent is None:
                continue
            p = t.nodes[nd.parent].config
            seen = pred.setdefault(nd.config, p)
            if seen != p:
                return ReversibilityResult(False, (seen, p, nd.config))
    return ReversibilityResult(True)


# ------------------------------------------------------------------- quantum

@dataclass
class QuantumResult:
    p: Fraction
    time: int
    norm_trace: list
    final: dict


def quantum_run(spec, x, fuel=None, check_norm=True):
    """Evolve the superposition until every configuration is halting."""
    if spec.variant != "quantum":
        raise PreconditionError("quantum_run needs a quantum machine")
    if fuel is None:
        fuel = default_fuel(spec, len(x))
    sup = {initial_configuration(spec, x): Fraction(1)}
    trace = [Fraction(1)]
    t = 0
    while True:
        halting = [c for c in sup if spec.is_halting(c.state)]
        if len(halting) == len(sup):
            break
        if halting:
            raise HaltingViolation(f"halting configuration at time {t} before all branches halt")
        if t >= fuel:
            raise FuelExhausted(f"superposition not halted after {fuel} steps")
        nxt = {}
        for c, amp in sup.items():
            for _, c2, w in successors(spec, c):
                nxt[c2] = nxt.get(c2, 0) + amp * w
        sup = {c: a for c, a in nxt.items() if a != 0}
        t += 1
        norm = sum((a * a for a in sup.values()), Fraction(0))
        trace.append(norm)
        if check_norm and norm != 1:
            raise NormViolation(f"squared norm {norm} at time {t}")
    p = sum((a * a for c, a in sup.items() if c.state == spec.accept), Fraction(0))
    return QuantumResult(p, t, trace, sup)
