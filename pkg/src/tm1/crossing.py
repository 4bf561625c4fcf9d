"""Crossing sequences: extraction, enumeration, audits and the local relation.

Boundary b sits between cell b-1 and cell b.  A crossing records the state
the machine is in *after* the transition that moves the head across the
boundary; stay-moves record nothing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .langlab import strings
from .machine import MachineError
from .simulator import explore


class LengthBoundExceeded(MachineError):
    def __init__(self, msg, witness=None):
        self.witness = witness
        super().__init__(msg)


class UnboundedCrossing(MachineError):
    def __init__(self, msg, table=None):
        self.table = table
        super().__init__(msg)


def seq_key(spec, v):
    """Canonical order: length first, then state indices."""
    idx = spec.state_index
    return (len(v), tuple(idx[q] for q in v))


def sort_seqs(spec, seqs):
    return sorted(seqs, key=lambda v: seq_key(spec, v))


@dataclass
class CrossingProfile:
    seqs: dict                     # boundary -> tuple of states

    def at(self, b):
        return self.seqs.get(b, ())

    def total(self):
        return sum(len(v) for v in self.seqs.values())

    def max_length(self):
        return max((len(v) for v in self.seqs.values()), default=0)


def crossing_profile(configs):
    """Profile of a path given as its list of configurations."""
    prof = {}
    for a, b in zip(configs, configs[1:]):
        if b.head == a.head + 1:
            prof.setdefault(b.head, []).append(b.state)
        elif b.head == a.head - 1:
            prof.setdefault(a.head, []).append(b.state)
    return CrossingProfile({k: tuple(v) for k, v in sorted(prof.items())})


def tree_profiles(tree, leaves=None):
    leaves = tree.leaves if leaves is None else leaves
    return [(l, crossing_profile(tree.path_configs(l))) for l in leaves]


# ------------------------------------------------------------- enumeration

@dataclass
class CrossingSet:
    n: int
    sequences: list                # canonical order
    witnesses: dict                # v -> (input, leaf, boundary)

    def __len__(self):
        return len(self.sequences)

    def __contains__(self, v):
        return v in self.witnesses


def enumerate_crossing_set(spec, n, fuel=None, trees=None):
    """S_n: crossing sequences at critical boundaries of accepting paths, |x| <= n."""
    wit = {}
    for x in strings(spec.input_alphabet, n):
        t = trees[x] if trees is not None else explore(spec, x, fuel)
        for leaf, prof in tree_profiles(t, t.accepting_leaves()):
            for b in range(len(x) + 1):
                wit.setdefault(prof.at(b), (x, leaf, b))
    return CrossingSet(n, sort_seqs(spec, wit), wit)


@dataclass
class CrossingAudit:
    c_observed: int
    table: dict                    # n -> max length over all |x| <= n

    def stabilized(self):
        """True if the upper half of the table is constant."""
        ns = sorted(self.table)
        upper = ns[len(ns) // 2:]
        return len({self.table[n] for n in upper}) <= 1


def max_crossing_length(spec, n_max, fuel=None):
    table = {}
    best = 0
    for n in range(n_max + 1):
        for x in strings(spec.input_alphabet, n, n):
            t = explore(spec, x, fuel)
            for _, prof in tree_profiles(t):
                best = max(best, prof.max_length())
        table[n] = best
    return CrossingAudit(best, table)


def _long_crossing(spec, bound, n_max, fuel=None):
    """First (input, boundary, sequence) with a sequence longer than bound."""
    for x in strings(spec.input_alphabet, n_max):
        t = explore(spec, x, fuel)
        for _, prof in tree_profiles(t):
            for b, v in prof.seqs.items():
                if len(v) > bound:
                    return x, b, v
    return None


def require_bounded(spec, n_max=8, fuel=None):
    audit = max_crossing_length(spec, n_max, fuel)
    if not audit.stabilized():
        raise UnboundedCrossing(f"crossing lengths keep growing: {audit.table}", audit.table)
    return audit


# ------------------------------------------------------- the local relation

class _LocalHistories:
    """All single-cell histories of a folded machine, given the left sequence.

    A history of cell c is determined by the crossing sequence u at its left
    boundary (entries at even positions, exits at odd positions), the
    initial symbol, and guesses for the states in which the head comes back
    from the right.  The result maps (v, final symbol, halting state or None)
    to the total weight of matching histories.
    """

    def __init__(self, spec, weight):
        self.spec = spec
        self.weight = weight
        self.overflow = False
        self.memo = {}
        # the head can only come back from the right in a state that is the
        # target of a left move reachable (in the state graph) from the state
        # it left in
        succ = {}
        for r in spec.rules:
            succ.setdefault(r.src, set()).add(r.dst)
        ltarget = {}
        for r in spec.rules:
            if r.move == "L":
                ltarget.setdefault(r.src, set()).add(r.dst)
        order = spec.state_index
        self.guesses = {}
        for x in spec.states:
            seen, todo = {x}, [x]
            while todo:
                q = todo.pop()
                for q2 in succ.get(q, ()):
                    if q2 not in seen:
                        seen.add(q2)
                        todo.append(q2)
            back = set()
            for q in seen:
                back |= ltarget.get(q, set())
            self.guesses[x] = sorted(back, key=order.__getitem__)
        self.steps = {}
        for (q, a), rs in spec.table.items():
            self.steps[(q, a)] = [(r.dst, r.write, r.move, weight(r)) for _, r in rs]

    def run(self, u, sym, bound, start=False, guesses=True):
        """Histories of one cell; sets self.overflow if some history needed
        more than `bound` crossings on its right boundary."""
        spec = self.spec
        # the future of a history depends only on the unread suffix of u,
        # so one memo serves every left sequence
        memo = self.memo.setdefault((bound, guesses), {})
        active = set()
        guess = self.guesses if guesses else {}
        steps_of = self.steps

        def add(acc, key, w):
            acc[key] = acc.get(key, 0) + w

        def go(rest, a, mode, p, vlen):
            key = (rest, a, mode, p, vlen)
            if key in memo:
                return memo[key]
            out, over = {}, False
            if mode == "outL":
                if not rest:
                    out[((), a, None)] = 1
                else:
                    out, over = go(rest[1:], a, "in", rest[0], vlen)
            elif mode == "outR":
                if not rest:
                    out[((), a, None)] = 1
                if vlen < bound:
                    for e in guess.get(p, ()):
                        sub, o = go(rest, a, "in", e, vlen + 1)
                        over |= o
                        for (v, f, h), w in sub.items():
                            add(out, ((e,) + v, f, h), w)
            elif spec.is_halting(p):
                if not rest:
                    out[((), a, p)] = 1
            else:
                if key in active:
                    # a stay-loop inside one visit: never part of a halting run
                    return {}, False
                active.add(key)
                steps = steps_of.get((p, a)) or [(spec.reject, a, "N", 1)]
                for q, b, mv, w in steps:
                    if mv == "N":
                        (sub, o), pre = go(rest, b, "in", q, vlen), ()
                    elif mv == "R":
                        if vlen >= bound:
                            over = True
                            continue
                        (sub, o), pre = go(rest, b, "outR", q, vlen + 1), (q,)
                    else:
                        if not rest or rest[0] != q:
                            continue
                        (sub, o), pre = go(rest[1:], b, "outL", None, vlen), ()
                    over |= o
                    for (v, f, h), w2 in sub.items():
                        add(out, (pre + v, f, h), w * w2)
                active.discard(key)
            memo[key] = (out, over)
            return out, over

        if start:
            res, over = go(tuple(u), sym, "in", spec.start, 0)
        else:
            res, over = go(tuple(u), sym, "outL", None, 0)
        self.overflow = over
        return {k: w for k, w in res.items() if w != 0}


@dataclass
class CrossingRelation:
    machine: object                 # the folded, output-recovered machine
    mode: str
    length_bound: int
    states: list                    # trimmed crossing sequences, canonical order
    entries: dict                   # (u, sigma, v) -> weight (non-halting histories)
    rho: dict                       # v -> accepting weight of the blank end cell
    symb: dict = field(default_factory=dict)   # (u, sigma, v) -> {final symbol: weight}
    rho_reject: dict = field(default_factory=dict)

    @property
    def start(self):
        return ()

    def successors(self, u, a):
        return {v: w for (u2, b, v), w in self.entries.items() if u2 == u and b == a}

    def weight(self, u, a, v):
        return self.entries.get((u, a, v), 0)

    def value(self, x, end=None):
        """Sum over chains () -> v_1 -> ... -> v_n of the weight product times rho."""
        end = self.rho if end is None else end
        cur = {(): 1}
        for a in x:
            nxt = {}
            for u, w in cur.items():
                for v, w2 in self._succ.get((u, a), {}).items():
                    nxt[v] = nxt.get(v, 0) + w * w2
            cur = nxt
        return sum((w * end.get(v, 0) for v, w in cur.items()), 0)

    def __post_init__(self):
        self._succ = {}
        for (u, a, v), w in self.entries.items():
            self._succ.setdefault((u, a), {})[v] = w


def _rule_weight(mode):
    if mode == "count":
        return lambda r: 1
    if mode == "probability":
        return lambda r: Fraction(r.weight)
    raise MachineError(f"unknown relation mode {mode!r}")


def crossing_relation(spec, mode="count", length_bound=None, fuel=None, audit_len=6,
                      keep_reject=False):
    """Weighted relation u ->_sigma v over the crossing sequences of a folded machine.

    The machine is output-recovered first if needed, so every halting path
    crosses the right input boundary last, in its halting state.  States are
    trimmed to sequences reachable from () and co-reachable to an accepting
    end; rho(v) is the accepting weight of the blank cell right of the input
    when its left sequence is v (rho(()) is the empty-input value)."""
    from .folding import FoldingPrereqMissing, fold_output_recovery
    if spec.meta.get("folded") != "yes":
        raise FoldingPrereqMissing("crossing_relation needs a folded machine")
    if spec.meta.get("recovered") != "yes":
        spec = fold_output_recovery(spec)
    audit = max_crossing_length(spec, audit_len, fuel)
    if length_bound is None:
        length_bound = audit.c_observed
    elif audit.c_observed > length_bound:
        raise LengthBoundExceeded(f"observed crossings of length {audit.c_observed} exceed "
                                  f"the bound {length_bound}",
                                  _long_crossing(spec, length_bound, audit_len, fuel))
    loc = _LocalHistories(spec, _rule_weight(mode))
    sigma = spec.input_alphabet
    blank = spec.blank

    raw = {}
    symb = {}
    overflow = {}
    seen = {()}
    todo = [()]
    while todo:
        u = todo.pop()
        for a in sigma:
            res = loc.run(u, a, length_bound, start=(u == ()))
            if loc.overflow:
                overflow[u] = a
            for (v, f, h), w in res.items():
                if h is not None:
                    continue
                raw[(u, a, v)] = raw.get((u, a, v), 0) + w
                d = symb.setdefault((u, a, v), {})
                d[f] = d.get(f, 0) + w
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
    rho, rho_rej = {}, {}
    for v in seen:
        res = loc.run(v, blank, 0, start=(v == ()), guesses=False)
        for (v2, _, h), w in res.items():
            if v2 == () and h is not None:
                d = rho if h == spec.accept else rho_rej
                d[v] = d.get(v, 0) + w
    # backward trim (to either kind of end, so rejecting weights survive too)
    pred = {}
    for (u, a, v) in raw:
        pred.setdefault(v, set()).add(u)
    alive = set(rho) | (set(rho_rej) if keep_reject else set())
    todo = list(alive)
    while todo:
        v = todo.pop()
        for u in pred.get(v, ()):
            if u not in alive:
                alive.add(u)
                todo.append(u)
    # any reachable sequence whose histories were cut off makes the relation
    # incomplete, whether or not the truncated part still reaches an end
    bad = list(overflow)
    if bad:
        u = sort_seqs(spec, bad)[0]
        raise LengthBoundExceeded(f"a history from {u} needs crossings beyond {length_bound}",
                                  (u, overflow[u]))
    entries = {k: w for k, w in raw.items() if k[0] in alive and k[2] in alive}
    symb = {k: d for k, d in symb.items() if k in entries}
    states = sort_seqs(spec, alive)
    rho_rej = {v: w for v, w in rho_rej.items() if v in alive}
    return CrossingRelation(spec, mode, length_bound, states, entries, rho, symb, rho_rej)


# ------------------------------------------------------------- support sets

def _left_history(tree, leaf, boundary):
    """Crossing sequence at `boundary` plus the steps taken left of it."""
    path = tree.path(leaf)
    nodes = tree.nodes
    v, steps, w = [], [], Fraction(1)
    for i, j in zip(path, path[1:]):
        a, b = nodes[i].config, nodes[j].config
        if b.head == a.head + 1 == boundary:
            v.append(b.state)
        elif a.head == boundary and b.head == boundary - 1:
            v.append(b.state)
        if a.head < boundary:
            steps.append((nodes[j].rule, a.head))
            w *= nodes[j].weight
    return tuple(v), tuple(steps), w


class SupportContext:
    """Shared trees and S_n for support computations at one length bound n."""

    def __init__(self, spec, n, fuel=None):
        self.spec = spec
        self.n = n
        self.trees = {x: explore(spec, x, fuel) for x in strings(spec.input_alphabet, n)}
        self.S = enumerate_crossing_set(spec, n, trees=self.trees)

    def left_weights(self, x, weighted):
        """w_l(x|v) summed over distinct left histories of accepting paths of xz."""
        hist = {}
        room = self.n - len(x)
        for z in strings(self.spec.input_alphabet, room):
            t = self.trees[x + z]
            for leaf in t.accepting_leaves():
                v, steps, w = _left_history(t, leaf, len(x))
                hist[(v, steps)] = w if weighted else 1
        out = {}
        for (v, _), w in hist.items():
            out[v] = out.get(v, 0) + w
        return out


@dataclass
class SupportAnalysis:
    mode: str
    items: frozenset
    wl: dict
    delta: Fraction | None = None


def observed_epsilon(ctx):
    """Largest min(p, 1-p) over all inputs: the observed error bound."""
    from .simulator import acceptance_probability
    return max(min(p, 1 - p) for p in (acceptance_probability(t) for t in ctx.trees.values()))


def support_set(spec, x, n, mode="boolean", params=None, ctx=None, fuel=None):
    """Supp_n(x) in boolean, bucketed or mod-k mode.

    boolean:  {v : v crosses boundary |x| on an accepting path of some xz}
    bucketed: {(i, v) : i*delta/|S_n| <= w_l(x|v) <= (i+1)*delta/|S_n|}
    mod-k:    {(w_l(x|v) mod k, v) : v in S_n}, path counts as weights
    """
    params = params or {}
    if len(x) > n:
        raise MachineError("support sets need |x| <= n")
    ctx = ctx if ctx is not None and ctx.n == n else SupportContext(spec, n, fuel)
    if mode == "boolean":
        wl = ctx.left_weights(x, False)
        return SupportAnalysis(mode, frozenset(wl), wl)
    if mode == "bucketed":
        eps = params.get("epsilon")
        eps = observed_epsilon(ctx) if eps is None else Fraction(eps)
        delta = Fraction(1, 2) - eps
        if delta <= 0:
            raise MachineError("bucketed supports need bounded error (epsilon < 1/2)")
        size = max(len(ctx.S), 1)
        width = delta / size
        wl = ctx.left_weights(x, True)
        items = set()
        for v, w in wl.items():
            i = int(w / width)
            items.add((i, v))
            if i > 0 and w == i * width:
                items.add((i - 1, v))
        return SupportAnalysis(mode, frozenset(items), wl, delta)
    if mode == "mod-k":
        k = int(params.get("k", 2))
        wl = ctx.left_weights(x, False)
        items = frozenset((wl.get(v, 0) % k, v) for v in ctx.S.sequences)
        return SupportAnalysis(mode, items, wl)
    raise MachineError(f"unknown support mode {mode!r}")


def transfer_counterexamples(spec, n, mode, member, params=None, ctx=None, fuel=None):
    """Pairs x, y of nonempty strings with equal supports but some extension z
    (|xz|, |yz| <= n) where member(xz) != member(yz).

    The empty string is left out: its only boundary lies left of the start
    cell, so the halting side of a crossing sequence flips relative to the
    nonempty case."""
    ctx = ctx if ctx is not None and ctx.n == n else SupportContext(spec, n, fuel)
    groups = {}
    for x in strings(spec.input_alphabet, n, 1):
        sup = support_set(spec, x, n, mode, params, ctx)
        groups.setdefault(sup.items, []).append(x)
    verdict = {w: member(t) for w, t in ctx.trees.items()}
    bad = []
    checked = 0
    for xs in groups.values():
        for i, x in enumerate(xs):
            for y in xs[i + 1:]:
                room = n - max(len(x), len(y))
                for z in strings(spec.input_alphabet, room):
                    checked += 1
                    if verdict[x + z] != verdict[y + z]:
                        bad.append((x, y, z))
    return bad, checked, len(groups)
