"""Language oracles, the non-regularity measure, advice automata, Mealy machines.

N_L(n) is the largest set of strings that are pairwise n-dissimilar: for
each pair some extension z with both xz and yz of length <= n tells them
apart.  It is computed exactly as a maximum clique.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx

from .machine import MachineError, PAD, make_tracks


class UnknownLanguage(MachineError):
    pass


class BudgetExceeded(MachineError):
    pass


class AdviceLengthMismatch(MachineError):
    pass


def strings(alphabet, max_len, min_len=0):
    """All strings over alphabet in length-lexicographic order."""
    for n in range(min_len, max_len + 1):
        for t in itertools.product(alphabet, repeat=n):
            yield "".join(t)


@dataclass(frozen=True)
class LanguageOracle:
    name: str
    alphabet: tuple
    member: object

    def __call__(self, x):
        return bool(self.member(x))

    def chi(self, x):
        return 1 if self.member(x) else 0


def _l_eq(x):
    n = len(x) // 2
    return len(x) % 2 == 0 and x == "0" * n + "1" * n


def _center(x):
    n = len(x)
    return n % 2 == 1 and x[n // 2] == "1"


def _l_nh(x):
    if not x.endswith("b") or x.count("b") < 2:
        return False
    segs = x[:-1].split("b")
    i = len(segs[0])
    acc = 0
    for s in segs[1:]:
        acc += len(s)
        if acc == i:
            return True
    return False


def _blocks(x, letters):
    """Exponents (n1, n2, ...) if x = letters[0]^n1 letters[1]^n2 ..., else None."""
    out = []
    rest = x
    for a in letters:
        k = len(rest) - len(rest.lstrip(a))
        out.append(k)
        rest = rest[k:]
    return None if rest else out


def _l_3eq(x):
    e = _blocks(x, "abc")
    return e is not None and e[0] == e[1] == e[2]


def _l_gt(x):
    e = _blocks(x, "ab")
    return e is not None and e[0] > e[1]


def _l_ge(x):
    e = _blocks(x, "ab")
    return e is not None and e[0] >= e[1]


def _a_hash(x):
    e = _blocks(x, "0#1")
    return e is not None and e[1] == 1 and e[0] == e[2]


BUILTINS = {
    "sigma_star": (("0", "1"), lambda x: True),
    "empty": (("0", "1"), lambda x: False),
    "parity": (("0", "1"), lambda x: x.count("1") % 2 == 1),
    "L_eq": (("0", "1"), _l_eq),
    "Pal": (("0", "1"), lambda x: x == x[::-1]),
    "Equal": (("0", "1"), lambda x: x.count("0") == x.count("1")),
    "Center": (("0", "1"), _center),
    "L_NH": (("a", "b"), _l_nh),
    "L_3eq": (("a", "b", "c"), _l_3eq),
    "L_gt": (("a", "b"), _l_gt),
    "L_ge": (("a", "b"), _l_ge),
    "A_hash": (("0", "#", "1"), _a_hash),
}


def builtin_language(name):
    try:
        alpha, f = BUILTINS[name]
    except KeyError:
        raise UnknownLanguage(f"unknown language {name!r}; known: {sorted(BUILTINS)}")
    return LanguageOracle(name, alpha, f)


# -------------------------------------------------------------- N_L(n)

def n_dissimilar(L, x, y, n):
    """(True, z) for the first z in length-lex order separating x and y."""
    if x == y:
        return False, None
    room = n - max(len(x), len(y))
    if room < 0:
        return False, None
    for z in strings(L.alphabet, room):
        if L(x + z) != L(y + z):
            return True, z
    return False, None


@dataclass
class NonRegularityReport:
    n: int
    value: int
    witness: list
    separators: dict = field(default_factory=dict)


def non_regularity(L, n, budget=200000):
    """Exact N_L(n) via maximum clique on the n-dissimilarity graph."""
    words = list(strings(L.alphabet, n))
    if len(words) > budget:
        raise BudgetExceeded(f"{len(words)} strings exceed the budget {budget}")
    ext = list(strings(L.alphabet, n))
    # membership signature of x over every z that fits; twins (same length,
    # same signature) have identical neighbourhoods, so one of them suffices
    reps = {}
    for x in words:
        sig = tuple(L(x + z) for z in ext if len(x) + len(z) <= n)
        reps.setdefault((len(x), sig), x)
    nodes = list(reps.values())
    G = nx.Graph()
    G.add_nodes_from(nodes)
    for x, y in itertools.combinations(nodes, 2):
        if n_dissimilar(L, x, y, n)[0]:
            G.add_edge(x, y)
    clique, size = nx.max_weight_clique(G, weight=None)
    clique = sorted(clique, key=lambda s: (len(s), s))
    seps = {(x, y): n_dissimilar(L, x, y, n)[1] for x, y in itertools.combinations(clique, 2)}
    return NonRegularityReport(n, size, clique, seps)


def karp_violations(L, n_max):
    """Lengths n <= n_max with N_L(n) > n/2 + 1."""
    return [n for n in range(n_max + 1) if 2 * non_regularity(L, n).value > n + 2]


# ---------------------------------------------------------------------- DFAs

@dataclass
class Dfa:
    states: list
    alphabet: tuple
    start: object
    accepting: set
    delta: dict          # (state, symbol) -> state; missing = dead

    def accepts(self, word):
        q = self.start
        for a in word:
            q = self.delta.get((q, a))
            if q is None:
                return False
        return q in self.accepting


def minimize_dfa(d):
    """Moore partition refinement on the reachable, completed automaton."""
    dead = object()
    reach = [d.start]
    seen = {d.start}
    i = 0
    while i < len(reach):
        q = reach[i]
        i += 1
        for a in d.alphabet:
            r = d.delta.get((q, a), dead)
            if r not in seen:
                seen.add(r)
                reach.append(r)
    def nxt(q, a):
        return dead if q is dead else d.delta.get((q, a), dead)
    block = {q: int(q in d.accepting) for q in reach}
    while True:
        sig = {q: (block[q],) + tuple(block[nxt(q, a)] for a in d.alphabet) for q in reach}
        ids = {}
        new = {q: ids.setdefault(sig[q], len(ids)) for q in reach}
        if len(ids) == len(set(block.values())):
            break
        block = new
    states = sorted(set(block.values()))
    delta = {(block[q], a): block[nxt(q, a)] for q in reach for a in d.alphabet}
    acc = {block[q] for q in reach if q in d.accepting}
    return Dfa(states, d.alphabet, block[d.start], acc, delta)


def parse_dfa(text):
    states = alphabet = start = None
    accept = set()
    delta = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split()
        if toks and toks[0].startswith("#"):
            continue
        toks = [t for t in toks]
        if "#" in toks:
            toks = toks[:toks.index("#")]
        if not toks or toks == ["dfa"]:
            continue
        key, args = toks[0].rstrip(":"), toks[1:]
        if key == "states":
            states = args
        elif key == "alphabet":
            alphabet = tuple(args)
        elif key == "start":
            start = args[0]
        elif key == "accept":
            accept = set(args)
        elif key == "delta":
            if len(args) != 4 or args[2] != "->":
                raise MachineError(f"line {lineno}: delta: p a -> q")
            delta[(args[0], args[1])] = args[3]
        else:
            raise MachineError(f"line {lineno}: unknown key {key!r}")
    if states is None or alphabet is None or start is None:
        raise MachineError("dfa file needs states:, alphabet: and start:")
    return Dfa(states, alphabet, start, accept, delta)


def render_dfa(d, header=None):
    name = {q: f"d{i}" if not isinstance(q, str) else q for i, q in enumerate(d.states)}
    lines = [f"# {header}"] if header else []
    lines += ["dfa", "states: " + " ".join(name[q] for q in d.states),
              "alphabet: " + " ".join(d.alphabet), f"start: {name[d.start]}",
              "accept: " + " ".join(name[q] for q in d.states if q in d.accepting)]
    for q in d.states:
        for a in d.alphabet:
            if (q, a) in d.delta:
                lines.append(f"delta: {name[q]} {a} -> {name[d.delta[(q, a)]]}")
    return "\n".join(lines) + "\n"


def load_dfa(path):
    with open(path, encoding="utf-8") as fh:
        return parse_dfa(fh.read())


# -------------------------------------------------------------------- advice

@dataclass
class AdviceAutomaton:
    dfa: Dfa
    advice: dict                 # n -> advice string
    policy: str = "exact"        # "exact": |h(n)| = n; "linear": |h(n)| <= c*n + c
    c: int = 1

    def h(self, n):
        if n not in self.advice:
            raise AdviceLengthMismatch(f"no advice for length {n}")
        s = self.advice[n]
        if self.policy == "exact" and len(s) != n:
            raise AdviceLengthMismatch(f"advice for length {n} has length {len(s)}")
        if self.policy == "linear" and len(s) > self.c * n + self.c:
            raise AdviceLengthMismatch(f"advice for length {n} is longer than {self.c}n+{self.c}")
        return s


def advice_member(aut, x):
    t = make_tracks(x, aut.h(len(x)))
    return aut.dfa.accepts(t.symbols())


def parse_advice(text):
    table = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        k, _, v = line.partition(":")
        table[int(k)] = v.strip()
    return table


def load_advice(path):
    with open(path, encoding="utf-8") as fh:
        return parse_advice(fh.read())


# --------------------------------------------------------------------- Mealy

@dataclass
class MealyMachine:
    states: list
    inputs: tuple
    outputs: tuple
    start: object
    delta: dict          # (q, a) -> q'
    nu: dict             # (q, a) -> output symbol

    def __post_init__(self):
        for q in self.states:
            for a in self.inputs:
                if (q, a) not in self.delta or (q, a) not in self.nu:
                    raise MachineError(f"Mealy machine is not total at ({q}, {a})")


def mealy_run(m, x):
    q = m.start
    out = []
    for a in x:
        if a not in m.inputs:
            raise MachineError(f"unknown symbol {a!r}")
        out.append(m.nu[(q, a)])
        q = m.delta[(q, a)]
    return "".join(out)


def prefix_determinism_witness(f, alphabet, max_len):
    """A pair x <= y (prefix) with f(x) not a prefix of f(y), or None.

    Any function computed by a Mealy machine is prefix-deterministic."""
    for y in strings(alphabet, max_len):
        fy = f(y)
        for i in range(len(y)):
            x = y[:i]
            if not fy.startswith(f(x)):
                return x, y
    return None


def identity_mealy(alphabet):
    return MealyMachine(["q"], tuple(alphabet), tuple(alphabet), "q",
                        {("q", a): "q" for a in alphabet}, {("q", a): a for a in alphabet})
