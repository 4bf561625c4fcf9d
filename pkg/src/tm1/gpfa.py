"""Rational generalized probabilistic finite automata.

p_N(x) = pi . T(x_1) ... T(x_n) . eta with exact fractions.  Matrices are
dense lists of lists; the automata handled here stay small enough.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .machine import MachineError


class GpfaError(MachineError):
    pass


class UnknownSymbol(GpfaError):
    pass


class NotStochastic(GpfaError):
    pass


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a, b):
    m = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [Fraction(0)] * m
        for k, x in enumerate(row):
            if x:
                for j, y in enumerate(b[k]):
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out


def vecmat(v, a):
    m = len(a[0]) if a else 0
    acc = [Fraction(0)] * m
    for k, x in enumerate(v):
        if x:
            for j, y in enumerate(a[k]):
                if y:
                    acc[j] += x * y
    return acc


def kron(a, b):
    return [[x * y for x in ra for y in rb] for ra in a for rb in b]


@dataclass
class Gpfa:
    pi: list
    T: dict
    eta: list
    alphabet: tuple = ()
    labels: list = field(default_factory=list)     # optional state names
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.pi = [Fraction(v) for v in self.pi]
        self.eta = [Fraction(v) for v in self.eta]
        self.T = {a: [[Fraction(v) for v in row] for row in m] for a, m in self.T.items()}
        if not self.alphabet:
            self.alphabet = tuple(self.T)
        n = len(self.pi)
        if len(self.eta) != n:
            raise GpfaError("pi and eta lengths differ")
        for a, m in self.T.items():
            if len(m) != n or any(len(r) != n for r in m):
                raise GpfaError(f"T({a}) is not {n}x{n}")

    @property
    def n_states(self):
        return len(self.pi)

    def matrix(self, a):
        try:
            return self.T[a]
        except KeyError:
            raise UnknownSymbol(f"no matrix for symbol {a!r}")


def word_matrix(g, x):
    m = identity(g.n_states)
    for a in x:
        m = matmul(m, g.matrix(a))
    return m


def acceptance_value(g, x):
    v = list(g.pi)
    for a in x:
        v = vecmat(v, g.matrix(a))
    return sum((p * q for p, q in zip(v, g.eta)), Fraction(0))


@dataclass(frozen=True)
class CutPoint:
    value: Fraction
    mode: str = "gt"          # "gt": p > value, "eq": p == value

    def __post_init__(self):
        if self.mode not in ("gt", "eq"):
            raise GpfaError(f"unknown cut mode {self.mode!r}")


def cut_language_member(g, cp, x):
    p = acceptance_value(g, x)
    return p > cp.value if cp.mode == "gt" else p == cp.value


def is_stochastic(g):
    if any(v < 0 for v in g.pi) or sum(g.pi) != 1:
        return False
    if any(v not in (0, 1) for v in g.eta):
        return False
    for m in g.T.values():
        for row in m:
            if any(v < 0 for v in row) or sum(row) != 1:
                return False
    return True


def as_pfa(g):
    if not is_stochastic(g):
        raise NotStochastic("automaton is not a rational PFA")
    return g


def final_states(g):
    return [i for i, v in enumerate(g.eta) if v == 1]


# ------------------------------------------------------- closure constructions
# Artifact-supplied: direct sum realizes differences, Kronecker products
# realize products of acceptance values.

def constant_gpfa(c, alphabet):
    return Gpfa([1], {a: [[1]] for a in alphabet}, [c], tuple(alphabet))


def difference_gpfa(g, h):
    n, m = g.n_states, h.n_states
    T = {}
    for a in g.alphabet:
        blk = [[Fraction(0)] * (n + m) for _ in range(n + m)]
        for i in range(n):
            blk[i][:n] = g.T[a][i]
        for i in range(m):
            blk[n + i][n:] = h.T[a][i]
        T[a] = blk
    return Gpfa(g.pi + h.pi, T, g.eta + [-v for v in h.eta], g.alphabet)


def product_gpfa(g, h):
    T = {a: kron(g.T[a], h.T[a]) for a in g.alphabet}
    pi = kron([g.pi], [h.pi])[0]
    eta = [row[0] for row in kron([[v] for v in g.eta], [[v] for v in h.eta])]
    return Gpfa(pi, T, eta, g.alphabet)


def complement_gpfa(g, cp):
    """GPFA with cut point 0 (strict) for the complement of the cut language.

    Equality mode is exact: p != e iff (p - e)^2 > 0.  Strict mode gives
    {p < e}, which equals the complement wherever p never hits e exactly."""
    shifted = difference_gpfa(g, constant_gpfa(cp.value, g.alphabet))
    if cp.mode == "eq":
        return product_gpfa(shifted, shifted), CutPoint(Fraction(0), "gt")
    return difference_gpfa(constant_gpfa(0, g.alphabet), shifted), CutPoint(Fraction(0), "gt")


def symdiff_gpfa(g, cg, h, ch):
    """Strict cut languages A, B: x in A xor B iff -(p - e)(q - f) > 0,
    exact wherever neither value sits on its cut point."""
    if cg.mode != "gt" or ch.mode != "gt":
        raise GpfaError("symmetric difference is built for strict cut points only")
    a = difference_gpfa(g, constant_gpfa(cg.value, g.alphabet))
    b = difference_gpfa(h, constant_gpfa(ch.value, h.alphabet))
    return difference_gpfa(constant_gpfa(0, g.alphabet), product_gpfa(a, b)), CutPoint(Fraction(0), "gt")


# ---------------------------------------------------------------- file format

def _row(toks, lineno):
    try:
        return [Fraction(t) for t in toks]
    except (ValueError, ZeroDivisionError):
        raise GpfaError(f"line {lineno}: bad number in {toks}")


def parse_gpfa(text):
    n = None
    pi = eta = None
    T = {}
    order = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_header:
            if line != "gpfa":
                raise GpfaError(f"line {lineno}: expected 'gpfa' header")
            seen_header = True
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        toks = rest.split()
        if key == "states":
            n = int(toks[0])
        elif key == "pi":
            pi = _row(toks, lineno)
        elif key == "eta":
            eta = _row(toks, lineno)
        elif key.startswith("T "):
            a = key[2:].strip()
            rows = [_row(r.split(), lineno) for r in rest.split(";")]
            T[a] = rows
            order.append(a)
        else:
            raise GpfaError(f"line {lineno}: unknown key {key!r}")
    if n is None or pi is None or eta is None:
        raise GpfaError("gpfa file needs states:, pi: and eta:")
    g = Gpfa(pi, T, eta, tuple(order))
    if g.n_states != n:
        raise GpfaError(f"states: {n} disagrees with vector length {g.n_states}")
    return g


def render_gpfa(g):
    lines = ["gpfa", f"states: {g.n_states}",
             "pi: " + " ".join(str(v) for v in g.pi),
             "eta: " + " ".join(str(v) for v in g.eta)]
    for a in g.alphabet:
        lines.append(f"T {a}: " + " ; ".join(" ".join(str(v) for v in row) for row in g.T[a]))
    return "\n".join(lines) + "\n"


def load_gpfa(path):
    with open(path, encoding="utf-8") as fh:
        return parse_gpfa(fh.read())
