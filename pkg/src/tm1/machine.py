"""Machine description language, configurations and single-step semantics.

A machine is a one-tape, one-head Turing machine.  The tape is two-sided and
sparse: blank cells are simply absent from the tape map.  Every variant
(deterministic, nondeterministic, alternating, probabilistic, counting,
quantum) shares the same rule format; the variant only constrains how many
rules a (state, symbol) pair may have and what their weights look like.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

VARIANTS = ("deterministic", "nondeterministic", "alternating",
            "probabilistic", "counting", "quantum")
MOVES = {"L": -1, "N": 0, "R": 1}
PAD = "#"
HALF = Fraction(1, 2)


class MachineError(Exception):
    pass


class ParseError(MachineError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class VariantConstraintError(MachineError):
    pass


class UnknownSymbolError(MachineError):
    pass


class InputSymbolError(MachineError):
    pass


class StuckError(MachineError):
    """No rule for the current (state, symbol) pair."""


class PreconditionError(MachineError):
    pass


@dataclass(frozen=True)
class Rule:
    src: str
    read: str
    dst: str
    write: str
    move: str
    weight: Fraction = Fraction(1)

    @property
    def delta(self):
        return MOVES[self.move]


@dataclass(frozen=True)
class LinearBound:
    c: Fraction
    d: Fraction

    def __call__(self, n):
        return self.c * n + self.d


@dataclass(frozen=True, eq=False)
class MachineSpec:
    variant: str
    states: tuple
    input_alphabet: tuple
    tape_alphabet: tuple
    blank: str
    rules: tuple
    start: str
    accept: str
    reject: str
    labels: dict = field(default_factory=dict)
    declared_bound: LinearBound | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        validate(self)

    @cached_property
    def table(self):
        """(state, symbol) -> list of (rule index, rule) in declaration order."""
        t = {}
        for i, r in enumerate(self.rules):
            t.setdefault((r.src, r.read), []).append((i, r))
        return t

    @cached_property
    def state_index(self):
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def symbol_index(self):
        return {a: i for i, a in enumerate(self.tape_alphabet)}

    def is_halting(self, q):
        return q == self.accept or q == self.reject

    def rules_for(self, q, a):
        return self.table.get((q, a), [])

    def is_toss(self, q, a):
        return len(self.table.get((q, a), ())) == 2

    def __eq__(self, other):
        if not isinstance(other, MachineSpec):
            return NotImplemented
        return (self.variant, self.states, self.input_alphabet, self.tape_alphabet,
                self.blank, self.rules, self.start, self.accept, self.reject,
                self.labels, self.declared_bound) == \
               (other.variant, other.states, other.input_alphabet, other.tape_alphabet,
                other.blank, other.rules, other.start, other.accept, other.reject,
                other.labels, other.declared_bound)

    __hash__ = object.__hash__


def validate(spec):
    if spec.variant not in VARIANTS:
        raise VariantConstraintError(f"unknown variant {spec.variant!r}")
    if len(set(spec.states)) != len(spec.states):
        raise VariantConstraintError("duplicate state names")
    if len(set(spec.tape_alphabet)) != len(spec.tape_alphabet):
        raise VariantConstraintError("duplicate tape symbols")
    if not spec.tape_alphabet or spec.blank not in spec.tape_alphabet:
        raise UnknownSymbolError("blank must be listed in the tape alphabet")
    if spec.blank in spec.input_alphabet:
        raise UnknownSymbolError("blank may not be an input symbol")
    for a in spec.input_alphabet:
        if a not in spec.tape_alphabet:
            raise UnknownSymbolError(f"input symbol {a!r} not in tape alphabet")
    states = set(spec.states)
    for q in (spec.start, spec.accept, spec.reject):
        if q not in states:
            raise VariantConstraintError(f"state {q!r} not declared")
    if spec.accept == spec.reject:
        raise VariantConstraintError("accept and reject states must differ")
    gamma = set(spec.tape_alphabet)
    for r in spec.rules:
        if r.src not in states or r.dst not in states:
            raise VariantConstraintError(f"rule {r} uses an undeclared state")
        if r.read not in gamma or r.write not in gamma:
            raise UnknownSymbolError(f"rule {r} uses an unknown symbol")
        if r.move not in MOVES:
            raise VariantConstraintError(f"bad move {r.move!r}")
        if r.weight == 0:
            raise VariantConstraintError(f"rule {r} has weight 0")
        if spec.is_halting(r.src):
            raise VariantConstraintError(f"rule {r} leaves a halting state")
    groups = {}
    for r in spec.rules:
        groups.setdefault((r.src, r.read), []).append(r)
    v = spec.variant
    for key, rs in groups.items():
        if v == "deterministic" and len(rs) > 1:
            raise VariantConstraintError(f"deterministic machine has {len(rs)} rules for {key}")
        if v == "probabilistic":
            ws = [r.weight for r in rs]
            if not (ws == [1] or ws == [HALF, HALF]):
                raise VariantConstraintError(f"probabilistic rules for {key} must be one rule of "
                                             f"weight 1 or two of weight 1/2, got {ws}")
        if v != "quantum" and any(r.weight < 0 for r in rs):
            raise VariantConstraintError(f"negative weight outside the quantum variant at {key}")
    if v == "alternating":
        for q in spec.states:
            if not spec.is_halting(q) and spec.labels.get(q) not in ("E", "A"):
                raise VariantConstraintError(f"alternating state {q!r} lacks an E/A label")
    elif spec.labels:
        raise VariantConstraintError("labels are only allowed for alternating machines")


# ---------------------------------------------------------------- file format

def _unescape(tok):
    return tok[1:] if tok.startswith("\\") else tok


def _escape(sym):
    return "\\" + sym if sym.startswith(("#", "\\")) else sym


def _tokens(line):
    out = []
    for tok in line.split():
        if tok.startswith("#"):
            break
        out.append(_unescape(tok))
    return out


def parse_machine(text):
    fields = {}
    labels = {}
    rules = []
    bound = None
    meta = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokens(raw)
        if not toks:
            continue
        key = toks[0]
        if not key.endswith(":"):
            raise ParseError(f"expected 'key:' got {key!r}", lineno)
        key = key[:-1]
        args = toks[1:]
        if key in ("variant", "start", "accept", "reject"):
            if len(args) != 1:
                raise ParseError(f"{key} takes exactly one value", lineno)
            fields[key] = args[0]
        elif key in ("states", "input", "tape"):
            fields[key] = tuple(args)
        elif key == "label":
            if len(args) != 2 or args[1] not in ("E", "A"):
                raise ParseError("label: <state> E|A", lineno)
            labels[args[0]] = args[1]
        elif key == "bound":
            try:
                bound = LinearBound(Fraction(args[0]), Fraction(args[1]))
            except (IndexError, ValueError, ZeroDivisionError):
                raise ParseError("bound: <c> <d>", lineno)
        elif key == "meta":
            if len(args) < 1:
                raise ParseError("meta: <key> <value...>", lineno)
            meta[args[0]] = " ".join(args[1:])
        elif key == "delta":
            w = Fraction(1)
            if "@" in args:
                at = args.index("@")
                if at != len(args) - 2:
                    raise ParseError("weight must be the last field after '@'", lineno)
                try:
                    w = Fraction(args[-1])
                except (ValueError, ZeroDivisionError):
                    raise ParseError(f"bad weight {args[-1]!r}", lineno)
                args = args[:at]
            if len(args) != 6 or args[2] != "->":
                raise ParseError("delta: q a -> q' b M [@ w]", lineno)
            q, a, _, q2, b, m = args
            if m not in MOVES:
                raise ParseError(f"bad move {m!r}", lineno)
            rules.append(Rule(q, a, q2, b, m, w))
        else:
            raise ParseError(f"unknown key {key!r}", lineno)
    for k in ("variant", "states", "input", "tape", "start", "accept", "reject"):
        if k not in fields:
            raise ParseError(f"missing {k}:")
    if fields["accept"] == fields["reject"]:
        raise ParseError("accept and reject states must differ")
    tape = fields["tape"]
    blank = "_"
    if blank not in tape:
        raise ParseError("the blank '_' must be listed in tape:")
    return MachineSpec(fields["variant"], fields["states"], fields["input"], tape, blank,
                       tuple(rules), fields["start"], fields["accept"], fields["reject"],
                       labels, bound, meta)


def _fmt_weight(w):
    return str(w) if w.denominator != 1 else str(w.numerator)


def render_machine(spec):
    if spec.blank != "_":
        raise MachineError("only '_' blanks can be rendered")
    e = _escape
    lines = [f"variant: {spec.variant}",
             "states: " + " ".join(spec.states),
             "input: " + " ".join(e(a) for a in spec.input_alphabet),
             "tape: " + " ".join(e(a) for a in spec.tape_alphabet),
             f"start: {spec.start}", f"accept: {spec.accept}", f"reject: {spec.reject}"]
    if spec.declared_bound is not None:
        lines.append(f"bound: {spec.declared_bound.c} {spec.declared_bound.d}")
    for k, v in spec.meta.items():
        if not k.startswith("_"):
            lines.append(f"meta: {k} {v}")
    for q, lab in spec.labels.items():
        lines.append(f"label: {q} {lab}")
    for r in spec.rules:
        s = f"delta: {r.src} {e(r.read)} -> {r.dst} {e(r.write)} {r.move}"
        if r.weight != 1:
            s += f" @ {_fmt_weight(r.weight)}"
        lines.append(s)
    return "\n".join(lines) + "\n"


def load_machine(path):
    with open(path, encoding="utf-8") as fh:
        return parse_machine(fh.read())


# ------------------------------------------------------------ configurations

@dataclass(frozen=True, order=True)
class Configuration:
    state: str
    head: int
    tape: tuple = ()          # sorted ((cell, symbol), ...), blanks never stored

    def tape_dict(self):
        return dict(self.tape)

    def read(self, blank):
        for c, a in self.tape:
            if c == self.head:
                return a
        return blank

    def content(self, blank, lo, hi):
        d = dict(self.tape)
        return [d.get(i, blank) for i in range(lo, hi)]


def _freeze(tape, blank):
    return tuple(sorted((c, a) for c, a in tape.items() if a != blank))


def initial_configuration(spec, x):
    syms = list(x) if isinstance(x, str) else list(x)
    for a in syms:
        if a not in spec.input_alphabet:
            raise InputSymbolError(f"{a!r} is not an input symbol")
    return Configuration(spec.start, 0, tuple((i, a) for i, a in enumerate(syms)))


def apply_rule(spec, config, rule):
    tape = dict(config.tape)
    if rule.write == spec.blank:
        tape.pop(config.head, None)
    else:
        tape[config.head] = rule.write
    return Configuration(rule.dst, config.head + rule.delta, _freeze(tape, spec.blank))


def step(spec, config):
    """All successors of a non-halting configuration, in rule-declaration order."""
    if spec.is_halting(config.state):
        raise PreconditionError(f"configuration in halting state {config.state!r}")
    a = config.read(spec.blank)
    rs = spec.rules_for(config.state, a)
    if not rs:
        raise StuckError(f"no rule for ({config.state}, {a})")
    return [(apply_rule(spec, config, r), r.weight) for _, r in rs]


def successors(spec, config):
    """Like step, but a missing rule becomes the implicit reject move.

    Yields (rule index or None, configuration, weight)."""
    a = config.read(spec.blank)
    rs = spec.rules_for(config.state, a)
    if not rs:
        return [(None, Configuration(spec.reject, config.head, config.tape), Fraction(1))]
    return [(i, apply_rule(spec, config, r), r.weight) for i, r in rs]


# --------------------------------------------------------------------- tracks

@dataclass(frozen=True)
class TrackString:
    upper: str
    lower: str
    pad: str = PAD

    def __len__(self):
        return max(len(self.upper), len(self.lower))

    @property
    def pairs(self):
        n = len(self)
        u = list(self.upper) + [self.pad] * (n - len(self.upper))
        d = list(self.lower) + [self.pad] * (n - len(self.lower))
        return list(zip(u, d))

    def symbols(self):
        """Track symbols named 'upper/lower'."""
        return [f"{a}/{b}" for a, b in self.pairs]


def make_tracks(x, y):
    return TrackString(x, y)
