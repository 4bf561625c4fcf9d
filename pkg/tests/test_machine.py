from fractions import Fraction

import pytest

from conftest import fx
from tm1.machine import (HALF, Configuration, InputSymbolError, MachineSpec, ParseError,
                         PreconditionError, Rule, StuckError, UnknownSymbolError,
                         VariantConstraintError, initial_configuration, make_tracks,
                         parse_machine, render_machine, step, successors)

SWEEP = open(__file__.replace("test_machine.py", "../src/tm1/fixtures/sweep_parity.tm")).read()


def test_parse_sweep_parity():
    m = fx("sweep_parity")
    assert m.variant == "deterministic"
    working = [q for q in m.states if not m.is_halting(q)]
    assert working == ["e", "o"]


def test_render_round_trip():
    for name in ("sweep_parity", "coin_then_check", "alt_even_then_all", "rev_stationary",
                 "center_to_A"):
        m = fx(name)
        assert parse_machine(render_machine(m)) == m


def test_duplicate_deterministic_rule():
    bad = SWEEP + "delta: e 0 -> o 0 R\n"
    with pytest.raises(VariantConstraintError):
        parse_machine(bad)


def test_accept_equals_reject():
    with pytest.raises(ParseError):
        parse_machine(SWEEP.replace("reject: rej", "reject: acc"))


def test_unknown_symbol_in_rule():
    with pytest.raises(UnknownSymbolError):
        parse_machine(SWEEP + "delta: e z -> e z R\n")


def test_probabilistic_needs_two_halves():
    text = """variant: probabilistic
states: q acc rej
input: a
tape: a _
start: q
accept: acc
reject: rej
delta: q a -> acc a R @ 1/3
delta: q a -> rej a R @ 2/3
"""
    with pytest.raises(VariantConstraintError):
        parse_machine(text)


def test_malformed_line():
    with pytest.raises(ParseError):
        parse_machine(SWEEP + "delta: e 0 -> \n")


def test_initial_configuration():
    m = fx("sweep_parity")
    c = initial_configuration(m, "")
    assert (c.state, c.head, c.tape_dict()) == ("e", 0, {})
    c = initial_configuration(m, "101")
    assert c.tape_dict() == {0: "1", 1: "0", 2: "1"}


def test_input_symbol_error():
    with pytest.raises(InputSymbolError):
        initial_configuration(fx("all_heads"), "c")


def test_step_deterministic():
    m = fx("sweep_parity")
    [(c, w)] = step(m, initial_configuration(m, "1"))
    assert c.head == 1 and w == 1


def test_step_coin():
    m = fx("all_heads")
    succ = step(m, initial_configuration(m, "a"))
    assert len(succ) == 2 and all(w == HALF for _, w in succ)


def test_step_halting_precondition():
    m = fx("sweep_parity")
    with pytest.raises(PreconditionError):
        step(m, Configuration("acc", 0, ()))


def test_missing_rule():
    m = MachineSpec("deterministic", ("q", "acc", "rej"), ("a",), ("a", "_"), "_",
                    (Rule("q", "a", "acc", "a", "N"),), "q", "acc", "rej")
    c = Configuration("q", 0, ())
    with pytest.raises(StuckError):
        step(m, c)
    [(idx, c2, w)] = successors(m, c)
    assert idx is None and c2.state == "rej" and c2.head == 0


def test_tracks():
    assert make_tracks("01", "10").symbols() == ["0/1", "1/0"]
    assert make_tracks("0", "10").symbols() == ["0/1", "#/0"]
    assert len(make_tracks("", "")) == 0
