from fractions import Fraction

import pytest

from conftest import fx
from oracles import accept_probability, accepting_count, alt_value, enumerate_paths, gap
from tm1.langlab import strings
from tm1.machine import MachineSpec, Rule
from tm1.simulator import (BadResidueSet, FuelExhausted, HaltingViolation, NormViolation,
                           acceptance_probability, accepts_nondet, alternation_count,
                           check_reversible_dynamic, collect_outcomes, count_and_gap,
                           evaluate_alternating, explore, is_synchronous, mod_predicate,
                           quantum_run, running_time, total_mass)


def test_explore_examples():
    t = explore(fx("sweep_parity"), "101", 100)
    assert len(t.leaves) == 1 and running_time(t) == 4
    t = explore(fx("guess_all"), "01", 100)
    assert len(t.leaves) == 4 and len(t.accepting_leaves()) == 4
    with pytest.raises(FuelExhausted):
        explore(fx("looping"), "a", 10)


def test_running_time():
    assert running_time(explore(fx("guess_all"), "01")) == 3
    assert running_time(explore(fx("sweep_parity"), "")) == 1


def test_nondet_acceptance():
    assert accepts_nondet(explore(fx("guess_all"), "0"))
    assert not accepts_nondet(explore(fx("guess_11"), "0101"))
    assert accepts_nondet(explore(fx("guess_11"), "0110"))


def test_alternating_matches_minmax_oracle():
    m = fx("alt_even_then_all")
    for x in strings(m.input_alphabet, 6):
        assert evaluate_alternating(m, explore(m, x)) == alt_value(m, x), x


def test_alternation_count():
    assert alternation_count(["E", "E", "E"]) == 0
    assert alternation_count(list("EEAAE")) == 2
    assert alternation_count([]) == 0


def test_counting():
    assert count_and_gap(explore(fx("guess_all"), "111")).sharp == 8
    r = count_and_gap(explore(fx("sweep_parity"), "1"))
    assert (r.sharp, r.gap) == (1, 1)
    for name in ("count_as", "count_twopass", "gap_f", "gap_g"):
        m = fx(name)
        for x in strings(m.input_alphabet, 4):
            r = count_and_gap(explore(m, x))
            assert r.sharp == accepting_count(m, x) and r.gap == gap(m, x)


def test_probability_against_path_oracle():
    for name in ("coin_then_check", "all_heads", "prob_endcheck", "prob_parity_vote"):
        m = fx(name)
        for x in strings(m.input_alphabet, 5):
            assert acceptance_probability(explore(m, x)) == accept_probability(m, x)
    assert acceptance_probability(explore(fx("all_heads"), "abb")) == Fraction(1, 8)


def test_total_mass():
    m = fx("coin_then_check")
    assert all(total_mass(explore(m, x)) == 1 for x in strings(m.input_alphabet, 5))


def test_outcomes():
    oc = collect_outcomes(explore(fx("copy"), "01"))
    assert oc.counts == {"01": 1}
    assert collect_outcomes(explore(fx("guess_11"), "00")).counts == {}


def test_reversibility():
    m = fx("sweep_parity")
    assert check_reversible_dynamic(m, list(strings(m.input_alphabet, 4)))
    r = check_reversible_dynamic(fx("converge"), list(strings("ab", 3)))
    assert not r and r.witness is not None
    assert check_reversible_dynamic(fx("converge"), [])


def test_mod_predicate():
    assert mod_predicate(5, 2, {1})
    assert not mod_predicate(8, 2, {1})
    assert mod_predicate(7, 3, {0, 1})
    with pytest.raises(BadResidueSet):
        mod_predicate(3, 2, {0, 1})


def test_quantum_reversible():
    m = fx("rev_stationary")
    for x in strings(m.input_alphabet, 4):
        r = quantum_run(m, x)
        assert r.p == x.count("1") % 2 and all(v == 1 for v in r.norm_trace)


def _qm(rules):
    return MachineSpec("quantum", ("q", "acc", "rej"), ("a",), ("a", "b", "_"), "_",
                       tuple(rules), "q", "acc", "rej")


def test_norm_violation():
    m = _qm([Rule("q", "a", "acc", "a", "R", Fraction(1, 2)),
             Rule("q", "a", "rej", "b", "R", Fraction(1, 2))])
    with pytest.raises(NormViolation):
        quantum_run(m, "a")


def test_halting_violation():
    m = _qm([Rule("q", "a", "acc", "a", "R", Fraction(3, 5)),
             Rule("q", "a", "q", "b", "R", Fraction(4, 5)),
             Rule("q", "_", "rej", "_", "N")])
    with pytest.raises(HaltingViolation):
        quantum_run(m, "a")
