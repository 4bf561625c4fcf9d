import pytest

from conftest import fx
from oracles import outcome_set
from tm1.folding import (AlphabetBudgetExceeded, FoldingPrereqMissing, NoLinearBoundWitness,
                         FoldingLayout, choose_k, fold_machine, fold_output_recovery,
                         preprocessing_states)
from tm1.langlab import strings
from tm1.machine import PreconditionError
from tm1.simulator import acceptance_probability, collect_outcomes, count_and_gap, explore


def test_choose_k():
    assert choose_k(fx("sweep_parity"), 4) == 2
    assert choose_k(fx("two_pass"), 5) == 3
    with pytest.raises(NoLinearBoundWitness):
        choose_k(fx("looping"), 3, fuel=50)


def test_layout():
    lay = FoldingLayout(2)
    assert lay.track_count == 8
    assert list(lay.tracks) == list(range(-4, 4))


@pytest.mark.parametrize("name,k", [("sweep_parity", 2), ("two_pass", 3), ("guess_all", 2),
                                    ("coin_then_check", 2)])
def test_fold_equivalence(name, k):
    m = fx(name)
    f = fold_machine(m, k)
    r = fold_output_recovery(f)
    for x in strings(m.input_alphabet, 5):
        a = explore(m, x)
        for g in (f, r):
            b = explore(g, x)
            if m.variant == "probabilistic":
                assert acceptance_probability(a) == acceptance_probability(b)
            else:
                assert count_and_gap(a) == count_and_gap(b)


def test_head_confined():
    m = fx("two_pass")
    f = fold_machine(m, 3)
    pre = set(preprocessing_states(f))
    for x in strings(m.input_alphabet, 6, 3):
        t = explore(f, x)
        for leaf in t.leaves:
            for c in t.path_configs(leaf):
                if c.state not in pre:
                    assert 0 <= c.head < len(x)


def test_empty_input_halts_at_once():
    for name in ("sweep_parity", "guess_all"):
        m = fx(name)
        t = explore(fold_machine(m, 2), "")
        [leaf] = t.leaves
        assert len(t.path(leaf)) == 2
        assert t.nodes[leaf].config.state == explore(m, "").nodes[explore(m, "").leaves[0]].config.state


@pytest.mark.parametrize("name", ["copy", "bit_guesser", "mark_one", "swap01"])
def test_recovered_outcomes(name):
    m = fx(name)
    r = fold_output_recovery(fold_machine(m, choose_k(m, 5)))
    for x in strings(m.input_alphabet, 5):
        want = {y[:len(x)] for y in outcome_set(m, x)}
        assert set(collect_outcomes(explore(r, x)).counts) == want, x
    assert set(collect_outcomes(explore(r, "01")).counts) >= set()


def test_copy_recovery_example():
    m = fx("copy")
    r = fold_output_recovery(fold_machine(m, 2))
    assert set(collect_outcomes(explore(r, "01")).counts) == {"01"}


def test_rejects_preserved():
    m = fx("guess_11")
    r = fold_output_recovery(fold_machine(m, 2))
    t = explore(r, "0101")
    assert not t.accepting_leaves()


def test_errors():
    with pytest.raises(FoldingPrereqMissing):
        fold_output_recovery(fx("sweep_parity"))
    with pytest.raises(AlphabetBudgetExceeded):
        fold_machine(fx("two_pass"), 3, budget=5)
    with pytest.raises(PreconditionError):
        fold_machine(fx("rev_stationary"), 2)
