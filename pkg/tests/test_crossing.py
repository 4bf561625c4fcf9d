from fractions import Fraction

import pytest

from conftest import fx
from oracles import boundary_crossings
from tm1.crossing import (LengthBoundExceeded, UnboundedCrossing, crossing_profile,
                          crossing_relation, enumerate_crossing_set, max_crossing_length,
                          require_bounded, support_set, transfer_counterexamples)
from tm1.folding import fold_machine, fold_output_recovery
from tm1.langlab import strings
from tm1.simulator import acceptance_probability, count_and_gap, explore


def _paths(m, x):
    t = explore(m, x)
    return [t.path_configs(l) for l in t.leaves]


def test_right_sweep_profile():
    m = fx("all_heads")
    for cs in _paths(m, "abb"):
        prof = crossing_profile(cs)
        assert prof.at(0) == ()
        if cs[-1].state == "acc":
            assert all(len(prof.at(b)) == 1 for b in (1, 2, 3))


def test_profile_matches_oracle_and_step_sum():
    for name in ("two_pass", "pal_zigzag", "center_to_A", "coin_then_check"):
        m = fx(name)
        for x in strings(m.input_alphabet, 4):
            for cs in _paths(m, x):
                prof = crossing_profile(cs)
                assert prof.seqs == boundary_crossings(cs)
                if all(a.head != b.head for a, b in zip(cs, cs[1:])):
                    assert prof.total() == len(cs) - 1


def test_crossing_sets():
    m = fx("sweep_parity")
    S2 = enumerate_crossing_set(m, 2)
    assert set(S2.sequences) - {()} == {("e",), ("o",)}
    assert len(enumerate_crossing_set(m, 0)) == 0          # the empty input is rejected
    assert enumerate_crossing_set(fx("guess_all"), 0).sequences == [()]
    g = fx("guess_all")
    assert enumerate_crossing_set(g, 3).sequences == enumerate_crossing_set(g, 3).sequences


def test_max_crossing_length():
    assert max_crossing_length(fx("sweep_parity"), 6).c_observed == 1
    assert max_crossing_length(fx("two_pass"), 6).c_observed == 2
    audit = max_crossing_length(fx("pal_zigzag"), 8)
    vals = [audit.table[n] for n in sorted(audit.table)]
    assert vals == sorted(vals) and len(set(vals[4:])) > 1
    with pytest.raises(UnboundedCrossing):
        require_bounded(fx("pal_zigzag"), 8)


def _recovered(name, k):
    return fold_output_recovery(fold_machine(fx(name), k))


@pytest.mark.parametrize("name,k,mode", [("sweep_parity", 2, "count"), ("two_pass", 3, "count"),
                                         ("guess_all", 2, "count"),
                                         ("coin_then_check", 2, "probability")])
def test_relation_value(name, k, mode):
    m = fx(name)
    rel = crossing_relation(_recovered(name, k), mode)
    for x in strings(m.input_alphabet, 5):
        t = explore(m, x)
        want = acceptance_probability(t) if mode == "probability" else count_and_gap(t).sharp
        assert rel.value(x) == want, x


def test_relation_entries():
    rel = crossing_relation(_recovered("sweep_parity", 2), "count")
    for a in "01":
        assert rel.weight((), a, ()) == 0
    prel = crossing_relation(_recovered("coin_then_check", 2), "probability")
    for w in prel.entries.values():
        d = Fraction(w).denominator
        assert d & (d - 1) == 0


def test_length_bound_exceeded():
    with pytest.raises(LengthBoundExceeded):
        crossing_relation(_recovered("two_pass", 3), "count", length_bound=1)


def test_support_sets():
    m = fx("guess_11")
    assert support_set(m, "00", 2).items == frozenset()
    assert support_set(m, "01", 4).items
    s = support_set(fx("count_as"), "aa", 4, "mod-k", {"k": 3})
    seqs = [v for _, v in s.items]
    assert len(seqs) == len(set(seqs))


def test_transfer_small():
    m = fx("mark_one")
    from tm1.simulator import accepts_nondet
    bad, checked, groups = transfer_counterexamples(m, 5, "boolean", accepts_nondet)
    assert bad == [] and checked > 0
