"""Property tests over randomly generated small machines and automata."""
from fractions import Fraction

from hypothesis import HealthCheck, assume, given, settings, strategies as st

from oracles import accept_probability, boundary_crossings, matrix_value
from tm1.crossing import crossing_profile
from tm1.folding import fold_machine
from tm1.gpfa import (Gpfa, acceptance_value, difference_gpfa, matmul, product_gpfa,
                      word_matrix)
from tm1.langlab import Dfa, LanguageOracle, minimize_dfa, n_dissimilar, non_regularity, strings
from tm1.machine import HALF, MachineSpec, Rule, parse_machine, render_machine
from tm1.simulator import (FuelExhausted, acceptance_probability, explore, is_synchronous,
                           quantum_run, total_mass)
from tm1.transforms import pfa_to_nqtm, pfa_to_sync_ptm, ptm_to_gpfa

SLOW = settings(max_examples=15, deadline=None,
                suppress_health_check=[HealthCheck.too_slow])
FAST = settings(max_examples=60, deadline=None)
words = st.text(alphabet="ab", max_size=4)


@st.composite
def sweeping_ptm(draw):
    """Probabilistic machine that moves right on every input symbol."""
    states = ["q0", "q1", "q2"]
    rules = []
    for q in states:
        for a in "ab":
            if draw(st.booleans()):
                r1, r2 = draw(st.sampled_from(states)), draw(st.sampled_from(states))
                w1, w2 = draw(st.sampled_from("ab")), draw(st.sampled_from("ab"))
                rules += [Rule(q, a, r1, w1, "R", HALF), Rule(q, a, r2, w2, "R", HALF)]
            else:
                rules.append(Rule(q, a, draw(st.sampled_from(states)), a, "R"))
        rules.append(Rule(q, "_", draw(st.sampled_from(["acc", "rej"])), "_", "N"))
    return MachineSpec("probabilistic", tuple(states) + ("acc", "rej"), ("a", "b"),
                       ("a", "b", "_"), "_", tuple(rules), "q0", "acc", "rej")


@st.composite
def wandering_dtm(draw):
    """Deterministic machine with arbitrary moves (may loop)."""
    states = ["q0", "q1", "q2"]
    rules = []
    for q in states:
        for a in "ab_":
            dst = draw(st.sampled_from(states + ["acc", "rej"]))
            rules.append(Rule(q, a, dst, draw(st.sampled_from("ab_")),
                              draw(st.sampled_from("LNR"))))
    return MachineSpec("deterministic", tuple(states) + ("acc", "rej"), ("a", "b"),
                       ("a", "b", "_"), "_", tuple(rules), "q0", "acc", "rej")


@st.composite
def dyadic_pfa(draw, denom=4):
    n = 2
    T = {}
    for a in "ab":
        rows = []
        for _ in range(n):
            k = draw(st.integers(0, denom))
            rows.append([Fraction(k, denom), Fraction(denom - k, denom)])
        T[a] = rows
    eta = draw(st.sampled_from([[1, 0], [0, 1]]))
    return Gpfa([1, 0], T, eta, ("a", "b"))


rationals = st.fractions(min_value=-2, max_value=2, max_denominator=6)


@st.composite
def gpfa2(draw):
    T = {a: [[draw(rationals) for _ in range(2)] for _ in range(2)] for a in "ab"}
    return Gpfa([draw(rationals), draw(rationals)], T, [draw(rationals), draw(rationals)],
                ("a", "b"))


@FAST
@given(sweeping_ptm(), words)
def test_probability_conservation(m, x):
    t = explore(m, x)
    assert total_mass(t) == 1
    assert acceptance_probability(t) == accept_probability(m, x)


@FAST
@given(wandering_dtm(), words)
def test_step_sum_and_profile(m, x):
    try:
        t = explore(m, x, 40)
    except FuelExhausted:
        assume(False)
    for leaf in t.leaves:
        cs = t.path_configs(leaf)
        prof = crossing_profile(cs)
        assert prof.seqs == boundary_crossings(cs)
        if all(a.head != b.head for a, b in zip(cs, cs[1:])):
            assert prof.total() == len(cs) - 1


@FAST
@given(wandering_dtm())
def test_render_round_trip(m):
    assert parse_machine(render_machine(m)) == m


@SLOW
@given(sweeping_ptm())
def test_fold_preserves_probability(m):
    f = fold_machine(m, 2)
    for x in strings("ab", 3):
        assert acceptance_probability(explore(f, x)) == acceptance_probability(explore(m, x))


@SLOW
@given(sweeping_ptm())
def test_gpfa_exact_on_random_ptm(m):
    g = ptm_to_gpfa(m)
    for x in strings("ab", 4):
        assert acceptance_value(g, x) == accept_probability(m, x)


@FAST
@given(gpfa2(), gpfa2(), words, words)
def test_gpfa_algebra(g, h, x, y):
    assert word_matrix(g, x + y) == matmul(word_matrix(g, x), word_matrix(g, y))
    assert acceptance_value(g, x) == matrix_value(g.pi, g.T, g.eta, x)
    a, b = acceptance_value(g, x), acceptance_value(h, x)
    assert acceptance_value(difference_gpfa(g, h), x) == a - b
    assert acceptance_value(product_gpfa(g, h), x) == a * b


@SLOW
@given(dyadic_pfa(denom=8))
def test_sync_ptm_sign(g):
    m = pfa_to_sync_ptm(g)
    for x in strings("ab", 3):
        t = explore(m, x)
        assert is_synchronous(t)
        assert (acceptance_probability(t) > HALF) == (acceptance_value(g, x) > HALF)


@SLOW
@given(dyadic_pfa(denom=2))
def test_nqtm_formula_random(g):
    q = pfa_to_nqtm(g)
    bits = int(q.meta["m"])
    for x in strings("ab", 2, 1):
        r = quantum_run(q, x)
        p = acceptance_value(g, x)
        assert all(v == 1 for v in r.norm_trace)
        assert r.p == Fraction(24, 25) ** (2 * bits * len(x) + 2) * (p - HALF) ** 2


@st.composite
def finite_language(draw):
    members = draw(st.sets(st.text(alphabet="01", max_size=4), max_size=8))
    return LanguageOracle("random", ("0", "1"), lambda w: w in members)


@FAST
@given(finite_language(), st.text(alphabet="01", max_size=3), st.text(alphabet="01", max_size=3))
def test_n_dissimilar_symmetric(L, x, y):
    n = 4
    a, b = n_dissimilar(L, x, y, n), n_dissimilar(L, y, x, n)
    assert a[0] == b[0]
    if a[0]:
        assert L(x + a[1]) != L(y + a[1])
    if x == y:
        assert not a[0]


@settings(max_examples=20, deadline=None)
@given(finite_language())
def test_non_regularity_monotone(L):
    vals = [non_regularity(L, n).value for n in range(5)]
    assert vals == sorted(vals) and vals[0] == 1


@st.composite
def random_dfa(draw):
    k = draw(st.integers(1, 5))
    delta = {(q, a): draw(st.integers(0, k - 1)) for q in range(k) for a in "01"}
    acc = draw(st.sets(st.integers(0, k - 1)))
    return Dfa(list(range(k)), ("0", "1"), 0, acc, delta)


@FAST
@given(random_dfa())
def test_minimize_preserves_language(d):
    m = minimize_dfa(d)
    assert len(m.states) <= len(d.states)
    for w in strings("01", 6):
        assert m.accepts(w) == d.accepts(w)
