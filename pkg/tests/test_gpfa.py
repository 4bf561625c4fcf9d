from fractions import Fraction

import pytest

from conftest import pfa
from oracles import matrix_value
from tm1.gpfa import (CutPoint, Gpfa, GpfaError, UnknownSymbol, acceptance_value,
                      complement_gpfa, cut_language_member, difference_gpfa, identity,
                      is_stochastic, parse_gpfa, product_gpfa, render_gpfa, symdiff_gpfa,
                      word_matrix)
from tm1.langlab import strings


def test_word_matrix_empty_and_dyadic():
    g = pfa("pfa_half")
    assert word_matrix(g, "") == identity(2)
    m = word_matrix(g, "aa")
    assert m == [[Fraction(1, 4), Fraction(3, 4)], [0, 1]]
    assert all((v.denominator & (v.denominator - 1)) == 0 for row in m for v in row)


def test_pfa_half_values():
    g = pfa("pfa_half")
    for n in range(8):
        assert acceptance_value(g, "a" * n) == Fraction(1, 2 ** n)


def test_against_matrix_oracle():
    for name in ("pfa_half", "pfa_thirds", "pfa_mixed_start"):
        g = pfa(name)
        for x in strings(g.alphabet, 5):
            assert acceptance_value(g, x) == matrix_value(g.pi, g.T, g.eta, x)
        assert acceptance_value(g, "") == sum(p * e for p, e in zip(g.pi, g.eta))


def test_cut_points():
    g = pfa("pfa_half")
    assert cut_language_member(g, CutPoint(Fraction(1, 2), "eq"), "a")
    assert not cut_language_member(g, CutPoint(Fraction(1, 2), "gt"), "a")
    zero = CutPoint(Fraction(0), "gt")
    assert all(cut_language_member(g, zero, x) == (acceptance_value(g, x) > 0)
               for x in strings("a", 5))
    with pytest.raises(GpfaError):
        CutPoint(Fraction(1, 2), "ge")


def test_stochastic():
    assert is_stochastic(pfa("pfa_half"))
    assert not is_stochastic(Gpfa([1, 0], {"a": [[Fraction(9, 10), 0], [0, 1]]}, [1, 0]))
    assert not is_stochastic(Gpfa([1, 0], {"a": [[1, 0], [0, 1]]}, [Fraction(1, 2), 0]))


def test_closures():
    g, h = pfa("pfa_thirds"), pfa("pfa_mixed_start")
    d, p = difference_gpfa(g, h), product_gpfa(g, h)
    for x in strings(g.alphabet, 4):
        a, b = acceptance_value(g, x), acceptance_value(h, x)
        assert acceptance_value(d, x) == a - b
        assert acceptance_value(p, x) == a * b


def test_complement_and_symdiff():
    g, h = pfa("pfa_thirds"), pfa("pfa_mixed_start")
    e = CutPoint(Fraction(1, 2), "eq")
    c, cc = complement_gpfa(g, e)
    s = CutPoint(Fraction(1, 3), "gt")
    sd, csd = symdiff_gpfa(g, s, h, s)
    for x in strings(g.alphabet, 4):
        assert cut_language_member(c, cc, x) == (not cut_language_member(g, e, x))
        a, b = acceptance_value(g, x), acceptance_value(h, x)
        if a != s.value and b != s.value:
            assert cut_language_member(sd, csd, x) == ((a > s.value) != (b > s.value))


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        acceptance_value(pfa("pfa_half"), "b")


def test_round_trip():
    g = pfa("pfa_mixed_start")
    g2 = parse_gpfa(render_gpfa(g))
    assert (g2.pi, g2.T, g2.eta) == (g.pi, g.T, g.eta)
    with pytest.raises(GpfaError):
        parse_gpfa("gpfa\nstates: 2\npi: 1 0\neta: 1\n")
