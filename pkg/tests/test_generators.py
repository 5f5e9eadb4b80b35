from math import isqrt

import pytest
from hypothesis import given
from hypothesis import strategies as st

from esequence.generators import GeneratorSpec
from esequence.periodic import PeriodicSpec
from esequence.theta import Theta
from oracles import floor_n_log2_3_interval, floor_sqrt2, log2_3_enclosure


def test_log2_3_terms():
    assert GeneratorSpec.parse("sturmian:log2_3").prefix(9) == (1, 2, 1, 2, 1, 2, 2, 1, 2)


def test_log2_3_fast_path_matches_oracle():
    enc = log2_3_enclosure(120)
    terms = GeneratorSpec.parse("sturmian:log2_3").prefix(3000)
    b = 0
    for n, a in enumerate(terms, start=1):
        b += a
        assert b == floor_n_log2_3_interval(n, enc)


def test_sturmian_sqrt2_terms_are_floor_differences():
    terms = GeneratorSpec.parse("sturmian:cf:1;2").prefix(500)
    assert [floor_sqrt2(n) - floor_sqrt2(n - 1) for n in range(1, 501)] == list(terms)


def test_powers_of_two_rule():
    terms = GeneratorSpec.parse("powers-of-two").prefix(40)
    marked = [n for n, a in enumerate(terms, start=1) if a == 2]
    assert marked == [2, 4, 8, 16, 32]
    assert set(terms) == {1, 2}
    assert GeneratorSpec.parse("powers2") == GeneratorSpec.powers_of_two_marked()


def test_squares_rule():
    terms = GeneratorSpec.parse("squares").prefix(120)
    marked = [n for n, a in enumerate(terms, start=1) if a == 2]
    assert marked == [4, 9, 16, 25, 36, 49, 64, 81, 100]


def test_periodic_and_explicit():
    g = GeneratorSpec.parse("periodic:1,4;2")
    assert g.prefix(6) == (1, 4, 2, 2, 2, 2)
    assert g.spec == PeriodicSpec((1, 4), (2,))
    g = GeneratorSpec.parse("explicit:1,2,3")
    assert g.is_finite and g.prefix(3) == (1, 2, 3)
    with pytest.raises(IndexError):
        g.prefix(4)


def test_esequence_descriptor():
    g = GeneratorSpec.parse("esequence:7", n=5)
    assert g.terms == (1, 1, 2, 3, 4)
    with pytest.raises(ValueError):
        GeneratorSpec.parse("esequence:7")


@pytest.mark.parametrize("bad", ["nope", "explicit:1,0", "periodic:", "sturmian:1/3"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        GeneratorSpec.parse(bad)


@pytest.mark.parametrize(
    "text", ["explicit:1,2", "periodic:1,4;2", "sturmian:log2_3", "sturmian:cf:1;2", "powers-of-two", "squares"]
)
def test_describe_round_trip(text):
    g = GeneratorSpec.parse(text)
    assert GeneratorSpec.parse(g.describe()) == g


def test_density():
    assert GeneratorSpec.parse("periodic:1,4;2,1").density == Theta.rational(3, 2)
    assert GeneratorSpec.parse("powers-of-two").density == Theta.rational(1)
    assert GeneratorSpec.parse("sturmian:log2_3").density == Theta.log2_3()
    assert GeneratorSpec.parse("explicit:1,2").density is None


@given(st.integers(1, 5000))
def test_marked_rules_count(n):
    b = sum(GeneratorSpec.squares_marked().prefix(n))
    assert b == n + max(0, isqrt(n) - 1)
    b = sum(GeneratorSpec.powers_of_two_marked().prefix(n))
    assert b == n + n.bit_length() - 1


@given(st.integers(1, 9), st.integers(1, 9), st.integers(1, 300))
def test_rational_sturmian_sum(p, q, n):
    if p < q:
        p, q = q, p
    terms = GeneratorSpec.sturmian(Theta.rational(p, q)).prefix(n)
    assert sum(terms) == n * p // q
