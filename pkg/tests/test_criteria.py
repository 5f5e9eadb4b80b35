from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from esequence.core import accumulate
from esequence.criteria import (
    CriterionError,
    PairFamily,
    chain_diagnostics,
    density_criterion,
    integer_nth_root,
    min_start_lower_bound,
    ninth_root_bounds,
    positional_diagnostics,
    powers_of_two_runs,
    repeated_block_criterion,
    residue_product,
    residue_product_bound,
    residue_product_sweep,
    runs_of_ones_criterion,
    shifted_product_bounds_check,
    sturmian_convergent_witnesses,
    sturmian_verdict,
    trajectory_diagnostics,
)
from esequence.generators import GeneratorSpec
from esequence.solver import solve_prefix
from esequence.theta import Theta
from esequence.trajectory import e_sequence_of
from esequence.verdict import (
    DENSITY,
    PERIODIC_GROWTH,
    REPEATED_BLOCK,
    RUNS_OF_ONES,
    STURMIAN_CONVERGENTS,
    SUM_BOUND,
)
from oracles import ninth_root_floor_by_bisection

LOG2_3_GEN = GeneratorSpec.parse("sturmian:log2_3")


# integer roots and products -------------------------------------------------


@given(st.integers(0, 10**80), st.integers(1, 12))
def test_integer_root_matches_bisection(m, k):
    r = integer_nth_root(m, k)
    assert r**k <= m < (r + 1) ** k
    if k == 9:
        assert r == ninth_root_floor_by_bisection(m)


@given(st.integers(1, 10**6))
def test_ninth_root_bounds_enclose(n):
    lo, hi = ninth_root_bounds(n)
    assert lo**9 <= n <= hi**9
    assert hi - lo <= Fraction(1, 10**6)


def test_residue_product_small_values():
    assert residue_product_bound(1) == (Fraction(4, 3), True)
    assert residue_product_bound(2) == (Fraction(64, 45), True)
    prod, ok = residue_product_bound(100)
    assert ok and prod == residue_product(100)


def test_residue_sweep_matches_direct_product():
    for n, prod, _, ok in residue_product_sweep(60):
        assert ok and prod == residue_product(n)


def test_min_start_lower_bound_example():
    # B_1 = 1, 3^1 = 3, U = 1: 1 / (3 * 0.5)
    assert min_start_lower_bound([2]) == Fraction(2, 3)
    with pytest.raises(ValueError):
        min_start_lower_bound([])


def test_shifted_products_examples():
    assert shifted_product_bounds_check(1, 1)
    assert shifted_product_bounds_check(5, 2)
    # the strict part at x=5, n=2: (16/15)(13/12) = 52/45 > 15/13
    assert Fraction(16, 15) * Fraction(13, 12) == Fraction(52, 45) > Fraction(15, 13)
    assert shifted_product_bounds_check(5, 2, ["down-strict"])


def test_shifted_products_preconditions():
    with pytest.raises(ValueError):
        shifted_product_bounds_check(2, 3, ["down"])
    with pytest.raises(ValueError):
        shifted_product_bounds_check(3, 1, ["down-strict"])
    with pytest.raises(ValueError):
        shifted_product_bounds_check(0, 1)
    with pytest.raises(ValueError):
        shifted_product_bounds_check(3, 1, ["sideways"])


@given(st.integers(1, 400), st.integers(1, 400))
def test_shifted_products_property(x, n):
    assert shifted_product_bounds_check(x, n)


# positional diagnostics -----------------------------------------------------


def test_positional_example_seven():
    t = e_sequence_of(7, 3)
    rep = positional_diagnostics(solve_prefix(t.exponents), t.exponents)
    assert rep.ratio_3 == Fraction(19, 27) and rep.ratio_2 == Fraction(19, 16)
    assert rep.implications["ii"] == (True, True)
    assert rep.contradictions == []


def test_positional_single_step():
    rep = chain_diagnostics([1, 2], [1])
    assert rep.ratio_2 == Fraction(1, 2)


def test_positional_rejects_repeats_and_mismatch():
    with pytest.raises(ValueError):
        chain_diagnostics([1, 1, 1], [2, 2])
    with pytest.raises(ValueError):
        positional_diagnostics(solve_prefix([1, 1]), [1, 2])


@given(st.integers(0, 10**6).map(lambda k: 2 * k + 1), st.integers(1, 80))
def test_no_contradictions_on_real_chains(x, n):
    for rep in trajectory_diagnostics(e_sequence_of(x, n)):
        assert rep.contradictions == []


# divergence criteria --------------------------------------------------------


def test_density_criterion():
    cert = density_criterion(GeneratorSpec.parse("sturmian:cf:1,1;6,2"))
    assert cert is not None and cert.theorem == DENSITY
    assert Fraction(cert.parameters["separating_rational"]) > Fraction(1584962500721, 10**12)
    assert density_criterion(LOG2_3_GEN) is None
    assert density_criterion(GeneratorSpec.parse("explicit:2,2,2")) is None
    assert density_criterion(GeneratorSpec.parse("sturmian:cf:1;2")) is None


def test_runs_of_ones_on_powers_of_two():
    cert = runs_of_ones_criterion(GeneratorSpec.powers_of_two_marked(), Fraction(7, 4), powers_of_two_runs(3, 8))
    assert cert.theorem == RUNS_OF_ONES and cert.by_rule
    for l, bound in cert.lower_bound_series:
        assert bound <= solve_prefix(GeneratorSpec.powers_of_two_marked().prefix(l)).x0


def test_runs_of_ones_plain_pairs_are_not_a_proof():
    pairs = [(8, 15), (16, 31)]
    cert = runs_of_ones_criterion(GeneratorSpec.powers_of_two_marked(), Fraction(7, 4), pairs)
    assert not cert.by_rule


@pytest.mark.parametrize(
    "c,pairs",
    [
        (Fraction(3, 2), [(8, 15)]),  # c below log2(3)
        (Fraction(7, 4), [(8, 14)]),  # l not above k c
        (Fraction(7, 4), [(8, 17)]),  # a_16 = 2 breaks the run
        (Fraction(7, 4), []),
    ],
)
def test_runs_of_ones_rejects(c, pairs):
    with pytest.raises(CriterionError):
        runs_of_ones_criterion(GeneratorSpec.powers_of_two_marked(), c, pairs)


def test_runs_guard_catches_fast_growth():
    with pytest.raises(CriterionError):
        runs_of_ones_criterion(GeneratorSpec.parse("explicit:2,1,1,1"), Fraction(7, 4), [(1, 2)])


def _recurring_pairs(terms, c, l_max):
    return [
        (r, l)
        for l in range(2, l_max)
        for r in range(1, l)
        if tuple(terms[l : l + r]) == tuple(terms[:r]) and sum(terms[: l + r]) > l * c
    ]


def test_repeated_block_on_log2_3():
    c = Fraction(65, 41)  # just above log2(3)
    terms = LOG2_3_GEN.prefix(300)
    pairs = _recurring_pairs(terms, c, 120)
    assert len(pairs) > 100
    cert = repeated_block_criterion(LOG2_3_GEN, c, pairs)
    assert cert.theorem == REPEATED_BLOCK and not cert.by_rule
    for n, bound in cert.lower_bound_series:
        assert bound <= solve_prefix(terms[:n]).x0


def test_repeated_block_symbolic_family():
    # 1,2,1,2,...: a_1..a_(2m-1) recurs at offset 2m and b_(4m-1) = 6m-2 > 2m (8/5)
    gen = GeneratorSpec.parse("periodic:1,2")
    family = PairFamily("r=2m-1,l=2m", lambda m: (2 * m - 1, 2 * m), range(1, 20))
    cert = repeated_block_criterion(gen, Fraction(8, 5), family)
    assert cert.by_rule and cert.parameters["family"] == "r=2m-1,l=2m"


@pytest.mark.parametrize("pairs", [[(2, 2)], [(1, 3)], [(1, 2)]])
def test_repeated_block_rejects(pairs):
    # (2,2): l not above r; (1,3): a_4 = 2 != a_1; (1,2) with c = 2: b_3 = 4 not above 4
    with pytest.raises(CriterionError):
        repeated_block_criterion(GeneratorSpec.parse("periodic:1,2"), Fraction(2), pairs)


# sturmian verdicts ----------------------------------------------------------


def test_sturmian_rational_slope_is_periodic():
    v = sturmian_verdict(Theta.rational(3, 2), 10)
    assert v.is_certified and v.criterion == PERIODIC_GROWTH
    v = sturmian_verdict(Theta.rational(2), 10)
    assert v.is_convergent and v.witness == 1


def test_sturmian_log2_3_sum_bound():
    v = sturmian_verdict(Theta.log2_3(), 256)
    assert v.is_certified and v.criterion == SUM_BOUND
    series = v.certificate.lower_bound_series
    assert [n for n, _ in series] == [1, 2, 4, 8, 16, 32, 64, 128, 256]
    for n, bound in series:
        assert bound <= solve_prefix(LOG2_3_GEN.prefix(n)).x0


def test_sturmian_sqrt2_witnesses():
    witnesses, skipped = sturmian_convergent_witnesses(Theta.parse("cf:1;2"), 200)
    assert skipped == []
    first = [(w.s, w.r, w.case, w.depth) for w in witnesses[:3]]
    assert first == [(1, 1, "below", 2), (3, 2, "above", 5), (7, 5, "below", 10)]
    assert witnesses[1].bound == 39 == witnesses[1].x0
    v = sturmian_verdict(Theta.parse("cf:1;2"), 200)
    assert v.criterion == STURMIAN_CONVERGENTS and v.details["witnesses"] == len(witnesses)


def test_close_convergent_without_structure_is_skipped():
    # theta ~ 1.3905: 3/2 is within 1/(sqrt5 r^2) but a_2 a_3 = 1,2 while a_4 a_5 = 1,1;
    # depth 2r+1 = 5 exceeds floor(sqrt5 * 2) = 4, so closeness does not force the repeat
    theta = Theta.parse("cf:1,2;1,1,3")
    assert GeneratorSpec.sturmian(theta).prefix(5) == (1, 1, 2, 1, 1)
    witnesses, skipped = sturmian_convergent_witnesses(theta, 300)
    assert 1 in skipped and all(w.index != 1 for w in witnesses)
    assert len(witnesses) >= 3
    assert sturmian_verdict(theta, 300).is_certified


def test_sturmian_above_log2_3_uses_density():
    v = sturmian_verdict(Theta.parse("cf:1;1"), 50)
    assert v.is_certified and v.criterion == DENSITY


@given(
    st.lists(st.integers(1, 3), max_size=2),
    st.lists(st.integers(1, 3), min_size=1, max_size=3),
)
def test_convergent_bounds_never_exceed_solver(head, period):
    theta = Theta.continued_fraction((1,) + tuple(head), tuple(period))
    if theta.compare_log2_3() > 0:
        return
    witnesses, _ = sturmian_convergent_witnesses(theta, 120)
    terms = GeneratorSpec.sturmian(theta).prefix(120)
    for w in witnesses:
        assert w.bound <= w.x0 == solve_prefix(terms[: w.depth]).x0
        assert 3**w.r > 2**w.s


@given(st.lists(st.integers(1, 2), min_size=1, max_size=60))
def test_min_start_bound_below_admissible_solver_starts(terms):
    # restrict to prefixes whose solver start meets the bound's hypotheses
    sol = solve_prefix(terms)
    chain = [sol.x0]
    for a in terms:
        chain.append((3 * chain[-1] + 1) >> a)
    if sol.x0 % 3 == 0 or len(set(chain[:-1])) != len(terms):
        return
    assert min_start_lower_bound(terms) <= sol.x0
    assert accumulate(terms).B == sol.B
