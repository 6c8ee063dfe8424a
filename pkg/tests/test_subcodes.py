import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmrll import rll
from rmrll.gf2 import BitWord, rank, span_iter
from rmrll.rmcode import CoordinateOrdering, binom_le, build, disjoint_tuple_count, information_set, plotkin_split, r_of_rate
from rmrll.subcodes import (
    appendix_f,
    bound,
    bound_table,
    c0,
    check_c1_c2,
    count_h_given_g,
    crossover,
    crossovers,
    exact_constrained_count,
    exact_log2_mean,
    finite_m_table,
    jensen_lower_bound,
    linear_subcode,
    mc_lower_bound,
    run_expectation_check,
)

B = BitWord.from_str


def test_linear_subcode_examples():
    assert linear_subcode(4, 2, 1).dimension == 4
    sc = linear_subcode(2, 1, 1)
    assert sc.dimension == 1
    assert sorted(str(BitWord(4, c)) for c in span_iter(sc.generator.rows)) == ["0000", "0101"]
    with pytest.raises(ValueError):
        linear_subcode(4, 1, 3)


@pytest.mark.parametrize("m,r,d", [(4, 2, 1), (5, 3, 2), (6, 3, 3), (6, 4, 7), (7, 3, 1)])
def test_linear_subcode_span_is_valid(m, r, d):
    sc = linear_subcode(m, r, d)
    assert sc.dimension == binom_le(m - sc.z, r - sc.z)
    period = 1 << sc.z
    allowed = sum(1 << i for i in range(1 << m) if i % period == period - 1)
    for c in span_iter(sc.generator.rows):
        assert rll.valid_int(c, d)
        assert c & ~allowed == 0


def test_linear_subcode_inside_rm():
    sc = linear_subcode(5, 3, 2)
    G = build(5, 3).generator
    assert rank(G.stack(sc.generator)) == G.nrows


def test_c1_c2_examples():
    assert check_c1_c2(B("00"), B("11"))
    assert not check_c1_c2(B("01"), B("00"))
    assert check_c1_c2(B("10"), B("11"))
    with pytest.raises(ValueError):
        check_c1_c2(B("00"), B("0000"))


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_characterization(m):
    for r in range(m + 1):
        for c in span_iter(build(m, r).generator.rows):
            f = BitWord(1 << m, c)
            assert rll.is_valid(f, 1) == check_c1_c2(*plotkin_split(f))


def test_count_h_examples():
    assert count_h_given_g(2, 1, B("00")) == 2
    assert count_h_given_g(2, 1, B("01")) == 0
    assert count_h_given_g(2, 1, B("11")) == 1


@pytest.mark.parametrize("m,r", [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3)])
def test_count_consistency(m, r):
    total = sum(count_h_given_g(m, r, BitWord(1 << (m - 1), g)) for g in span_iter(build(m - 1, r).generator.rows))
    assert exact_constrained_count(m, r, 1) == total


@pytest.mark.parametrize("m,r", [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)])
def test_shortening_bound(m, r):
    k_h = binom_le(m - 1, r - 1)
    for g in span_iter(build(m - 1, r).generator.rows):
        gw = BitWord(1 << (m - 1), g)
        cnt = count_h_given_g(m, r, gw)
        assert cnt == 0 or cnt & (cnt - 1) == 0
        if cnt:
            assert cnt >= 2.0 ** (k_h - gw.weight() - len(rll.gamma_set(gw)))


def test_exact_count_examples():
    assert exact_constrained_count(2, 1, 1) == 4
    assert exact_constrained_count(1, 1, 1) == 3
    for m in range(1, 6):
        assert exact_constrained_count(m, 0, 1) == 1
    with pytest.raises(ValueError):
        exact_constrained_count(6, 3, 1)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=40), st.integers(0, 2**40 - 1), st.integers(1, 4))
def test_domination(bits, mask, d):
    # greedily thin the random word into a valid one, then take a sub-support
    hat, last = 0, -(d + 1)
    for i, b in enumerate(bits):
        if b and i - last > d:
            hat |= 1 << i
            last = i
    assert rll.valid_int(hat, d)
    assert rll.valid_int(hat & mask, d)


def test_mc_matches_exhaustive_expectation():
    est = mc_lower_bound(5, 2, 10_000, np.random.default_rng(5))
    exact = exact_log2_mean(5, 2)
    assert abs(est.log2_mean - exact) <= 3 * est.log2_mean_stderr


def test_mc_degenerate_order_zero():
    # g ranges over {0, 1} in RM(m-1, 0): exponents 0 + 1 and 2^(m-1) + 0
    m = 4
    est = mc_lower_bound(m, 0, 4000, np.random.default_rng(2))
    exact = math.log2((2.0**-1 + 2.0**-8) / 2)
    assert exact_log2_mean(m, 0) == pytest.approx(exact)
    assert abs(est.log2_mean - exact) <= 3 * est.log2_mean_stderr + 1e-12


@pytest.mark.parametrize("m", [9, 11])
def test_mc_above_jensen(m):
    r = r_of_rate(m, 0.9)
    est = mc_lower_bound(m, r, 2000, np.random.default_rng(m))
    assert est.rate >= jensen_lower_bound(m, r) - 3 * est.stderr


def test_jensen_examples():
    rg, rh = binom_le(10, 6) / 1024, binom_le(10, 5) / 1024
    assert jensen_lower_bound(11, 6) == pytest.approx((rg + rh) / 2 - 3 / 8 - 1 / (8 * 1024))
    assert jensen_lower_bound(8, 1) == 0.0
    with pytest.raises(ValueError):
        jensen_lower_bound(5, 0)


def test_jensen_approaches_limit_at_half_rate():
    gaps = [abs(jensen_lower_bound(m, r_of_rate(m, 0.5)) - (0.5 - 3 / 8)) for m in (8, 12, 16)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_run_expectations():
    tau, t0, t1 = run_expectation_check(build(2, 1))
    assert tau == Fraction(5, 2)
    tau, t0, t1 = run_expectation_check(build(3, 1))
    assert (tau, t0, t1) == (Fraction(9, 2), Fraction(9, 4), Fraction(9, 4))
    assert run_expectation_check(build(4, 2))[0] == Fraction(17, 2)


def test_run_expectation_sampled(rng):
    tau, t0, t1 = run_expectation_check(build(6, 3), samples=20_000, rng=rng)
    assert abs(tau - 32.5) < 0.2 and abs(t0 - 16.25) < 0.2


def test_bound_values():
    assert bound("linear_ub", 0.8, 1) == pytest.approx(0.4)
    assert bound("general_ub_1inf", 0.8) == pytest.approx(0.6942, abs=1e-4)
    assert bound("concat_lb", 0.9, 1, tau=50) == pytest.approx(0.5567, abs=1e-4)
    assert bound("linear_lb", 0.8, 3) == pytest.approx(0.2)
    assert bound("coset_avg", 0.2, 1) == 0.0
    with pytest.raises(KeyError):
        bound("nope", 0.5)
    with pytest.raises(ValueError):
        bound("linear_ub", 1.0)


def test_bound_table():
    t = bound_table(1, 0.01)
    assert len(t.R) == 99
    for R, vals in t.rows():
        assert all(0.0 <= v <= 1.0 for v in vals.values())
        assert vals["linear_lb"] <= vals["linear_ub"]
        assert vals["nonlinear_lb"] <= vals["general_ub_1inf"]
    i = t.R.index(0.75)
    assert t.values["linear_lb"][i] == pytest.approx(0.375)
    assert t.values["nonlinear_lb"][i] == pytest.approx(0.375)
    with pytest.raises(ValueError):
        bound_table(1, 0.7)


def test_crossovers():
    assert crossover("concat_lb", lambda R: R / 2, 1) == pytest.approx(0.7613, abs=1e-3)
    lo, hi = crossovers("concat_lb", lambda R: max(0.0, R - 3 / 8), 1)
    assert lo == pytest.approx(0.55, abs=0.01) and hi == pytest.approx(0.79, abs=0.01)
    assert crossover(lambda R: R / 2, lambda R: R - 3 / 8) == pytest.approx(0.75, abs=1e-8)
    with pytest.raises(ValueError):
        crossover(lambda R: R, lambda R: R - 1)


def test_general_ub_plateau():
    knee = crossover(lambda R: 7 * R / 8, lambda R: c0(1))
    assert knee == pytest.approx(0.7934, abs=1e-4)


def test_appendix_f():
    assert appendix_f(1) == pytest.approx(0.75)
    assert appendix_f(2) == pytest.approx(0.68, abs=0.01)
    vals = [appendix_f(i) for i in range(1, 21)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_linear_dimension_obeys_tuple_bound():
    for m in range(2, 11):
        for r in range(1, m + 1):
            for d in (1, 2, 3):
                if r < (d).bit_length():
                    continue
                t = disjoint_tuple_count(information_set(m, r), CoordinateOrdering.lex(m), d)
                assert linear_subcode(m, r, d).dimension <= binom_le(m, r) - d * t


def test_finite_m_table_is_consistent():
    for row in finite_m_table(8):
        assert row["linear_subcode"] <= row["linear_ub_lex"] + 1e-12
        assert 0.0 <= row["jensen_lb"] <= 1.0
    assert [row["canonical"] for row in finite_m_table(4)] == [True, True, True]
