import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmrll.gf2 import BitWord
from rmrll.rll import (
    count_sequences,
    enum_decode,
    enum_encode,
    gamma_set,
    is_valid,
    log2_count_sequences,
    noiseless_capacity,
    run_stats,
)


def brute_valid(n, d):
    return [v for v in range(1 << n) if is_valid(BitWord(n, v), d)]


def test_is_valid_examples():
    assert is_valid("100100010", 2)
    assert not is_valid("10100010", 2)
    assert not is_valid("11", 1)
    assert is_valid("0000", 5)


def test_count_examples():
    assert [count_sequences(n, 1) for n in (1, 2, 3)] == [2, 3, 5]
    assert count_sequences(0, 3) == 1
    assert count_sequences(3, 2) == 4


@pytest.mark.parametrize("d", range(0, 5))
def test_count_matches_enumeration(d):
    for n in range(0, 13 if d == 0 else 17):
        assert count_sequences(n, d) == len(brute_valid(n, d))


def test_log2_count_for_large_n():
    n = 5000
    exact = count_sequences(n, 1)
    assert abs(log2_count_sequences(n, 1) - (exact.bit_length() - 1) - math.log2(exact / 2 ** (exact.bit_length() - 1))) < 1e-9


def test_capacity_values():
    assert noiseless_capacity(0) == 1.0
    assert abs(noiseless_capacity(1) - math.log2((1 + math.sqrt(5)) / 2)) < 1e-9
    assert abs(noiseless_capacity(2) - 0.5515) < 1e-4


@pytest.mark.parametrize("d", range(1, 5))
def test_capacity_is_limit_from_above(d):
    cap = noiseless_capacity(d)
    gaps = [log2_count_sequences(n, d) / n - cap for n in (8, 16, 32, 64, 128, 256)]
    assert all(g >= -1e-12 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)


def test_enum_examples():
    assert str(enum_encode(0, 3, 1)) == "000"
    assert str(enum_encode(4, 3, 1)) == "101"
    with pytest.raises(ValueError):
        enum_encode(5, 3, 1)
    with pytest.raises(ValueError):
        enum_decode("11", 1)


@pytest.mark.parametrize("d", range(0, 4))
def test_enum_round_trip_and_order(d):
    for n in range(0, 13):
        total = count_sequences(n, d)
        words = [enum_encode(k, n, d) for k in range(total)]
        assert all(is_valid(w, d) for w in words)
        assert [enum_decode(w, d) for w in words] == list(range(total))
        assert [str(w) for w in words] == sorted(str(w) for w in words)


def test_run_stats_examples():
    s = run_stats("0000")
    assert (s.tau0, s.tau1, s.tau) == (1, 0, 1)
    s = run_stats("0101")
    assert (s.tau0, s.tau1, s.tau) == (2, 2, 4)
    s = run_stats("1001")
    assert (s.tau0, s.tau1, s.tau) == (1, 2, 3)
    with pytest.raises(ValueError):
        run_stats("")


@given(st.lists(st.integers(0, 1), min_size=1, max_size=40))
def test_run_stats_properties(bits):
    s = run_stats(bits)
    groups = [k for k, _ in itertools.groupby(bits)]
    assert s.tau0 == groups.count(0) and s.tau1 == groups.count(1)
    assert abs(s.tau1 - s.tau0) <= 1
    assert (s.tau1 - s.tau0 == 1) == (bits[0] == 1 and bits[-1] == 1)


def test_gamma_set_examples():
    assert gamma_set("0000") == []
    assert gamma_set("0100") == [0]
    assert gamma_set("0010") == [1]
    with pytest.raises(ValueError):
        gamma_set("010")


@given(st.integers(1, 5).flatmap(lambda k: st.lists(st.integers(0, 1), min_size=2**k, max_size=2**k)))
def test_gamma_set_is_zero_run_ends(bits):
    n = len(bits)
    expected = [i for i in range(n - 1) if bits[i] == 0 and bits[i + 1] == 1]
    assert gamma_set(bits) == expected
