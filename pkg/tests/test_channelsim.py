import math

import numpy as np
import pytest

from rmrll.channelsim import (
    BEC,
    BSC,
    BiAwgn,
    InconsistentErasureError,
    all_codewords,
    bec_bitmap_decode,
    capacity,
    exhaustive_map_decode,
    parse_channel,
    transmit,
)
from rmrll.gf2 import BitWord, Gf2Matrix
from rmrll.rmcode import build, encode


def signal(word: BitWord) -> np.ndarray:
    return 1.0 - 2.0 * word.to_numpy()


def test_transmit_bec_extremes(rng):
    x = BitWord.from_str("0110100111")
    assert (transmit(x, BEC(0.0), rng) == signal(x)).all()
    assert (transmit(x, BEC(1.0), rng) == 0).all()


def test_bsc_flip_rate(rng):
    n, p = 1_000_000, 0.1
    y = transmit(BitWord(n, 0), BSC(p), rng)
    flips = int((y < 0).sum())
    assert abs(flips / n - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_awgn_noise_moments(rng):
    y = transmit(BitWord.ones(200_000), BiAwgn(0.5), rng)
    assert abs(y.mean() + 1.0) < 0.01
    assert abs(y.std() - 0.5) < 0.01


def test_capacity_values():
    assert capacity(BEC(0.3)) == pytest.approx(0.7)
    assert capacity(BSC(0.5)) == pytest.approx(0.0)
    assert capacity(BSC(0.11)) == pytest.approx(0.50008, abs=1e-5)
    # BI-AWGN reference values
    assert capacity(BiAwgn(1.0)) == pytest.approx(0.4859, abs=1e-3)
    assert capacity(BiAwgn(0.05)) == pytest.approx(1.0, abs=1e-6)
    assert capacity(BiAwgn(0.8)) > capacity(BiAwgn(1.2))


def test_parse_channel():
    assert parse_channel("bec:0.05") == BEC(0.05)
    assert parse_channel("BSC:0.1") == BSC(0.1)
    assert parse_channel("awgn:0.7") == BiAwgn(0.7)
    for bad in ("bec", "foo:1", "bec:x", "bec:1.5", "awgn:0"):
        with pytest.raises(ValueError):
            parse_channel(bad)


def test_bitmap_repetition():
    res = bec_bitmap_decode(Gf2Matrix.from_strings(["1111"]), [0, 0, -1, 0])
    assert res.message.tolist() == [1]
    assert res.codeword.tolist() == [1, 1, 1, 1]


def test_bitmap_rm21_ambiguous():
    res = bec_bitmap_decode(build(2, 1).generator, [1, 0, 0, -1])
    assert res.codeword.tolist() == [0, -1, -1, 1]
    assert not res.codeword_complete


def test_bitmap_inconsistent_input():
    with pytest.raises(InconsistentErasureError):
        bec_bitmap_decode(Gf2Matrix.from_strings(["1111"]), [1, -1, 0, 0])


@pytest.mark.parametrize("m,r", [(3, 1), (4, 2), (5, 2)])
def test_bitmap_below_min_distance_decodes(m, r, rng):
    code = build(m, r)
    for _ in range(50):
        msg = BitWord(code.K, int(rng.integers(0, 2**code.K)))
        y = signal(encode(code, msg))
        erase = rng.choice(code.N, size=code.dmin - 1, replace=False)
        y[erase] = 0
        res = bec_bitmap_decode(code.generator, y)
        assert res.message_word() == msg


def test_bitmap_genie_soundness():
    code = build(6, 3)
    rng = np.random.default_rng(99)
    for _ in range(10_000):
        msg = BitWord(code.K, int(rng.integers(0, 2**code.K)))
        x = encode(code, msg)
        y = transmit(x, BEC(float(rng.uniform(0.2, 0.7))), rng)
        res = bec_bitmap_decode(code.generator, y)
        known = res.codeword >= 0
        assert (res.codeword[known] == x.to_numpy()[known]).all()
        kmsg = res.message >= 0
        assert (res.message[kmsg] == msg.to_numpy()[kmsg]).all()


def test_bitmap_monotone_in_erasures(rng):
    code = build(5, 2)
    x = encode(code, BitWord(code.K, 0b1011010110))
    u = rng.random(code.N)
    decided = []
    for eps in np.linspace(0, 1, 11):
        y = np.where(u < eps, 0.0, signal(x))
        decided.append(int((bec_bitmap_decode(code.generator, y).codeword >= 0).sum()))
    assert decided == sorted(decided, reverse=True)


def test_map_noiseless_bsc():
    code = build(3, 1)
    x = encode(code, BitWord(4, 0b1101))
    res = exhaustive_map_decode(code, signal(x), BSC(0.0))
    assert res.block_map == x
    assert res.bits.tolist() == x.to_numpy().tolist()


def test_map_and_bitmap_agree_on_rm31():
    code = build(3, 1)
    x = encode(code, BitWord(4, 0b0110))
    for pattern in range(256):
        y = signal(x)
        y[[i for i in range(8) if (pattern >> i) & 1]] = 0
        post = exhaustive_map_decode(code, y, BEC(0.4)).posteriors
        assert np.all(np.isclose(post, 0) | np.isclose(post, 1) | np.isclose(post, 0.5))
        decided = bec_bitmap_decode(code.generator, y).codeword >= 0
        assert (decided == ~np.isclose(post, 0.5)).all()


def test_map_symmetric_tie():
    code = build(2, 1)
    # 0000 and 0011 are each one flip away from 0001
    y = np.array([1.0, 1.0, 1.0, -1.0])
    res = exhaustive_map_decode(code, y, BSC(0.1))
    post = res.posteriors
    assert post[3] > 0.5 and post[0] < 0.5
    a, b = np.array([1.0, 1.0, 1.0, 1.0]), np.array([1.0, 1.0, -1.0, -1.0])
    y = (a + b) / 2 + 0.0  # (1, 1, 0, 0): erase two positions, AWGN-like equidistance
    res = exhaustive_map_decode(code, y, BiAwgn(1.0))
    assert res.posteriors[2] == pytest.approx(0.5) and res.posteriors[3] == pytest.approx(0.5)
    assert res.bits[2] == 0


def test_map_dimension_cap():
    with pytest.raises(ValueError):
        exhaustive_map_decode(build(6, 2), np.ones(64), BSC(0.1))


def test_all_codewords_rows():
    words = all_codewords(build(2, 1).generator)
    assert sorted(BitWord.from_bits(w).value for w in words) == sorted({0, 15, 10, 5, 12, 3, 6, 9})
