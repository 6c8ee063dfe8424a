"""Binary memoryless symmetric channels in multiplicative-noise form, and MAP decoders.

A bit x is sent as (-1)**x and the receiver sees Y = (-1)**x * Z.  For the BEC
Z is 1 or 0 (0 marks an erasure), for the BSC Z is +1 or -1, and for the
BI-AWGN channel Z ~ Normal(1, sigma^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .gf2 import BitWord, Gf2Matrix, restrict_columns, solve_affine
from .rmcode import RmCode
from .subcodes import binary_entropy

MAX_MAP_DIM = 16
_LOG_FLOOR = -1e6


@dataclass(frozen=True)
class BEC:
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("erasure probability must lie in [0, 1]")

    def __str__(self):
        return f"bec:{self.epsilon:g}"


@dataclass(frozen=True)
class BSC:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("crossover probability must lie in [0, 1]")

    def __str__(self):
        return f"bsc:{self.p:g}"


@dataclass(frozen=True)
class BiAwgn:
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def __str__(self):
        return f"awgn:{self.sigma:g}"


ChannelModel = BEC | BSC | BiAwgn


def parse_channel(text: str) -> ChannelModel:
    """Parse 'bec:eps', 'bsc:p' or 'awgn:sigma'."""
    kind, sep, value = text.strip().partition(":")
    if not sep:
        raise ValueError(f"channel spec {text!r} is not of the form kind:value")
    try:
        x = float(value)
    except ValueError:
        raise ValueError(f"bad channel parameter in {text!r}") from None
    kinds = {"bec": BEC, "bsc": BSC, "awgn": BiAwgn}
    if kind.lower() not in kinds:
        raise ValueError(f"unknown channel kind {kind!r}; use bec, bsc or awgn")
    return kinds[kind.lower()](x)


def transmit(x: BitWord, ch: ChannelModel, rng) -> np.ndarray:
    """Channel output Y = (-1)^x * Z as a float array."""
    sign = 1.0 - 2.0 * x.to_numpy().astype(np.float64)
    n = x.length
    if isinstance(ch, BEC):
        z = (rng.random(n) >= ch.epsilon).astype(np.float64)
    elif isinstance(ch, BSC):
        z = np.where(rng.random(n) < ch.p, -1.0, 1.0)
    elif isinstance(ch, BiAwgn):
        z = rng.normal(1.0, ch.sigma, n)
    else:
        raise TypeError(f"unsupported channel {ch!r}")
    return sign * z


def capacity(ch: ChannelModel) -> float:
    if isinstance(ch, BEC):
        return 1.0 - ch.epsilon
    if isinstance(ch, BSC):
        return 1.0 - binary_entropy(ch.p)
    if isinstance(ch, BiAwgn):
        s2 = ch.sigma**2
        pdf = stats.norm(loc=1.0, scale=ch.sigma).pdf
        # E[log2(1 + exp(-2Y/sigma^2))] for Y ~ N(1, sigma^2)
        loss = lambda y: pdf(y) * np.logaddexp(0.0, -2.0 * y / s2) / math.log(2)
        lo, hi = 1.0 - 40 * ch.sigma, 1.0 + 40 * ch.sigma
        val, _ = integrate.quad(loss, lo, hi, epsabs=1e-10, epsrel=1e-8, limit=200, points=[0.0, 1.0])
        return 1.0 - val
    raise TypeError(f"unsupported channel {ch!r}")


def hard_bits(y) -> np.ndarray:
    """Hard decisions: negative outputs read as 1."""
    return (np.asarray(y) < 0).astype(np.uint8)


@dataclass(frozen=True)
class ErasureDecodeResult:
    """Per-bit decisions in {0, 1, -1}; -1 marks an undecided bit."""

    message: np.ndarray
    codeword: np.ndarray

    @property
    def message_complete(self) -> bool:
        return bool((self.message >= 0).all())

    @property
    def codeword_complete(self) -> bool:
        return bool((self.codeword >= 0).all())

    def message_word(self) -> BitWord:
        if not self.message_complete:
            raise ValueError("message has undecided bits")
        return BitWord.from_bits(self.message)


class InconsistentErasureError(ValueError):
    """Unerased symbols do not agree with any codeword."""


def bec_bitmap_decode(G: Gf2Matrix, y) -> ErasureDecodeResult:
    """Exact bit-MAP over the erasure channel via Gaussian elimination."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (G.ncols,):
        raise ValueError(f"received length {y.size} != blocklength {G.ncols}")
    known = np.flatnonzero(y != 0)
    A = restrict_columns(G, known).transpose() if known.size else Gf2Matrix((), G.nrows)
    b = BitWord.from_bits(hard_bits(y[known])) if known.size else BitWord(0)
    sol = solve_affine(A, b)
    if not sol.feasible:
        raise InconsistentErasureError("unerased symbols are inconsistent with the code")
    free_msg = 0
    free_cw = 0
    for v in sol.nullspace_basis:
        free_msg |= v.value
        free_cw |= G.vecmul(v)
    msg = BitWord(G.nrows, sol.particular.value).to_numpy().astype(np.int8)
    cw = BitWord(G.ncols, G.vecmul(sol.particular)).to_numpy().astype(np.int8)
    msg[BitWord(G.nrows, free_msg).to_numpy().astype(bool)] = -1
    cw[BitWord(G.ncols, free_cw).to_numpy().astype(bool)] = -1
    return ErasureDecodeResult(msg, cw)


def _symbol_loglik(y: np.ndarray, ch: ChannelModel) -> tuple[np.ndarray, np.ndarray]:
    """Per-position log P(y | x=0) and log P(y | x=1)."""
    with np.errstate(divide="ignore"):
        if isinstance(ch, BEC):
            erased = y == 0
            hit = np.log(1 - ch.epsilon) if ch.epsilon < 1 else -np.inf
            ll0 = np.where(erased, 0.0, np.where(y > 0, hit, -np.inf))
            ll1 = np.where(erased, 0.0, np.where(y < 0, hit, -np.inf))
        elif isinstance(ch, BSC):
            keep, flip = np.log(1 - ch.p), np.log(ch.p)
            ll0 = np.where(y > 0, keep, flip)
            ll1 = np.where(y < 0, keep, flip)
        elif isinstance(ch, BiAwgn):
            s2 = 2 * ch.sigma**2
            ll0 = -((y - 1.0) ** 2) / s2
            ll1 = -((y + 1.0) ** 2) / s2
        else:
            raise TypeError(f"unsupported channel {ch!r}")
    return np.maximum(ll0, _LOG_FLOOR), np.maximum(ll1, _LOG_FLOOR)


def all_codewords(G: Gf2Matrix) -> np.ndarray:
    """Every codeword as a (2^K, N) uint8 array, row index = message integer."""
    K = G.nrows
    msgs = ((np.arange(1 << K)[:, None] >> np.arange(K)[None, :]) & 1).astype(np.int64)
    return ((msgs @ G.to_numpy().astype(np.int64)) & 1).astype(np.uint8)


@dataclass(frozen=True)
class MapDecodeResult:
    posteriors: np.ndarray  # P(c_i = 1 | y)
    bits: np.ndarray
    block_map: BitWord


def exhaustive_map_decode(code: RmCode, y, ch: ChannelModel) -> MapDecodeResult:
    """Exact bitwise posteriors and block-MAP codeword by summing over the code."""
    if code.K > MAX_MAP_DIM:
        raise ValueError(f"dimension {code.K} exceeds the exhaustive MAP cap {MAX_MAP_DIM}")
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (code.N,):
        raise ValueError("received length does not match the blocklength")
    words = all_codewords(code.generator)
    ll0, ll1 = _symbol_loglik(y, ch)
    scores = ll0.sum() + words @ (ll1 - ll0)
    w = np.exp(scores - scores.max())
    post = (w @ words) / w.sum()
    bits = (post > 0.5).astype(np.uint8)
    best = words[int(np.argmax(scores))]
    return MapDecodeResult(post, bits, BitWord.from_bits(best))
