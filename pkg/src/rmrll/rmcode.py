"""Reed-Muller codes RM(m, r) with explicit coordinate orderings.

Coordinates are indexed by integers ``0 <= i < 2**m``; the m-tuple of ``i`` is
its binary expansion with ``b_1`` the most significant bit, so ``x_m`` varies
fastest along the lexicographic order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .gf2 import BitWord, Gf2Matrix, bits_to_int, int_to_bits, rank, restrict_columns, span_iter

MAX_M = 26
MAX_EXHAUSTIVE_DIM = 22


def binom_le(m: int, r: int) -> int:
    """Sum of C(m, i) for 0 <= i <= r."""
    if r < 0:
        return 0
    return sum(math.comb(m, i) for i in range(min(r, m) + 1))


@dataclass(frozen=True)
class CoordinateOrdering:
    """Position ``j`` of the transmitted word carries coordinate ``perm[j]``."""

    kind: str
    perm: tuple[int, ...]

    def __post_init__(self):
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)):
            raise ValueError("ordering is not a permutation")
        if n & (n - 1):
            raise ValueError("ordering length must be a power of two")

    @property
    def m(self) -> int:
        return len(self.perm).bit_length() - 1

    @classmethod
    def lex(cls, m: int) -> "CoordinateOrdering":
        return cls("lex", tuple(range(1 << m)))

    @classmethod
    def explicit(cls, perm: Sequence[int]) -> "CoordinateOrdering":
        return cls("explicit", tuple(int(p) for p in perm))


def gray_permutation(m: int) -> CoordinateOrdering:
    """Binary reflected Gray ordering."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return CoordinateOrdering("gray", tuple(j ^ (j >> 1) for j in range(1 << m)))


def _resolve_ordering(ordering, m: int) -> CoordinateOrdering:
    if ordering is None or ordering == "lex":
        return CoordinateOrdering.lex(m)
    if ordering == "gray":
        return gray_permutation(m)
    if isinstance(ordering, CoordinateOrdering):
        if len(ordering.perm) != 1 << m:
            raise ValueError("ordering length does not match 2^m")
        return ordering
    return CoordinateOrdering.explicit(ordering)


@lru_cache(maxsize=64)
def _variable_evals(m: int) -> tuple[int, ...]:
    idx = np.arange(1 << m, dtype=np.int64)
    return tuple(bits_to_int((idx >> (m - j)) & 1) for j in range(1, m + 1))


def eval_monomial(S: Sequence[int], m: int) -> BitWord:
    """Evaluation vector of prod_{j in S} x_j in lexicographic order."""
    n = 1 << m
    v = (1 << n) - 1
    evals = _variable_evals(m)
    for j in S:
        if not 1 <= j <= m:
            raise ValueError(f"variable index {j} outside 1..{m}")
        v &= evals[j - 1]
    return BitWord(n, v)


def monomials(m: int, r: int) -> list[tuple[int, ...]]:
    """Monomials of degree <= r, ordered by degree then lexicographically."""
    out: list[tuple[int, ...]] = []
    for deg in range(min(r, m) + 1):
        out.extend(combinations(range(1, m + 1), deg))
    return out


@dataclass(frozen=True)
class RmCode:
    m: int
    r: int
    ordering: CoordinateOrdering
    generator: Gf2Matrix
    monomials: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def K(self) -> int:
        return self.generator.nrows

    @property
    def N(self) -> int:
        return 1 << self.m

    @property
    def dmin(self) -> int:
        return 1 << (self.m - self.r)

    @property
    def rate(self) -> float:
        return self.K / self.N

    def info_set(self) -> list[int]:
        return information_set(self.m, self.r)


def build(m: int, r: int, ordering=None) -> RmCode:
    """RM(m, r); ``ordering`` is None/'lex', 'gray', a permutation or a CoordinateOrdering."""
    if not 0 <= m <= MAX_M:
        raise ValueError(f"m must lie in [0, {MAX_M}]")
    if not 0 <= r <= m:
        raise ValueError(f"need 0 <= r <= m, got r={r}, m={m}")
    order = _resolve_ordering(ordering, m)
    monos = monomials(m, r)
    rows = [eval_monomial(S, m).value for S in monos]
    G = Gf2Matrix(tuple(rows), 1 << m)
    if order.kind != "lex":
        G = restrict_columns(G, order.perm)
    return RmCode(m, r, order, G, tuple(monos))


def encode(code: RmCode, msg: BitWord) -> BitWord:
    if msg.length != code.K:
        raise ValueError(f"message length {msg.length} != K = {code.K}")
    return BitWord(code.N, code.generator.vecmul(msg))


def plotkin_split(f: BitWord) -> tuple[BitWord, BitWord]:
    """f = g + x_m h  ->  (g, h); even positions carry g, odd positions g + h."""
    n = f.length
    if n < 2 or n & (n - 1):
        raise ValueError("length must be a power of two >= 2")
    bits = f.to_numpy()
    g = bits[0::2]
    h = g ^ bits[1::2]
    return BitWord(n // 2, bits_to_int(g)), BitWord(n // 2, bits_to_int(h))


def plotkin_join(g: BitWord, h: BitWord) -> BitWord:
    if g.length != h.length:
        raise ValueError("g and h must have equal length")
    gb, hb = g.to_numpy(), h.to_numpy()
    out = np.empty(2 * g.length, dtype=np.uint8)
    out[0::2] = gb
    out[1::2] = gb ^ hb
    return BitWord(out.size, bits_to_int(out))


def r_of_rate(m: int, R: float) -> int:
    """Order r_m = max(floor(m/2 + sqrt(m)/2 * Qinv(1 - R)), 0), capped at m."""
    if not 0.0 < R < 1.0:
        raise ValueError("R must lie in (0, 1)")
    if m < 1:
        raise ValueError("m must be >= 1")
    # Qinv(1 - R) = Phi^{-1}(R)
    q = float(ndtri(R))
    return min(max(math.floor(m / 2 + math.sqrt(m) / 2 * q), 0), m)


def information_set(m: int, r: int) -> list[int]:
    """Coordinates whose binary expansion has weight <= r."""
    if not 0 <= r <= m:
        raise ValueError("need 0 <= r <= m")
    return [i for i in range(1 << m) if i.bit_count() <= r]


def _runs(ordering: CoordinateOrdering, info_set) -> list[tuple[int, int]]:
    """(start position, length) of each maximal run of positions inside the set."""
    members = set(info_set)
    runs = []
    start = None
    for s, c in enumerate(ordering.perm):
        if c in members:
            if start is None:
                start = s
        elif start is not None:
            runs.append((start, s - start))
            start = None
    if start is not None:
        runs.append((start, len(ordering.perm) - start))
    return runs


def run_endpoints(ordering, info_set, m: int | None = None) -> list[int]:
    """Positions closing a run of set members (the end of the word counts as outside)."""
    if not info_set:
        raise ValueError("info_set must be nonempty")
    if not isinstance(ordering, CoordinateOrdering):
        if m is None:
            raise ValueError("m required when ordering is given by name")
        ordering = _resolve_ordering(ordering, m)
    return [start + length - 1 for start, length in _runs(ordering, info_set)]


def disjoint_tuple_count(info_set, ordering: CoordinateOrdering, d: int) -> int:
    """Greedy count of disjoint (d+1)-tuples of consecutive positions inside the set."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return sum(length // (d + 1) for _, length in _runs(ordering, info_set))


@dataclass(frozen=True)
class WeightDistribution:
    counts: dict[int, int]
    K: int
    N: int

    def __getitem__(self, w: int) -> int:
        return self.counts.get(w, 0)

    def total(self) -> int:
        return sum(self.counts.values())


def weight_distribution(code: RmCode) -> WeightDistribution:
    if code.K > MAX_EXHAUSTIVE_DIM:
        raise ValueError(f"dimension {code.K} exceeds the exhaustive cap {MAX_EXHAUSTIVE_DIM}")
    hist = np.zeros(code.N + 1, dtype=np.int64)
    for c in span_iter(code.generator.rows):
        hist[c.bit_count()] += 1
    counts = {int(w): int(a) for w, a in enumerate(hist) if a}
    return WeightDistribution(counts, code.K, code.N)


def random_permutation_infoset_experiment(m: int, r: int, alpha: float, trials: int, rng) -> tuple[float, float]:
    """Fraction of random orderings whose first ceil(K(1+alpha)) positions hold an information set.

    Returns ``(fraction, binomial standard error)``.  Passing generators with
    the same seed for different ``alpha`` couples the trials (nested prefixes).
    """
    code = build(m, r)
    K, N = code.K, code.N
    prefix = math.ceil(K * (1 + alpha) - 1e-12)
    if prefix > N:
        raise ValueError("K(1+alpha) exceeds the blocklength")
    cols = code.generator.transpose().rows
    hits = 0
    for _ in range(trials):
        perm = rng.permutation(N)
        if prefix >= K and rank(Gf2Matrix(tuple(cols[p] for p in perm[:prefix]), K)) == K:
            hits += 1
    frac = hits / trials
    return frac, math.sqrt(frac * (1 - frac) / trials)
