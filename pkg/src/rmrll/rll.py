"""(d, inf)-runlength-limited words: validity, counting, capacity, enumerative coding."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf2 import BitWord


def _as_word(w) -> BitWord:
    if isinstance(w, BitWord):
        return w
    if isinstance(w, str):
        return BitWord.from_str(w)
    return BitWord.from_bits(w)


def valid_int(v: int, d: int) -> bool:
    """True when no two ones of the bitset ``v`` are closer than d+1 positions."""
    for k in range(1, d + 1):
        if v & (v >> k):
            return False
    return True


def is_valid(w, d: int) -> bool:
    """Every pair of successive ones is separated by at least ``d`` zeros."""
    return valid_int(_as_word(w).value, d)


def count_sequences(n: int, d: int) -> int:
    """Number of valid words of length n (exact integer)."""
    if n < 0 or d < 0:
        raise ValueError("n and d must be non-negative")
    if n <= d:
        return n + 1
    a = list(range(1, d + 2))  # a(0..d)
    for k in range(d + 1, n + 1):
        a.append(a[k - 1] + a[k - d - 1])
    return a[n]


def log2_count_sequences(n: int, d: int) -> float:
    c = count_sequences(n, d)
    # exact for huge ints: split off the top 53 bits
    shift = max(c.bit_length() - 60, 0)
    return math.log2(c >> shift) + shift


def transfer_matrix(d: int) -> np.ndarray:
    """State = zeros emitted since the last one, capped at d."""
    T = np.zeros((d + 1, d + 1))
    for s in range(d):
        T[s, s + 1] = 1.0
    T[d, d] = 1.0
    T[d, 0] = 1.0
    return T


def noiseless_capacity(d: int, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """log2 of the spectral radius of the constraint graph, by power iteration."""
    if d < 0:
        raise ValueError("d must be non-negative")
    if d == 0:
        return 1.0
    T = transfer_matrix(d)
    v = np.full(d + 1, 1.0 / (d + 1))
    lam = 0.0
    for _ in range(max_iter):
        u = T @ v
        lam = float(u.sum())  # v sums to one
        u /= lam
        if np.abs(u - v).max() <= tol:
            v = u
            break
        v = u
    return math.log2(lam)


@lru_cache(maxsize=32)
def _suffix_counts(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """table[k][s]: completions of length k starting from state s."""
    table = [tuple([1] * (d + 1))]
    for _ in range(n):
        prev = table[-1]
        row = []
        for s in range(d + 1):
            c = prev[min(s + 1, d)]
            if s == d:
                c += prev[0]
            row.append(c)
        table.append(tuple(row))
    return tuple(table)


def enum_encode(rank: int, n: int, d: int) -> BitWord:
    """The ``rank``-th valid word of length n in lexicographic order (0 < 1)."""
    table = _suffix_counts(n, d)
    total = table[n][d]
    if not 0 <= rank < total:
        raise ValueError(f"rank {rank} outside [0, {total})")
    v = 0
    s = d
    for i in range(n):
        rem = n - i - 1
        zeros = table[rem][min(s + 1, d)]
        if rank < zeros:
            s = min(s + 1, d)
        else:
            rank -= zeros
            v |= 1 << i
            s = 0
    return BitWord(n, v)


def enum_decode(w, d: int) -> int:
    w = _as_word(w)
    if not is_valid(w, d):
        raise ValueError(f"word {w} violates the (d={d}, inf) constraint")
    n = w.length
    table = _suffix_counts(n, d)
    rank = 0
    s = d
    for i in range(n):
        rem = n - i - 1
        if (w.value >> i) & 1:
            rank += table[rem][min(s + 1, d)]
            s = 0
        else:
            s = min(s + 1, d)
    return rank


@dataclass(frozen=True)
class RunStats:
    tau0: int
    tau1: int

    @property
    def tau(self) -> int:
        return self.tau0 + self.tau1


def run_stats_int(v: int, n: int) -> RunStats:
    tau = 1 + ((v ^ (v >> 1)) & ((1 << (n - 1)) - 1)).bit_count()
    first, last = v & 1, (v >> (n - 1)) & 1
    diff = (first + last) - 1 if first == last else 0  # tau1 - tau0
    return RunStats((tau - diff) // 2, (tau + diff) // 2)


def run_stats(w) -> RunStats:
    w = _as_word(w)
    if w.length == 0:
        raise ValueError("empty word has no runs")
    return run_stats_int(w.value, w.length)


def gamma_mask(v: int, n: int) -> int:
    """Bitset of positions ending a zero-run, excluding the last position."""
    return ~v & (v >> 1) & ((1 << (n - 1)) - 1)


def gamma_set(g) -> list[int]:
    """Coordinates that end a run of zeros in ``g``, the all-ones coordinate excluded."""
    g = _as_word(g)
    n = g.length
    if n == 0 or n & (n - 1):
        raise ValueError("length must be a power of two")
    mask = gamma_mask(g.value, n)
    return [i for i in range(n) if (mask >> i) & 1]
