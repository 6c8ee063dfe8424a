"""Bit-packed GF(2) vectors and matrices.

Words are stored as Python integers: coordinate ``i`` of a word lives in bit
``i`` of the integer, so coordinate 0 is the first (leftmost) symbol when a
word is printed.  Python integers are arbitrary-width machine-word arrays, so
XOR/AND on whole rows is word-parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "BitWord",
    "Gf2Matrix",
    "AffineSolutionSet",
    "rank",
    "rref",
    "solve_affine",
    "restrict_columns",
    "int_to_bits",
    "bits_to_int",
    "span_iter",
]


def int_to_bits(value: int, length: int) -> np.ndarray:
    """Unpack an integer bitset into a uint8 array of ``length`` coordinates."""
    if length == 0:
        return np.zeros(0, dtype=np.uint8)
    raw = value.to_bytes((length + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:length]


def bits_to_int(bits) -> int:
    arr = np.asarray(bits, dtype=np.uint8) & 1
    if arr.size == 0:
        return 0
    return int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")


@dataclass(frozen=True)
class BitWord:
    """Fixed-length binary word."""

    length: int
    value: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.value < 0 or self.value >> self.length:
            raise ValueError("value has bits outside the word length")

    @classmethod
    def from_str(cls, text: str) -> "BitWord":
        text = text.strip()
        if any(ch not in "01" for ch in text):
            raise ValueError(f"not a binary string: {text!r}")
        return cls(len(text), int(text[::-1], 2) if text else 0)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitWord":
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        return cls(int(arr.size), bits_to_int(arr))

    @classmethod
    def zeros(cls, length: int) -> "BitWord":
        return cls(length, 0)

    @classmethod
    def ones(cls, length: int) -> "BitWord":
        return cls(length, (1 << length) - 1)

    def __str__(self) -> str:
        if self.length == 0:
            return ""
        return format(self.value, f"0{self.length}b")[::-1]

    def __repr__(self) -> str:
        return f"BitWord('{self}')"

    def __len__(self) -> int:
        return self.length

    def __int__(self) -> int:
        return self.value

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.value >> i) & 1

    def __iter__(self) -> Iterator[int]:
        v = self.value
        for _ in range(self.length):
            yield v & 1
            v >>= 1

    def _check(self, other: "BitWord"):
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")

    def __xor__(self, other: "BitWord") -> "BitWord":
        self._check(other)
        return BitWord(self.length, self.value ^ other.value)

    def __and__(self, other: "BitWord") -> "BitWord":
        self._check(other)
        return BitWord(self.length, self.value & other.value)

    def __or__(self, other: "BitWord") -> "BitWord":
        self._check(other)
        return BitWord(self.length, self.value | other.value)

    def weight(self) -> int:
        return self.value.bit_count()

    def support(self) -> list[int]:
        return [i for i in range(self.length) if (self.value >> i) & 1]

    def dot(self, other: "BitWord") -> int:
        self._check(other)
        return (self.value & other.value).bit_count() & 1

    def concat(self, other: "BitWord") -> "BitWord":
        return BitWord(self.length + other.length, self.value | (other.value << self.length))

    def slice(self, start: int, stop: int) -> "BitWord":
        if not 0 <= start <= stop <= self.length:
            raise IndexError((start, stop))
        n = stop - start
        return BitWord(n, (self.value >> start) & ((1 << n) - 1))

    def to_numpy(self) -> np.ndarray:
        return int_to_bits(self.value, self.length)


@dataclass(frozen=True)
class Gf2Matrix:
    """Row-major binary matrix; each row is an integer bitset of ``ncols`` bits."""

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("row has bits outside the column range")

    @classmethod
    def from_words(cls, words: Sequence[BitWord], ncols: int | None = None) -> "Gf2Matrix":
        if ncols is None:
            if not words:
                raise ValueError("ncols required for an empty matrix")
            ncols = words[0].length
        for w in words:
            if w.length != ncols:
                raise ValueError("all rows must share the column count")
        return cls(tuple(w.value for w in words), ncols)

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "Gf2Matrix":
        return cls.from_words([BitWord.from_str(r) for r in rows])

    @classmethod
    def from_numpy(cls, arr) -> "Gf2Matrix":
        arr = np.atleast_2d(np.asarray(arr, dtype=np.uint8) & 1)
        if arr.shape[1] == 0:
            return cls(tuple(0 for _ in range(arr.shape[0])), 0)
        packed = np.packbits(arr, axis=1, bitorder="little")
        return cls(tuple(int.from_bytes(row.tobytes(), "little") for row in packed), arr.shape[1])

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Gf2Matrix":
        return cls((0,) * nrows, ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def row(self, i: int) -> BitWord:
        return BitWord(self.ncols, self.rows[i])

    def to_numpy(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            out[i] = int_to_bits(r, self.ncols)
        return out

    def transpose(self) -> "Gf2Matrix":
        return Gf2Matrix.from_numpy(self.to_numpy().T.copy()) if self.nrows else Gf2Matrix((0,) * self.ncols, 0)

    def vecmul(self, msg: BitWord | int) -> int:
        """Row combination selected by the bits of ``msg`` (i.e. ``msg @ M``)."""
        v = msg.value if isinstance(msg, BitWord) else int(msg)
        acc = 0
        i = 0
        while v:
            if v & 1:
                acc ^= self.rows[i]
            v >>= 1
            i += 1
        return acc

    def stack(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.ncols != other.ncols:
            raise ValueError("column counts differ")
        return Gf2Matrix(self.rows + other.rows, self.ncols)

    def permute_columns(self, perm: Sequence[int]) -> "Gf2Matrix":
        """Column ``j`` of the result is column ``perm[j]`` of ``self``."""
        return restrict_columns(self, perm)

    def __str__(self) -> str:
        return "\n".join(str(self.row(i)) for i in range(self.nrows))


@dataclass(frozen=True)
class AffineSolutionSet:
    """Solutions of ``A x = b``: ``particular + span(nullspace_basis)``."""

    feasible: bool
    nvars: int
    particular: BitWord | None
    nullspace_basis: tuple[BitWord, ...]

    @property
    def log2_count(self) -> float:
        return float(len(self.nullspace_basis)) if self.feasible else -math.inf

    @property
    def count(self) -> int:
        if not self.feasible:
            return 0
        k = len(self.nullspace_basis)
        if k > 62:
            raise OverflowError(f"2^{k} solutions; use log2_count")
        return 1 << k

    def __iter__(self) -> Iterator[BitWord]:
        if not self.feasible:
            return
        for v in span_iter([b.value for b in self.nullspace_basis]):
            yield BitWord(self.nvars, v ^ self.particular.value)


def _eliminate(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    """Gauss-Jordan elimination in place on a list of bitsets."""
    pivots: list[int] = []
    top = 0
    nrows = len(rows)
    for col in range(ncols):
        if top == nrows:
            break
        bit = 1 << col
        piv = None
        for i in range(top, nrows):
            if rows[i] & bit:
                piv = i
                break
        if piv is None:
            continue
        rows[top], rows[piv] = rows[piv], rows[top]
        p = rows[top]
        for i in range(nrows):
            if i != top and rows[i] & bit:
                rows[i] ^= p
        pivots.append(col)
        top += 1
    return rows, pivots


def rank(M: Gf2Matrix) -> int:
    # forward elimination only, pivoting on each row's lowest set bit
    basis: dict[int, int] = {}
    for r in M.rows:
        while r:
            low = r & -r
            b = basis.get(low)
            if b is None:
                basis[low] = r
                break
            r ^= b
    return len(basis)


def rref(M: Gf2Matrix) -> tuple[Gf2Matrix, list[int]]:
    """Reduced row-echelon form; zero rows are dropped from the bottom."""
    rows, pivots = _eliminate(list(M.rows), M.ncols)
    rows = rows[: len(pivots)] + [0] * (M.nrows - len(pivots))
    return Gf2Matrix(tuple(rows), M.ncols), pivots


def solve_affine(A: Gf2Matrix, b: BitWord) -> AffineSolutionSet:
    """All ``x`` with ``A x = b`` (``x`` indexes the columns of ``A``)."""
    if b.length != A.nrows:
        raise ValueError(f"rhs has length {b.length}, matrix has {A.nrows} rows")
    n = A.ncols
    aug = [row | (((b.value >> i) & 1) << n) for i, row in enumerate(A.rows)]
    rows, pivots = _eliminate(aug, n + 1)
    if pivots and pivots[-1] == n:
        return AffineSolutionSet(False, n, None, ())
    mask = (1 << n) - 1
    particular = 0
    for row, col in zip(rows, pivots):
        if row >> n & 1:
            particular |= 1 << col
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = 1 << free
        for row, col in zip(rows, pivots):
            if (row & mask) >> free & 1:
                v |= 1 << col
        basis.append(BitWord(n, v))
    return AffineSolutionSet(True, n, BitWord(n, particular), tuple(basis))


def restrict_columns(M: Gf2Matrix, cols: Sequence[int]) -> Gf2Matrix:
    """Submatrix ``M[:, cols]`` with columns in the given order."""
    idx = np.asarray(list(cols), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= M.ncols):
        raise IndexError("column index out of range")
    if M.nrows == 0:
        return Gf2Matrix((), int(idx.size))
    return Gf2Matrix.from_numpy(M.to_numpy()[:, idx].reshape(M.nrows, idx.size))


def span_iter(rows: Sequence[int]) -> Iterator[int]:
    """Every XOR-combination of ``rows`` (Gray-code order, one XOR per step)."""
    acc = 0
    yield acc
    for k in range(1, 1 << len(rows)):
        acc ^= rows[(k & -k).bit_length() - 1]
        yield acc
