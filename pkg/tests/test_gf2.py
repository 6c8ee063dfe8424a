import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmrll.gf2 import BitWord, Gf2Matrix, rank, restrict_columns, rref, solve_affine, span_iter
from rmrll.rmcode import build, information_set


@st.composite
def matrices(draw, max_rows=6, max_cols=10):
    nrows = draw(st.integers(0, max_rows))
    ncols = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.integers(0, (1 << ncols) - 1), min_size=nrows, max_size=nrows))
    return Gf2Matrix(tuple(rows), ncols)


def test_bitword_printing_and_indexing():
    w = BitWord.from_str("0101")
    assert str(w) == "0101"
    assert w[1] == 1 and w[0] == 0
    assert w.weight() == 2
    assert w.support() == [1, 3]
    assert list(w) == [0, 1, 0, 1]
    with pytest.raises(IndexError):
        w[4]


def test_bitword_ops():
    a, b = BitWord.from_str("1100"), BitWord.from_str("1010")
    assert str(a ^ b) == "0110"
    assert str(a & b) == "1000"
    assert str(a | b) == "1110"
    assert a.dot(b) == 1
    assert str(a.concat(b)) == "11001010"
    assert str(a.concat(b).slice(2, 6)) == "0010"
    with pytest.raises(ValueError):
        a ^ BitWord.from_str("1")


def test_bitword_rejects_bad_input():
    with pytest.raises(ValueError):
        BitWord(2, 4)
    with pytest.raises(ValueError):
        BitWord.from_str("012")


def test_rank_examples():
    assert rank(Gf2Matrix.identity(3)) == 3
    assert rank(Gf2Matrix.zeros(4, 6)) == 0
    # tree code from the factor-graph example: x1+x2, x2+x3+x4, x4+x5
    H = Gf2Matrix.from_strings(["11000", "01110", "00011"])
    assert rank(H) == 3


def test_rref_identity():
    M, piv = rref(Gf2Matrix.identity(5))
    assert M == Gf2Matrix.identity(5)
    assert piv == [0, 1, 2, 3, 4]


@given(matrices())
def test_rref_properties(M):
    R, piv = rref(M)
    assert len(piv) == rank(M) == rank(R)
    assert piv == sorted(set(piv))
    assert rref(R)[0] == R
    # same row space: stacking does not increase the rank
    assert rank(M.stack(R)) == rank(M)


def test_solve_affine_examples():
    s = solve_affine(Gf2Matrix.from_strings(["11"]), BitWord(1, 0))
    assert s.feasible and s.count == 2
    s = solve_affine(Gf2Matrix((0,), 3), BitWord(1, 1))
    assert not s.feasible and s.count == 0 and s.log2_count == float("-inf")
    A = Gf2Matrix.from_strings(["110", "011", "001"])
    for b in range(8):
        assert solve_affine(A, BitWord(3, b)).count == 1
    with pytest.raises(ValueError):
        solve_affine(A, BitWord(2, 0))


@given(matrices(max_rows=6, max_cols=10), st.integers(0, 63))
def test_solve_affine_matches_enumeration(A, bval):
    b = BitWord(A.nrows, bval & ((1 << A.nrows) - 1))
    sol = solve_affine(A, b)
    brute = []
    for x in range(1 << A.ncols):
        ok = all(((row & x).bit_count() & 1) == b[i] for i, row in enumerate(A.rows))
        if ok:
            brute.append(x)
    assert sol.count == len(brute)
    assert sorted(v.value for v in sol) == brute
    aug = Gf2Matrix(tuple(r | (b[i] << A.ncols) for i, r in enumerate(A.rows)), A.ncols + 1)
    assert sol.feasible == (rank(A) == rank(aug))


def test_restrict_columns():
    M = Gf2Matrix.from_strings(["1011", "0110"])
    assert restrict_columns(M, range(4)) == M
    assert restrict_columns(Gf2Matrix.identity(3), [0, 2]) == Gf2Matrix.from_strings(["10", "00", "01"])
    assert rank(restrict_columns(build(3, 1).generator, information_set(3, 1))) == 4
    with pytest.raises(IndexError):
        restrict_columns(M, [4])


@given(st.lists(st.integers(0, 255), min_size=1, max_size=5), st.integers(0, 31), st.integers(0, 31))
def test_vecmul_is_linear(rows, a, b):
    M = Gf2Matrix(tuple(rows), 8)
    mask = (1 << len(rows)) - 1
    a, b = a & mask, b & mask
    assert M.vecmul(a ^ b) == M.vecmul(a) ^ M.vecmul(b)


def test_span_iter_covers_span():
    rows = [0b0011, 0b0101, 0b1000]
    span = list(span_iter(rows))
    expected = {r1 ^ r2 ^ r3 for r1, r2, r3 in itertools.product(*[(0, r) for r in rows])}
    assert len(span) == 8 and set(span) == expected


def test_numpy_round_trip():
    arr = np.array([[1, 0, 1, 1, 0, 0, 0, 0, 1], [0, 1, 1, 0, 0, 0, 0, 0, 0]], dtype=np.uint8)
    M = Gf2Matrix.from_numpy(arr)
    assert (M.to_numpy() == arr).all()
    assert (M.transpose().to_numpy() == arr.T).all()
