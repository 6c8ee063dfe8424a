"""Constrained subcodes of RM codes: constructions, counts and rate bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import rll
from .gf2 import BitWord, Gf2Matrix, restrict_columns, solve_affine, span_iter
from .rmcode import (
    MAX_EXHAUSTIVE_DIM,
    CoordinateOrdering,
    RmCode,
    binom_le,
    build,
    disjoint_tuple_count,
    eval_monomial,
    gray_permutation,
    information_set,
    monomials,
    r_of_rate,
)


def z_of(d: int) -> int:
    """ceil(log2(d + 1))."""
    if d < 0:
        raise ValueError("d must be non-negative")
    return (d).bit_length()


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@dataclass(frozen=True)
class SubcodeSpec:
    m: int
    r: int
    d: int
    z: int
    generator: Gf2Matrix

    @property
    def dimension(self) -> int:
        return self.generator.nrows

    @property
    def rate(self) -> float:
        return self.dimension / (1 << self.m)


def linear_subcode(m: int, r: int, d: int) -> SubcodeSpec:
    """Span of Eval(x_{m-z+1} ... x_m * mono) over monomials in x_1..x_{m-z} of degree <= r - z."""
    z = z_of(d)
    if r < z:
        raise ValueError(f"order r={r} is below z={z} for d={d}")
    if m < z:
        raise ValueError("m must be at least z")
    tail = tuple(range(m - z + 1, m + 1))
    rows = [eval_monomial(S + tail, m).value for S in monomials(m - z, r - z)]
    return SubcodeSpec(m, r, d, z, Gf2Matrix(tuple(rows), 1 << m))


def check_c1_c2(g: BitWord, h: BitWord) -> bool:
    """supp(g) within supp(h), and h vanishes on the zero-run ends of g."""
    if g.length != h.length:
        raise ValueError("g and h must have equal length")
    if (g.value & ~h.value) != 0:
        return False
    return (h.value & rll.gamma_mask(g.value, g.length)) == 0


def h_solution_set(m: int, r: int, g: BitWord, h_code: RmCode | None = None):
    """Affine set of messages of RM(m-1, r-1) whose codeword h meets (C1) and (C2)."""
    n = 1 << (m - 1)
    if g.length != n:
        raise ValueError(f"g must have length {n}")
    if r < 1:
        raise ValueError("r must be >= 1")
    if h_code is None:
        h_code = build(m - 1, r - 1)
    ones = g.support()
    zeros = rll.gamma_set(g)
    cols = ones + zeros
    A = restrict_columns(h_code.generator, cols).transpose() if cols else Gf2Matrix((), h_code.K)
    b = BitWord(len(cols), (1 << len(ones)) - 1)
    return solve_affine(A, b)


def count_h_given_g(m: int, r: int, g: BitWord, h_code: RmCode | None = None) -> int:
    """Number of h in RM(m-1, r-1) with (g, h) satisfying (C1) and (C2)."""
    sol = h_solution_set(m, r, g, h_code)
    return (1 << len(sol.nullspace_basis)) if sol.feasible else 0


def exact_constrained_count(m: int, r: int, d: int) -> int:
    """Number of (d, inf)-valid codewords of RM(m, r), by enumeration."""
    K = binom_le(m, r)
    if K > MAX_EXHAUSTIVE_DIM:
        raise ValueError(f"dimension {K} exceeds the exhaustive cap {MAX_EXHAUSTIVE_DIM}")
    rows = build(m, r).generator.rows
    return sum(1 for c in span_iter(rows) if rll.valid_int(c, d))


def sample_codewords(code: RmCode, samples: int, rng) -> np.ndarray:
    """Uniform codewords as a (samples, N) uint8 array."""
    G = code.generator.to_numpy().astype(np.float32)
    out = np.empty((samples, code.N), dtype=np.uint8)
    chunk = max(1, min(samples, 2_000_000 // max(code.N, 1)))
    for start in range(0, samples, chunk):
        stop = min(samples, start + chunk)
        msgs = rng.integers(0, 2, size=(stop - start, code.K)).astype(np.float32)
        out[start:stop] = (msgs @ G).astype(np.int64) % 2
    return out


def weight_and_tau0(words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row weights and numbers of zero-runs of a (rows, n) bit array."""
    wt = words.sum(axis=1, dtype=np.int64)
    tau = 1 + (words[:, 1:] != words[:, :-1]).sum(axis=1, dtype=np.int64)
    first = words[:, 0].astype(np.int64)
    last = words[:, -1].astype(np.int64)
    diff = np.where(first == last, first + last - 1, 0)
    return wt, (tau - diff) // 2


@dataclass(frozen=True)
class MCEstimate:
    rate: float
    stderr: float
    log2_mean: float
    log2_mean_stderr: float
    samples: int
    unclamped: float = field(default=float("nan"))


def _log2_mean_exp2(exps: np.ndarray) -> tuple[float, float]:
    """log2 of the sample mean of 2**exps, and its delta-method standard error."""
    top = float(exps.max())
    w = np.exp2(exps - top)
    mean = float(w.mean())
    n = exps.size
    sd = float(w.std(ddof=1)) if n > 1 else 0.0
    log2_mean = top + math.log2(mean)
    return log2_mean, sd / math.sqrt(n) / (mean * math.log(2))


def gh_rates(m: int, r: int) -> tuple[float, float]:
    """Rates of RM(m-1, r) and RM(m-1, r-1)."""
    n = 1 << (m - 1)
    return binom_le(m - 1, r) / n, binom_le(m - 1, r - 1) / n


def mc_lower_bound(m: int, r: int, samples: int, rng) -> MCEstimate:
    """Sample-average version of the log-expectation lower bound on the (1, inf) subcode rate."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    g_code = build(m - 1, r)
    words = sample_codewords(g_code, samples, rng)
    wt, tau0 = weight_and_tau0(words)
    log2_mean, se = _log2_mean_exp2(-(wt + tau0).astype(np.float64))
    rg, rh = gh_rates(m, r)
    raw = (rg + rh) / 2 + log2_mean / (1 << m)
    return MCEstimate(max(0.0, raw), se / (1 << m), log2_mean, se, samples, raw)


def exact_log2_mean(m: int, r: int) -> float:
    """Exhaustive log2 E[2^(-wt(g) - tau0(g))] over g in RM(m-1, r)."""
    g_code = build(m - 1, r)
    if g_code.K > MAX_EXHAUSTIVE_DIM:
        raise ValueError("dimension too large for exhaustive expectation")
    n = g_code.N
    hist: dict[int, int] = {}
    for c in span_iter(g_code.generator.rows):
        e = c.bit_count() + rll.run_stats_int(c, n).tau0
        hist[e] = hist.get(e, 0) + 1
    total = sum(Fraction(cnt, 2 ** e) for e, cnt in hist.items())
    mean = total / (1 << g_code.K)
    return math.log2(mean.numerator) - math.log2(mean.denominator)


def jensen_lower_bound(m: int, r: int) -> float:
    """(R_g + R_h)/2 - 3/8 - delta_m/2 with delta_m = 1/(4 * 2^(m-1)), clamped at 0."""
    if r < 1:
        raise ValueError("r must be >= 1")
    rg, rh = gh_rates(m, r)
    delta = 1 / (4 * (1 << (m - 1)))
    return max(0.0, (rg + rh) / 2 - 3 / 8 - delta / 2)


def run_expectation_check(code: RmCode, samples: int | None = None, rng=None):
    """Mean (tau, tau0, tau1) over the code; exact Fractions when enumerated."""
    n = code.N
    if code.K <= MAX_EXHAUSTIVE_DIM and samples is None:
        s0 = s1 = 0
        for c in span_iter(code.generator.rows):
            st = rll.run_stats_int(c, n)
            s0 += st.tau0
            s1 += st.tau1
        total = 1 << code.K
        return Fraction(s0 + s1, total), Fraction(s0, total), Fraction(s1, total)
    if rng is None:
        raise ValueError("sampling requires an rng")
    words = sample_codewords(code, samples or 10_000, rng)
    wt, tau0 = weight_and_tau0(words)
    tau = 1 + (words[:, 1:] != words[:, :-1]).sum(axis=1)
    return float(tau.mean()), float(tau0.mean()), float((tau - tau0).mean())


# ---- closed-form rate bounds -------------------------------------------------

_C0_CACHE: dict[int, float] = {}


def c0(d: int) -> float:
    if d not in _C0_CACHE:
        _C0_CACHE[d] = rll.noiseless_capacity(d)
    return _C0_CACHE[d]


def concat_lb(R: float, d: int, tau: int) -> float:
    zf = 2.0 ** (-z_of(d))
    num = c0(d) * R * R * zf
    return num / (R * R * zf + 1 - R + 2.0 ** (-tau))


BOUNDS: dict[str, Callable[..., float]] = {
    # asymptotic formulas; every entry takes (R, d, tau)
    "linear_lb": lambda R, d, tau: R * 2.0 ** (-z_of(d)),
    "nonlinear_lb": lambda R, d, tau: max(0.0, R - 3 / 8) if d == 1 else math.nan,
    "linear_ub": lambda R, d, tau: R / (d + 1),
    "gray_linear_ub": lambda R, d, tau: R / (d + 1),
    "general_ub_1inf": lambda R, d, tau: min(7 * R / 8, c0(1)) if d == 1 else math.nan,
    "concat_lb": lambda R, d, tau: concat_lb(R, d, tau),
    "coset_avg": lambda R, d, tau: max(0.0, c0(d) + R - 1),
}


def bound(name: str, R: float, d: int = 1, tau: int = 50) -> float:
    if name not in BOUNDS:
        raise KeyError(f"unknown bound {name!r}; choose from {sorted(BOUNDS)}")
    if not 0.0 < R < 1.0:
        raise ValueError("R must lie in (0, 1)")
    if d < 1:
        raise ValueError("d must be >= 1")
    if name == "concat_lb" and tau < 1:
        raise ValueError("tau must be >= 1")
    return BOUNDS[name](R, d, tau)


@dataclass(frozen=True)
class BoundTable:
    R: list[float]
    values: dict[str, list[float]]
    d: int
    tau: int

    def rows(self):
        names = list(self.values)
        for i, R in enumerate(self.R):
            yield R, {n: self.values[n][i] for n in names}


def bound_table(d: int, step: float = 0.01, tau: int = 50, names=None) -> BoundTable:
    if not 0.0 < step <= 0.5:
        raise ValueError("grid step must lie in (0, 0.5]")
    count = int(round(1 / step))
    grid = [round(i * step, 10) for i in range(1, count) if 0 < i * step < 1]
    if names is None:
        names = ["linear_lb", "nonlinear_lb", "linear_ub", "general_ub_1inf", "concat_lb", "coset_avg"]
        if d != 1:
            names = [n for n in names if n not in ("nonlinear_lb", "general_ub_1inf")]
    vals = {n: [bound(n, R, d, tau) for R in grid] for n in names}
    return BoundTable(grid, vals, d, tau)


def _as_callable(f, d: int, tau: int) -> Callable[[float], float]:
    if callable(f):
        return f
    return lambda R: bound(f, R, d, tau)


def crossover(bound_a, bound_b, d: int = 1, lo: float = 1e-6, hi: float = 1 - 1e-6, tau: int = 50, tol: float = 1e-9) -> float:
    """Root of bound_a - bound_b on [lo, hi] by bisection; bounds are names or callables."""
    fa, fb = _as_callable(bound_a, d, tau), _as_callable(bound_b, d, tau)
    diff = lambda x: fa(x) - fb(x)
    a, b = lo, hi
    da, db = diff(a), diff(b)
    if da == 0:
        return a
    if db == 0:
        return b
    if (da > 0) == (db > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while b - a > tol:
        mid = 0.5 * (a + b)
        dm = diff(mid)
        if dm == 0:
            return mid
        if (dm > 0) == (da > 0):
            a, da = mid, dm
        else:
            b = mid
    return 0.5 * (a + b)


def crossovers(bound_a, bound_b, d: int = 1, tau: int = 50, grid: int = 1000) -> list[float]:
    """All sign changes of bound_a - bound_b on (0, 1), each refined by bisection."""
    fa, fb = _as_callable(bound_a, d, tau), _as_callable(bound_b, d, tau)
    xs = np.linspace(1e-6, 1 - 1e-6, grid + 1)
    vals = [fa(x) - fb(x) for x in xs]
    roots = []
    for i in range(grid):
        if vals[i] == 0:
            roots.append(float(xs[i]))
        elif (vals[i] > 0) != (vals[i + 1] > 0) and vals[i + 1] != 0:
            roots.append(crossover(fa, fb, d, float(xs[i]), float(xs[i + 1])))
    return roots


def appendix_f(x: float) -> float:
    """h_b(2^-x) - 2^-(x+1)."""
    if x < 0:
        raise ValueError("x must be non-negative")
    return binary_entropy(2.0 ** (-x)) - 2.0 ** (-(x + 1))


# ---- finite-m quantities -----------------------------------------------------

def linear_subcode_rate(m: int, r: int, d: int) -> float:
    z = z_of(d)
    return binom_le(m - z, r - z) / (1 << m)


def linear_ub_finite(m: int, r: int, d: int, ordering: str = "lex") -> float:
    """(K - d t)/2^m with t the disjoint (d+1)-tuple count of the weight-<=r information set."""
    if ordering not in ("lex", "gray"):
        raise ValueError("ordering must be 'lex' or 'gray'")
    code_order = CoordinateOrdering.lex(m) if ordering == "lex" else gray_permutation(m)
    K = binom_le(m, r)
    t = disjoint_tuple_count(information_set(m, r), code_order, d)
    return (K - d * t) / (1 << m)


def finite_m_table(m: int, d: int = 1) -> list[dict]:
    """Exact finite-m rates for every order 1 <= r <= m-1.

    ``canonical`` marks orders that the rate-to-order rule maps back to
    themselves; the asymptotic bounds only speak about those.
    """
    out = []
    for r in range(1, m):
        rate = binom_le(m, r) / (1 << m)
        row = {
            "m": m,
            "r": r,
            "rate": rate,
            "canonical": r_of_rate(m, rate) == r,
            "linear_subcode": linear_subcode_rate(m, r, d) if r >= z_of(d) else math.nan,
            "linear_ub_lex": linear_ub_finite(m, r, d, "lex"),
            "linear_ub_gray": linear_ub_finite(m, r, d, "gray"),
        }
        if d == 1:
            row["jensen_lb"] = jensen_lower_bound(m, r)
        out.append(row)
    return out
