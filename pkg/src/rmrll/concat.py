"""Two-stage (d, inf)-RLL concatenated scheme built on a systematic RM code.

Outer stage: an RLL word w of length K (enumerative coding) is encoded with
a systematic generator of RM(m, r), so the first K symbols of the codeword
are w itself.  Inner stage: the N - K parity bits are cut into L parts and
each part is re-encoded with the linear (d, inf) subcode at blocklength
2**n_star.  Decoding over the BEC runs the inner erasure decoders first (D1)
and then the outer decoder on the systematic symbols plus recovered parity
(D2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import rll
from .channelsim import BEC, InconsistentErasureError, bec_bitmap_decode, hard_bits, transmit
from .gf2 import BitWord, Gf2Matrix, rref
from .rmcode import binom_le, build, r_of_rate
from .subcodes import SubcodeSpec, c0, linear_subcode, z_of


@dataclass(frozen=True)
class SystematicRm:
    m: int
    r: int
    perm: tuple[int, ...]
    generator: Gf2Matrix  # first K columns form the identity

    @property
    def K(self) -> int:
        return self.generator.nrows

    @property
    def N(self) -> int:
        return self.generator.ncols


@lru_cache(maxsize=32)
def systematic_form(m: int, r: int) -> SystematicRm:
    """Column permutation putting the weight-<=r coordinates first, then row reduction."""
    code = build(m, r)
    perm = tuple(sorted(range(code.N), key=lambda i: (i.bit_count(), i)))
    G, pivots = rref(code.generator.permute_columns(perm))
    if pivots != list(range(code.K)):
        raise RuntimeError("leading coordinates are not an information set")
    return SystematicRm(m, r, perm, G)


@dataclass(frozen=True)
class ConcatParams:
    m: int
    r: int
    d: int
    z: int
    tau: int
    epsilon: float
    K: int
    N: int
    n_star: int
    L: int
    part_len: int  # parity bits carried per part (the last part may be zero-padded)
    inner: SubcodeSpec

    @property
    def N_part(self) -> int:
        return 1 << self.n_star

    @property
    def k_inner(self) -> int:
        return self.inner.dimension

    @property
    def N_tot(self) -> int:
        return self.K + self.L * self.N_part

    @property
    def padding(self) -> int:
        return self.L * self.part_len - (self.N - self.K)


def select_params(
    m: int,
    R: float | None = None,
    d: int = 1,
    epsilon: float = 0.05,
    tau: int = 4,
    *,
    r: int | None = None,
    inner_r: int | None = None,
) -> ConcatParams:
    """Finite-m parameter choice; give either the target rate R or the order r.

    L is the least integer with L / 2^tau >= (N - K) / (K (1 - epsilon)) that
    also lets each part fit the inner subcode.  The inner order defaults to
    min(r, n_star).
    """
    if (R is None) == (r is None):
        raise ValueError("give exactly one of R and r")
    if r is None:
        r = r_of_rate(m, R)
    if not 0 <= r <= m:
        raise ValueError(f"need 0 <= r <= m, got r={r}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if d < 1:
        raise ValueError("d must be >= 1")
    z = z_of(d)
    K, N = binom_le(m, r), 1 << m
    if K == N:
        raise ValueError("RM(m, m) has no parity bits to encode")
    n_star = m - tau + z
    if n_star < z:
        raise ValueError(f"n_star = m - tau + z = {n_star} is below z = {z}; lower tau")
    if inner_r is None:
        inner_r = min(r, n_star)
    if not z <= inner_r <= n_star:
        raise ValueError(f"inner order {inner_r} must lie in [z={z}, n_star={n_star}]")
    inner = linear_subcode(n_star, inner_r, d)
    parity = N - K
    L = max(math.ceil((1 << tau) * parity / (K * (1 - epsilon)) - 1e-12), math.ceil(parity / inner.dimension))
    part_len = math.ceil(parity / L)
    return ConcatParams(m, r, d, z, tau, epsilon, K, N, n_star, L, part_len, inner)


def message_count(params: ConcatParams) -> int:
    return rll.count_sequences(params.K, params.d)


def encode(params: ConcatParams, message_rank: int) -> BitWord:
    """x = w || x_{2,1} ... x_{2,L} for the message of the given rank."""
    if not 0 <= message_rank < message_count(params):
        raise ValueError("message rank out of range")
    sysrm = systematic_form(params.m, params.r)
    w = rll.enum_encode(message_rank, params.K, params.d)
    c = sysrm.generator.vecmul(w)
    parity = c >> params.K  # length N - K, zero-padded above
    x = w.value
    shift = params.K
    part_mask = (1 << params.part_len) - 1
    G_in = params.inner.generator
    for i in range(params.L):
        part = (parity >> (i * params.part_len)) & part_mask
        x |= G_in.vecmul(part) << shift
        shift += params.N_part
    return BitWord(params.N_tot, x)


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of the two-stage decoder; ``rank`` is None on failure."""

    rank: int | None
    stage: str  # "ok", "D1" (some part undecided, D2 still failed) or "D2"
    parts_failed: int
    w_bits: np.ndarray  # per-bit {0, 1, -1}
    parity_bits: np.ndarray

    @property
    def success(self) -> bool:
        return self.rank is not None


def decode(params: ConcatParams, y, ch: BEC | None = None) -> DecodeResult:
    """Two-stage erasure decoding; failures are reported, not raised."""
    if ch is not None and not isinstance(ch, BEC):
        raise ValueError("two-stage decoding is implemented for the BEC only")
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (params.N_tot,):
        raise ValueError(f"received length {y.size} != N_tot = {params.N_tot}")
    K, P, Np = params.K, params.part_len, params.N_part
    parity_len = params.N - K
    parity = np.full(params.L * P, -1, dtype=np.int8)
    parts_failed = 0
    # D1: inner erasure decoding, one part at a time
    for i in range(params.L):
        block = y[K + i * Np : K + (i + 1) * Np]
        try:
            res = bec_bitmap_decode(params.inner.generator, block)
        except InconsistentErasureError:
            parts_failed += 1
            continue
        bits = res.message[:P]
        if (bits < 0).any():
            parts_failed += 1
        parity[i * P : (i + 1) * P] = bits
    parity = parity[:parity_len]
    # D2: outer systematic code on y[0:K] plus recovered parity (undecided = erased)
    sign = np.where(parity < 0, 0.0, 1.0 - 2.0 * np.clip(parity, 0, 1))
    y_outer = np.concatenate([y[:K], sign])
    G = systematic_form(params.m, params.r).generator
    try:
        res = bec_bitmap_decode(G, y_outer)
    except InconsistentErasureError:
        return DecodeResult(None, "D2", parts_failed, np.full(K, -1, np.int8), parity)
    w_bits = res.message
    if (w_bits < 0).any():
        return DecodeResult(None, "D1" if parts_failed else "D2", parts_failed, w_bits, parity)
    w = BitWord.from_bits(w_bits)
    if not rll.is_valid(w, params.d):
        return DecodeResult(None, "D2", parts_failed, w_bits, parity)
    return DecodeResult(rll.enum_decode(w, params.d), "ok", parts_failed, w_bits, parity)


def achieved_rate(params: ConcatParams) -> float:
    """log2 a(K) / N_tot with a(K) the number of (d, inf)-valid K-tuples."""
    return rll.log2_count_sequences(params.K, params.d) / params.N_tot


def finite_rate_bound(params: ConcatParams) -> float:
    """C0 (K/N) / (K/N + 2^z ((N-K)/(K(1-eps)) + 2^-tau)): the finite-m rate guarantee."""
    rk = params.K / params.N
    slack = (params.N - params.K) / (params.K * (1 - params.epsilon)) + 2.0 ** (-params.tau)
    return c0(params.d) * rk / (rk + (1 << params.z) * slack)


def random_rank(params: ConcatParams, rng) -> int:
    """Uniform message rank by rejection sampling on random bits."""
    total = message_count(params)
    nbits = (total - 1).bit_length()
    nbytes = (nbits + 7) // 8
    while True:
        v = int.from_bytes(rng.bytes(nbytes), "little") & ((1 << nbits) - 1) if nbits else 0
        if v < total:
            return v


@dataclass(frozen=True)
class SimulationSummary:
    trials: int
    parts_total: int
    parts_failed: int
    d1_success: int  # trials with every part decoded
    d2_failed_given_d1: int
    success: int
    wrong_decided_bits: int
    valid_inputs: int

    @property
    def eta_hat(self) -> float:
        return self.parts_failed / self.parts_total

    @property
    def delta_hat(self) -> float:
        return self.d2_failed_given_d1 / self.d1_success if self.d1_success else math.nan

    @property
    def success_rate(self) -> float:
        return self.success / self.trials

    @property
    def failure_rate(self) -> float:
        return 1 - self.success_rate

    def chain_bound(self, L: int) -> float:
        """(1 - L eta)(1 - delta) from the measured stage failure rates."""
        delta = 0.0 if math.isnan(self.delta_hat) else self.delta_hat
        return (1 - L * self.eta_hat) * (1 - delta)


def simulate_bec(params: ConcatParams, epsilon: float, trials: int, seed: int) -> SimulationSummary:
    """Monte-Carlo over random messages and erasures; trial i uses default_rng([seed, i])."""
    ch = BEC(epsilon)
    parts_failed = d1_ok = d2_fail = success = wrong = valid = 0
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        rank = random_rank(params, rng)
        x = encode(params, rank)
        valid += rll.is_valid(x, params.d)
        y = transmit(x, ch, rng)
        res = decode(params, y, ch)
        w_true = x.slice(0, params.K).to_numpy()
        decided = res.w_bits >= 0
        wrong += int((res.w_bits[decided] != w_true[decided]).sum())
        c_true = BitWord(params.N, systematic_form(params.m, params.r).generator.vecmul(x.slice(0, params.K)))
        p_true = c_true.to_numpy()[params.K :]
        pd = res.parity_bits >= 0
        wrong += int((res.parity_bits[pd] != p_true[pd]).sum())
        parts_failed += res.parts_failed
        if res.parts_failed == 0:
            d1_ok += 1
            if not res.success:
                d2_fail += 1
        if res.success:
            success += 1
            if res.rank != rank:
                wrong += 1
    return SimulationSummary(trials, trials * params.L, parts_failed, d1_ok, d2_fail, success, wrong, valid)


@dataclass(frozen=True)
class UncodedSummary:
    trials: int
    bits: int
    hard_errors: int
    valid_inputs: int

    @property
    def raw_error_rate(self) -> float:
        return self.hard_errors / self.bits


def simulate_uncoded(params: ConcatParams, ch, trials: int, seed: int) -> UncodedSummary:
    """Encoder plus channel only: hard-decision symbol error rate (no decoding)."""
    errors = valid = 0
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        x = encode(params, random_rank(params, rng))
        valid += rll.is_valid(x, params.d)
        y = transmit(x, ch, rng)
        errors += int((hard_bits(y) != x.to_numpy()).sum())
    return UncodedSummary(trials, trials * params.N_tot, errors, valid)
