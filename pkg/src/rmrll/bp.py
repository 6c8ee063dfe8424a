"""Sum-product on the Tanner graph of RM(m-1, r-1) with extrinsic unary factors.

For g in RM(m-1, r) the graph encodes e^{beta * gt . ht} * 1{h in RM(m-1, r-1)},
where gt is g with ones forced on its zero-run ends and ht flips h on those same
positions.  Messages are kept as log-likelihood ratios log(nu(0)/nu(1)); this
is the same information as normalized message pairs and stays finite at
beta = 40 where probabilities saturate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import rll
from .gf2 import BitWord, span_iter
from .rmcode import MAX_EXHAUSTIVE_DIM, binom_le, build
from .subcodes import sample_codewords

LLR_CLIP = 500.0
LOG2E = math.log2(math.e)


def _phi(x: np.ndarray) -> np.ndarray:
    """phi(x) = -log tanh(x/2); an involution on [0, inf]."""
    with np.errstate(divide="ignore", over="ignore"):
        return np.log1p(2.0 / np.expm1(x))


def _log_sigmoid(x):
    """log nu(0) for the LLR x."""
    return -np.logaddexp(0.0, -np.asarray(x, dtype=np.float64))


@dataclass(frozen=True)
class FactorGraph:
    """Variables 0..n-1, parity factors given by neighbour lists, one unary factor per variable.

    ``ext_log[i] = (log f_i(0), log f_i(1))``.
    """

    n: int
    checks: tuple[np.ndarray, ...]
    ext_log: np.ndarray
    g: BitWord | None = None
    g_tilde: BitWord | None = None
    gamma: BitWord | None = None
    beta: float = 0.0

    def __post_init__(self):
        if self.ext_log.shape != (self.n, 2):
            raise ValueError("ext_log must have shape (n, 2)")
        for nb in self.checks:
            if nb.size == 0 or nb.min() < 0 or nb.max() >= self.n:
                raise ValueError("check neighbourhood out of range or empty")

    @property
    def ext_llr(self) -> np.ndarray:
        return self.ext_log[:, 0] - self.ext_log[:, 1]

    @property
    def edge_var(self) -> np.ndarray:
        return np.concatenate(self.checks) if self.checks else np.zeros(0, dtype=np.int64)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum([nb.size for nb in self.checks])]).astype(np.int64)

    @cached_property
    def degree_groups(self) -> tuple[np.ndarray, ...]:
        """Edge indices of the checks, stacked into one (checks, degree) array per degree."""
        off = self.offsets
        by_deg: dict[int, list[np.ndarray]] = {}
        for a, nb in enumerate(self.checks):
            by_deg.setdefault(nb.size, []).append(np.arange(off[a], off[a + 1]))
        return tuple(np.stack(rows) for rows in by_deg.values())

    @classmethod
    def from_checks(cls, n: int, checks, ext_log=None) -> "FactorGraph":
        arrs = tuple(np.asarray(sorted(set(c)), dtype=np.int64) for c in checks)
        ext = np.zeros((n, 2)) if ext_log is None else np.asarray(ext_log, dtype=np.float64)
        return cls(n, arrs, ext)


def g_tilde(g: BitWord) -> tuple[BitWord, BitWord]:
    """(gt, gamma mask): gt is g with ones added at the zero-run ends of g."""
    gam = rll.gamma_mask(g.value, g.length)
    return BitWord(g.length, g.value | gam), BitWord(g.length, gam)


def build_graph(m: int, r: int, g: BitWord, beta: float) -> FactorGraph:
    if not 1 <= r <= m - 1:
        raise ValueError("need 1 <= r <= m - 1")
    n = 1 << (m - 1)
    if g.length != n:
        raise ValueError(f"g must have length {n}")
    if not beta > 0:
        raise ValueError("beta must be positive")
    H = build(m - 1, m - r - 1).generator
    checks = tuple(BitWord(n, row).to_numpy().nonzero()[0].astype(np.int64) for row in H.rows)
    gt, gam = g_tilde(g)
    gt_bits = gt.to_numpy().astype(np.float64)
    in_gamma = gam.to_numpy().astype(bool)
    ext = np.zeros((n, 2))
    # f_i(x) = e^{beta gt_i (1 xor x)} on gamma, e^{beta gt_i x} elsewhere
    ext[in_gamma, 0] = beta * gt_bits[in_gamma]
    ext[~in_gamma, 1] = beta * gt_bits[~in_gamma]
    return FactorGraph(n, checks, ext, g, gt, gam, float(beta))


@dataclass
class MessageSet:
    """LLR messages on the parity edges, flat in the order of ``graph.checks``."""

    var_to_check: np.ndarray
    check_to_var: np.ndarray

    def copy(self) -> "MessageSet":
        return MessageSet(self.var_to_check.copy(), self.check_to_var.copy())

    def var_probs(self) -> np.ndarray:
        """nu_{i->a}(0) on each edge."""
        return np.exp(_log_sigmoid(self.var_to_check))

    def check_probs(self) -> np.ndarray:
        return np.exp(_log_sigmoid(self.check_to_var))


def uniform_messages(graph: FactorGraph) -> MessageSet:
    E = int(graph.offsets[-1])
    return MessageSet(np.zeros(E), np.zeros(E))


def check_update_rows(llrs: np.ndarray) -> np.ndarray:
    """Leave-one-out parity messages (tanh rule in phi form), one check per row."""
    mags = _phi(np.abs(llrs))
    zero = np.zeros((mags.shape[0], 1))
    # prefix/suffix sums avoid subtracting a large own term from the total
    prefix = np.concatenate([zero, np.cumsum(mags[:, :-1], axis=1)], axis=1)
    suffix = np.concatenate([np.cumsum(mags[:, :0:-1], axis=1)[:, ::-1], zero], axis=1)
    signs = np.where(llrs < 0, -1.0, 1.0)
    out_sign = np.prod(signs, axis=1, keepdims=True) * signs
    return np.clip(out_sign * _phi(prefix + suffix), -LLR_CLIP, LLR_CLIP)


def check_update(llrs: np.ndarray) -> np.ndarray:
    return check_update_rows(np.asarray(llrs, dtype=np.float64)[None, :])[0]


def spa_step(graph: FactorGraph, msgs: MessageSet, damping: float = 0.0) -> MessageSet:
    """One parallel round: all check-to-variable messages, then all variable-to-check."""
    new_c2v = np.empty_like(msgs.check_to_var)
    for idx in graph.degree_groups:
        new_c2v[idx] = check_update_rows(msgs.var_to_check[idx])
    if damping:
        new_c2v = (1 - damping) * new_c2v + damping * msgs.check_to_var
    ev = graph.edge_var
    total = graph.ext_llr + np.bincount(ev, weights=new_c2v, minlength=graph.n)
    new_v2c = np.clip(total[ev] - new_c2v, -LLR_CLIP, LLR_CLIP)
    return MessageSet(new_v2c, new_c2v)


@dataclass
class SpaResult:
    messages: MessageSet
    converged: bool
    iterations: int
    last_change: float


def _prob_change(a: MessageSet, b: MessageSet) -> float:
    if a.var_to_check.size == 0:
        return 0.0
    d1 = np.abs(a.var_probs() - b.var_probs()).max()
    d2 = np.abs(a.check_probs() - b.check_probs()).max()
    return float(max(d1, d2))


def run_spa(graph: FactorGraph, iters: int = 100, tol: float = 1e-9, init: MessageSet | None = None, damping: float = 0.0) -> SpaResult:
    """Iterate until the largest message change (in probability) drops below tol."""
    if iters < 1:
        raise ValueError("iters must be >= 1")
    msgs = uniform_messages(graph) if init is None else init.copy()
    change = math.inf
    for t in range(1, iters + 1):
        new = spa_step(graph, msgs, damping)
        change = _prob_change(new, msgs)
        msgs = new
        if change < tol:
            return SpaResult(msgs, True, t, change)
    return SpaResult(msgs, False, iters, change)


def fixed_point_messages(graph: FactorGraph) -> MessageSet:
    """The candidate fixed point: uniform check messages, variable messages equal to the unary LLR."""
    E = int(graph.offsets[-1])
    return MessageSet(graph.ext_llr[graph.edge_var].copy(), np.zeros(E))


def fixed_point_residual(graph: FactorGraph, msgs: MessageSet | None = None) -> float:
    msgs = fixed_point_messages(graph) if msgs is None else msgs
    return _prob_change(spa_step(graph, msgs), msgs)


def fixed_point_distance(graph: FactorGraph, msgs: MessageSet) -> float:
    """Largest probability gap between ``msgs`` and the candidate fixed point."""
    return _prob_change(msgs, fixed_point_messages(graph))


def fixed_point_condition(graph: FactorGraph) -> bool:
    """Every check sees at least two neighbours whose unary factor is flat."""
    flat = graph.ext_log[:, 0] == graph.ext_log[:, 1]
    return all(int(flat[nb].sum()) >= 2 for nb in graph.checks)


def z_bp(graph: FactorGraph, msgs: MessageSet) -> float:
    """log2 of the BP partition estimate assembled from node, factor and edge terms."""
    off = graph.offsets
    ev = graph.edge_var
    lam, lamh = msgs.var_to_check, msgs.check_to_var
    ext = graph.ext_llr
    f0, f1 = graph.ext_log[:, 0], graph.ext_log[:, 1]
    mu = np.bincount(ev, weights=lamh, minlength=graph.n)  # variable -> unary factor
    # variable nodes
    s0 = np.bincount(ev, weights=_log_sigmoid(lamh), minlength=graph.n)
    s1 = np.bincount(ev, weights=_log_sigmoid(-lamh), minlength=graph.n)
    log_zi = np.logaddexp(_log_sigmoid(ext) + s0, _log_sigmoid(-ext) + s1).sum()
    # unary factors and their edges
    log_zf = np.logaddexp(f0 + _log_sigmoid(mu), f1 + _log_sigmoid(-mu)).sum()
    log_zif = np.logaddexp(_log_sigmoid(mu) + _log_sigmoid(ext), _log_sigmoid(-mu) + _log_sigmoid(-ext)).sum()
    # parity factors: Z_a = (1 + prod tanh(lam/2)) / 2
    log_za = 0.0
    for a in range(len(graph.checks)):
        l = lam[off[a] : off[a + 1]]
        S = float(_phi(np.abs(l)).sum())
        negative = int((l < 0).sum()) % 2 == 1
        if negative:
            log_za += -math.inf if S == 0 else math.log(-math.expm1(-S)) - math.log(2)
        else:
            log_za += math.log1p(math.exp(-S)) - math.log(2)
    log_zia = np.logaddexp(_log_sigmoid(lam) + _log_sigmoid(lamh), _log_sigmoid(-lam) + _log_sigmoid(-lamh)).sum()
    return float((log_za + log_zi + log_zf - log_zif - log_zia) * LOG2E)


def exact_log2_partition(graph: FactorGraph) -> float:
    """Brute-force log2 sum over all x satisfying every check, weighted by the unary factors."""
    n = graph.n
    if n > 22:
        raise ValueError("too many variables for brute force")
    xs = ((np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int64)
    ok = np.ones(1 << n, dtype=bool)
    for nb in graph.checks:
        ok &= xs[:, nb].sum(axis=1) % 2 == 0
    w = np.where(xs == 1, graph.ext_log[:, 1], graph.ext_log[:, 0]).sum(axis=1)[ok]
    if w.size == 0:
        return -math.inf
    top = w.max()
    return float((top + math.log(np.exp(w - top).sum())) * LOG2E)


@dataclass(frozen=True)
class ExactZ:
    log2_z: float
    log2_zhat: float


def exact_z(m: int, r: int, g: BitWord, beta: float) -> ExactZ:
    """Sum over h in RM(m-1, r-1) of exp(-beta * wt(gt & ~ht))."""
    hcode = build(m - 1, r - 1)
    if hcode.K > 20:
        raise ValueError("dimension too large for exhaustive partition sum")
    gt, gam = g_tilde(g)
    counts: dict[int, int] = {}
    for h in span_iter(hcode.generator.rows):
        s = (gt.value & (h ^ gam.value)).bit_count()
        counts[s] = counts.get(s, 0) + 1
    # log Zhat = log sum_s count(s) e^{beta s}
    terms = np.array([math.log(c) + beta * s for s, c in counts.items()])
    top = terms.max()
    log_zhat = top + math.log(np.exp(terms - top).sum())
    log_z = log_zhat - beta * gt.weight()
    return ExactZ(log_z * LOG2E, log_zhat * LOG2E)


def statphy_rhs(m: int, r: int, beta: float, wt_gt: int) -> float:
    """2^{m-1} R_h + (beta log2 e - 1) wt(gt), with R_h the rate of RM(m-1, r-1)."""
    return binom_le(m - 1, r - 1) + (beta * LOG2E - 1) * wt_gt


@dataclass(frozen=True)
class BpSample:
    wt_gt: int
    log2_zhat: float
    converged: bool
    iterations: int
    residual: float
    fp_distance: float

    def log2_z(self, beta: float) -> float:
        return self.log2_zhat - beta * LOG2E * self.wt_gt


@dataclass(frozen=True)
class BpEstimate:
    rate: float
    stderr: float
    samples: tuple[BpSample, ...]
    K_g: int
    m: int


def bp_sample(m: int, r: int, g: BitWord, beta: float, iters: int = 100, tol: float = 1e-9, damping: float = 0.0) -> BpSample:
    graph = build_graph(m, r, g, beta)
    res = run_spa(graph, iters, tol, damping=damping)
    return BpSample(
        graph.g_tilde.weight(),
        z_bp(graph, res.messages),
        res.converged,
        res.iterations,
        fixed_point_residual(graph, res.messages),
        fixed_point_distance(graph, res.messages),
    )


def bp_rate_estimate(m: int, r: int, beta: float, samples: int, rng, iters: int = 100, tol: float = 1e-9, damping: float = 0.0) -> BpEstimate:
    """K_g/2^m + mean over uniform g in RM(m-1, r) of log2 Z_g^BP / 2^m."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    gcode = build(m - 1, r)
    words = sample_codewords(gcode, samples, rng)
    out = tuple(bp_sample(m, r, BitWord.from_bits(w), beta, iters, tol, damping) for w in words)
    vals = np.array([s.log2_z(beta) for s in out])
    N = 1 << m
    se = float(vals.std(ddof=1) / math.sqrt(samples)) / N if samples > 1 else 0.0
    return BpEstimate(gcode.K / N + float(vals.mean()) / N, se, out, gcode.K, m)
