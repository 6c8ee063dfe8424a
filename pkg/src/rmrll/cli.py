"""Command-line experiment harness; every command writes CSV with '#' header lines."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, bp, channelsim, concat, rmcode, subcodes

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: str | None = None

    def header(self) -> list[str]:
        return [
            f"# rmrll {__version__}",
            f"# command: {self.command}",
            f"# config: {json.dumps(self.params, sort_keys=True)}",
        ]


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v)) if math.isfinite(v) else str(float(v))
    return str(v)


def render_csv(cfg: ExperimentConfig, columns: list[str], rows: list[list], footer: list[str] = ()) -> str:
    buf = io.StringIO()
    for line in cfg.header():
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def binomial_ci(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval."""
    if n == 0:
        return (0.0, 1.0)
    p = k / n
    den = 1 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return (max(0.0, mid - half), min(1.0, mid + half))


# ---- commands -------------------------------------------------------------------

def cmd_bounds(d: int = 1, grid: float = 0.01, tau: int = 50) -> tuple[list[str], list[list]]:
    if not 0.0 < grid <= 0.5:
        raise UsageError("grid step must lie in (0, 0.5]")
    if d < 1:
        raise UsageError("d must be >= 1")
    table = subcodes.bound_table(d, grid, tau)
    names = list(table.values)
    rows = [[R] + [vals[n] for n in names] for R, vals in table.rows()]
    return ["R"] + names, rows


def cmd_count(m: int, r: int, d: int) -> tuple[list[str], list[list]]:
    K = rmcode.binom_le(m, r)
    if not 0 <= r <= m:
        raise UsageError("need 0 <= r <= m")
    if K > rmcode.MAX_EXHAUSTIVE_DIM:
        raise ValueError(f"dimension {K} exceeds the exhaustive cap {rmcode.MAX_EXHAUSTIVE_DIM}")
    count = subcodes.exact_constrained_count(m, r, d)
    z = subcodes.z_of(d)
    lin_dim = subcodes.linear_subcode(m, r, d).dimension if r >= z else 0
    if r <= m - 1:
        gamma = len(rmcode.run_endpoints("lex", rmcode.information_set(m, r), m))
        run_law_ok = gamma == math.comb(m - 1, r)
    else:
        gamma, run_law_ok = 1, True
    cols = ["m", "r", "d", "K", "count", "log2_count", "linear_dim", "gamma_size", "run_law_holds"]
    return cols, [[m, r, d, K, count, math.log2(count), lin_dim, gamma, run_law_ok]]


def cmd_mc(m: int, samples: int, seed: int, r: int | None = None) -> tuple[list[str], list[list]]:
    if samples < 1:
        raise UsageError("samples must be >= 1")
    orders = [r] if r is not None else list(range(1, m))
    rows = []
    for i, rr in enumerate(orders):
        rng = np.random.default_rng([seed, i])
        est = subcodes.mc_lower_bound(m, rr, samples, rng)
        rate = rmcode.binom_le(m, rr) / (1 << m)
        rows.append([m, rr, rate, est.rate, est.stderr, est.log2_mean, est.log2_mean_stderr, subcodes.jensen_lower_bound(m, rr)])
    cols = ["m", "r", "R", "mc_lb", "stderr", "log2_mean", "log2_mean_stderr", "jensen_lb"]
    return cols, rows


def cmd_bp(m: int, r: int, beta: float, iters: int, samples: int, seed: int, damping: float = 0.0):
    if samples < 1 or iters < 1:
        raise UsageError("samples and iters must be >= 1")
    est = bp.bp_rate_estimate(m, r, beta, samples, np.random.default_rng(seed), iters, damping=damping)
    rows = []
    for i, s in enumerate(est.samples):
        rhs = bp.statphy_rhs(m, r, beta, s.wt_gt)
        rows.append([i, s.wt_gt, s.log2_zhat, s.log2_z(beta), s.converged, s.iterations, s.residual, s.fp_distance, rhs])
    cols = ["sample", "wt_gtilde", "log2_zhat_bp", "log2_z_bp", "converged", "iterations", "residual", "fp_distance", "statphy_rhs"]
    footer = [f"rate_estimate={est.rate!r}", f"stderr={est.stderr!r}", f"jensen_lb={subcodes.jensen_lower_bound(m, r)!r}"]
    return cols, rows, footer


def cmd_simulate(channel: str, m: int, r: int, d: int, tau: int, trials: int, seed: int, epsilon: float = 0.05):
    try:
        ch = channelsim.parse_channel(channel)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if trials < 1:
        raise UsageError("trials must be >= 1")
    params = concat.select_params(m, d=d, epsilon=epsilon, tau=tau, r=r)
    meta = [params.K, params.N, params.L, params.N_part, params.k_inner, params.N_tot, concat.achieved_rate(params)]
    meta_cols = ["K", "N", "L", "N_part", "k_inner", "N_tot", "rate"]
    if isinstance(ch, channelsim.BEC):
        s = concat.simulate_bec(params, ch.epsilon, trials, seed)
        lo, hi = binomial_ci(trials - s.success, trials)
        cols = meta_cols + ["trials", "eta_hat", "delta_hat", "failure_rate", "failure_ci_low", "failure_ci_high", "chain_bound", "wrong_decided_bits", "valid_fraction"]
        row = meta + [trials, s.eta_hat, s.delta_hat, s.failure_rate, lo, hi, s.chain_bound(params.L), s.wrong_decided_bits, s.valid_inputs / trials]
    else:
        s = concat.simulate_uncoded(params, ch, trials, seed)
        cols = meta_cols + ["trials", "raw_symbol_error_rate", "valid_fraction"]
        row = meta + [trials, s.raw_error_rate, s.valid_inputs / trials]
    return cols, [row]


def cmd_capacity(channel: str):
    try:
        ch = channelsim.parse_channel(channel)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return ["channel", "capacity"], [[str(ch), channelsim.capacity(ch)]]


# ---- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rmrll", description="RLL subcodes of Reed-Muller codes: experiments as CSV.")
    p.add_argument("--version", action="version", version=f"rmrll {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write CSV here instead of stdout")
        return sp

    sp = common(sub.add_parser("bounds", help="closed-form rate bounds on a grid of R"))
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--grid", type=float, default=0.01)
    sp.add_argument("--tau", type=int, default=50)

    sp = common(sub.add_parser("count", help="exact (d,inf)-constrained codeword count of RM(m,r)"))
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--d", type=int, default=1)

    sp = common(sub.add_parser("mc", help="Monte-Carlo (1,inf) rate lower bound"))
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--r", type=int, default=None, help="single order; default sweeps 1..m-1")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=1)

    sp = common(sub.add_parser("bp", help="sum-product partition estimates"))
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--beta", type=float, default=40.0)
    sp.add_argument("--iters", type=int, default=100)
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--damping", type=float, default=0.0)

    sp = common(sub.add_parser("simulate", help="concatenated scheme over a channel"))
    sp.add_argument("--channel", required=True, help="bec:EPS, bsc:P or awgn:SIGMA")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--tau", type=int, default=4)
    sp.add_argument("--epsilon", type=float, default=0.05, help="design slack in the part count")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=1)

    sp = common(sub.add_parser("capacity", help="capacity of a channel"))
    sp.add_argument("--channel", required=True)
    return p


def run(args: argparse.Namespace) -> str:
    params = {k: v for k, v in vars(args).items() if k not in ("command", "out")}
    cfg = ExperimentConfig(args.command, params, args.out)
    footer: list[str] = []
    if args.command == "bounds":
        cols, rows = cmd_bounds(args.d, args.grid, args.tau)
    elif args.command == "count":
        cols, rows = cmd_count(args.m, args.r, args.d)
    elif args.command == "mc":
        cols, rows = cmd_mc(args.m, args.samples, args.seed, args.r)
    elif args.command == "bp":
        cols, rows, footer = cmd_bp(args.m, args.r, args.beta, args.iters, args.samples, args.seed, args.damping)
    elif args.command == "simulate":
        cols, rows = cmd_simulate(args.channel, args.m, args.r, args.d, args.tau, args.trials, args.seed, args.epsilon)
    else:
        cols, rows = cmd_capacity(args.channel)
    return render_csv(cfg, cols, rows, footer)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        text = run(args)
    except UsageError as exc:
        print(f"rmrll: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, RuntimeError, OverflowError) as exc:
        print(f"rmrll: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
