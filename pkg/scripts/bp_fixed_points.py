"""Where does sum-product land?  Exhaustive at m = 4, sampled per order at larger m."""

import argparse
from dataclasses import dataclass

import numpy as np

from rmrll import bp
from rmrll.gf2 import BitWord, span_iter
from rmrll.rmcode import build


@dataclass
class Config:
    m: int = 8
    samples: int = 200
    beta: float = 40.0
    iters: int = 100
    seed: int = 1


def small_case(beta: float, iters: int):
    code = build(3, 2)
    cond = reached = 0
    for v in span_iter(code.generator.rows):
        graph = bp.build_graph(4, 2, BitWord(code.N, v), beta)
        res = bp.run_spa(graph, iters)
        cond += bp.fixed_point_condition(graph)
        reached += res.converged and bp.fixed_point_distance(graph, res.messages) < 1e-6
    print(f"m=4 r=2: {1 << code.K} g, condition holds {cond}, fixed point reached {reached}")


def sweep(cfg: Config):
    print("r,converged,at_fixed_point,violations,min_gap_bits,rate_estimate")
    for r in range(1, cfg.m):
        est = bp.bp_rate_estimate(cfg.m, r, cfg.beta, cfg.samples, np.random.default_rng([cfg.seed, r]), cfg.iters)
        conv = [s for s in est.samples if s.converged]
        gaps = [s.log2_zhat - bp.statphy_rhs(cfg.m, r, cfg.beta, s.wt_gt) for s in conv]
        at_fp = sum(s.fp_distance < 1e-6 for s in conv)
        viol = sum(g < -1e-9 for g in gaps)
        low = min(gaps) if gaps else float("nan")
        print(f"{r},{len(conv)},{at_fp},{viol},{low:.3f},{est.rate:.5f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    cfg = Config(**vars(p.parse_args()))
    small_case(cfg.beta, cfg.iters)
    sweep(cfg)
