"""Monte-Carlo (1,inf) rate lower bound against the Jensen bound, one row per order r."""

import argparse
from dataclasses import dataclass

import numpy as np

from rmrll.rmcode import binom_le
from rmrll.subcodes import jensen_lower_bound, mc_lower_bound


@dataclass
class Config:
    m: int = 11
    samples: int = 10_000
    seed: int = 1


def main(cfg: Config):
    print("r,R,mc_lb,stderr,jensen_lb,mc_minus_jensen")
    for r in range(1, cfg.m):
        est = mc_lower_bound(cfg.m, r, cfg.samples, np.random.default_rng([cfg.seed, r]))
        jb = jensen_lower_bound(cfg.m, r)
        R = binom_le(cfg.m, r) / (1 << cfg.m)
        print(f"{r},{R:.4f},{est.rate:.5f},{est.stderr:.5f},{jb:.5f},{est.rate - jb:+.5f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--m", type=int, default=Config.m)
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args()
    main(Config(a.m, a.samples, a.seed))
