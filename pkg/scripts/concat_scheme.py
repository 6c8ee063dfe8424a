"""Finite-m rates of the two-stage scheme and its BEC failure rate against the erasure probability."""

import argparse
from dataclasses import dataclass, field

from rmrll import concat
from rmrll.rmcode import r_of_rate


@dataclass
class Config:
    R: float = 0.9
    tau: int = 4
    d: int = 1
    ms: list[int] = field(default_factory=lambda: [8, 10, 12])
    sim_m: int = 8
    trials: int = 500
    seed: int = 1
    epsilons: list[float] = field(default_factory=lambda: [0.01, 0.05, 0.1, 0.2, 0.3])


def main(cfg: Config):
    print("m,r,K,L,N_tot,achieved_rate,finite_bound")
    for m in cfg.ms:
        p = concat.select_params(m, R=cfg.R, d=cfg.d, tau=cfg.tau)
        print(f"{m},{p.r},{p.K},{p.L},{p.N_tot},{concat.achieved_rate(p):.5f},{concat.finite_rate_bound(p):.5f}")
    p = concat.select_params(cfg.sim_m, d=cfg.d, tau=cfg.tau, r=r_of_rate(cfg.sim_m, cfg.R))
    print("\nepsilon,eta_hat,delta_hat,failure_rate,chain_bound,wrong_bits")
    for eps in cfg.epsilons:
        s = concat.simulate_bec(p, eps, cfg.trials, cfg.seed)
        print(f"{eps},{s.eta_hat:.4f},{s.delta_hat:.4f},{s.failure_rate:.4f},{s.chain_bound(p.L):.4f},{s.wrong_decided_bits}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--R", type=float, default=0.9)
    ap.add_argument("--tau", type=int, default=4)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    a = ap.parse_args()
    main(Config(R=a.R, tau=a.tau, d=a.d, trials=a.trials, seed=a.seed))
