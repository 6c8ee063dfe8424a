"""Tabulate the closed-form rate bounds for d = 1..3 and print the crossing points."""

import argparse
from dataclasses import dataclass
from pathlib import Path

from rmrll.cli import ExperimentConfig, cmd_bounds, render_csv
from rmrll.subcodes import concat_lb, crossovers


@dataclass
class Config:
    out_dir: Path = Path("results")
    grid: float = 0.01
    tau: int = 50


def main(cfg: Config):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for d in (1, 2, 3):
        cols, rows = cmd_bounds(d, cfg.grid, cfg.tau)
        run_cfg = ExperimentConfig("bounds", {"d": d, "grid": cfg.grid, "tau": cfg.tau})
        (cfg.out_dir / f"bounds_d{d}.csv").write_text(render_csv(run_cfg, cols, rows))
    print("concat_lb vs R/2:    ", crossovers("concat_lb", lambda R: R / 2, tau=cfg.tau))
    print("concat_lb vs R-3/8:  ", crossovers("concat_lb", lambda R: max(0.0, R - 3 / 8), tau=cfg.tau))
    print("concat_lb vs min(7R/8, C0):", crossovers("concat_lb", "general_ub_1inf", tau=cfg.tau))
    bec = crossovers(lambda e: concat_lb(1 - e, 1, cfg.tau), lambda e: (1 - e) / 2)
    print("BEC erasure threshold:", bec)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", type=Path, default=Config.out_dir)
    p.add_argument("--grid", type=float, default=Config.grid)
    p.add_argument("--tau", type=int, default=Config.tau)
    a = p.parse_args()
    main(Config(a.out_dir, a.grid, a.tau))
