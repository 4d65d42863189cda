"""Sensitivity of one heat-pump point to the time step and the box length.

xi should be insensitive to both; the first-law residual exposes the box
edges (the default length clips the f=1 tails, a length of 16 does not).
"""
import argparse
from dataclasses import dataclass, replace

from qzeno.cycle import CycleParams, run_cycles
from qzeno.qho import make_grid


@dataclass
class Config:
    K: float = 5.0
    T: float = 0.05
    M: int = 100
    machine_mode: str = "heat_pump"


def main(cfg: Config):
    base = CycleParams(K=cfg.K, T=cfg.T, M=cfg.M, machine_mode=cfg.machine_mode)
    print("dt,length,n_points,performance,first_law_residual,survival_1")
    for dt in (4e-5, 2e-5, 1e-5, 5e-6):
        rec = run_cycles(replace(base, dt=dt)).records[0]
        print(f"{dt:g},9.3,512,{rec.performance:.10f},{rec.first_law_residual:.3e},"
              f"{rec.survival_per_stroke[0]:.8f}")
    for n, L in ((512, 9.3), (512, 12.0), (512, 16.0), (1024, 16.0), (1024, 24.0)):
        rec = run_cycles(replace(base, grid=make_grid(n, L))).records[0]
        print(f"1e-05,{L:g},{n},{rec.performance:.10f},{rec.first_law_residual:.3e},"
              f"{rec.survival_per_stroke[0]:.8f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--K", type=float, default=5.0)
    ap.add_argument("--T", type=float, default=0.05)
    ap.add_argument("--M", type=int, default=100)
    ap.add_argument("--mode", default="heat_pump", choices=["heat_pump", "engine"])
    a = ap.parse_args()
    main(Config(a.K, a.T, a.M, a.mode))
