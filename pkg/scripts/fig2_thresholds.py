"""Per-cycle COP at T=0.05 for light and heavy measurement.

Prints xi for each cycle of (K, M) in {2, 5} x {10, 100}, plus the leading
short-time prediction xi = K S / (K S - 1) with 1 - S = 6 (K-1)^2 / (16 K M).
"""
import argparse
from dataclasses import dataclass, field
from typing import List

from qzeno.cycle import CycleParams, cop_optimal, run_cycles


@dataclass
class Config:
    T: float = 0.05
    n_cycles: int = 10
    K_values: List[float] = field(default_factory=lambda: [2.0, 5.0])
    M_values: List[int] = field(default_factory=lambda: [10, 100])


def predicted_cop(K, M):
    S = 1 - 6 * (K - 1) ** 2 / (16 * K * M)
    return K * S / (K * S - 1)


def main(cfg: Config):
    print("K,M,cycle,xi,survival_compress,survival_expand")
    summary = []
    for K in cfg.K_values:
        for M in cfg.M_values:
            run = run_cycles(CycleParams(K=K, T=cfg.T, M=M, n_cycles=cfg.n_cycles))
            for r in run.records:
                s1, s2 = r.survival_per_stroke
                print(f"{K:g},{M},{r.index},{r.xi:.8f},{s1:.6f},{s2:.6f}")
            summary.append((K, M, run.mean))
    print()
    for K, M, xi in summary:
        print(f"K={K:g} M={M:4d}: xi_bar = {xi:.5f}  xi_opt = {cop_optimal(K):.5f}  "
              f"short-time estimate {predicted_cop(K, M):.5f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=float, default=0.05)
    ap.add_argument("--n-cycles", type=int, default=10)
    ap.add_argument("--K", type=float, nargs="+", default=[2.0, 5.0])
    ap.add_argument("--M", type=int, nargs="+", default=[10, 100])
    a = ap.parse_args()
    main(Config(a.T, a.n_cycles, a.K, a.M))
