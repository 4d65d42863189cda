"""Average COP over a (T, M) raster for several compression ratios.

The default raster is 3 K x 6 T x 6 M with 20 cycles per point. ``--full``
switches to 100 cycles per point on a denser log-spaced raster, which takes
many hours on one core; use ``--threads`` to spread points over processes.
"""
import argparse
import csv
import os
from dataclasses import dataclass, field
from typing import List

import numpy as np

from qzeno.analysis import SweepSpec, run_sweep
from qzeno.cli import fmt
from qzeno.cycle import CycleParams


@dataclass
class Config:
    K_values: List[float] = field(default_factory=lambda: [2.0, 5.0, 10.0])
    T_values: List[float] = field(default_factory=lambda: [0.01, 0.02, 0.05, 0.1, 0.2, 0.5])
    M_values: List[int] = field(default_factory=lambda: [10, 20, 50, 100, 200, 500])
    cycles_per_point: int = 20
    threads: int = 1
    out: str = "out/fig3/sweep.csv"


def full_config(threads: int, out: str) -> Config:
    T = [float(f"{v:.3g}") for v in np.logspace(-2, 0, 11)]
    M = sorted({int(round(v)) for v in np.logspace(1, 3.5, 11)})
    return Config(T_values=T, M_values=M, cycles_per_point=100, threads=threads, out=out)


def main(cfg: Config):
    template = CycleParams(K=2.0, T=0.1, M=10)
    spec = SweepSpec(cfg.K_values, cfg.T_values, template, M_values=cfg.M_values,
                     cycles_per_point=cfg.cycles_per_point)
    print(f"{len(spec.points())} points, {cfg.cycles_per_point} cycles each")
    table = run_sweep(spec, threads=cfg.threads)
    os.makedirs(os.path.dirname(cfg.out) or ".", exist_ok=True)
    with open(cfg.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["K", "T", "M", "xi_bar", "xi_opt", "gap", "mean_survival", "adiab_param",
                    "failed_cycles"])
        for r in table.rows:
            w.writerow([fmt(v) for v in (r.K, r.T, r.M, r.mean_perf, r.optimum, r.gap,
                                         r.mean_survival, r.adiab_param, r.failed_cycles)])
    print(f"wrote {cfg.out}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--full", action="store_true", help="100 cycles on an 11 x 11 raster")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="out/fig3/sweep.csv")
    a = ap.parse_args()
    main(full_config(a.threads, a.out) if a.full else Config(threads=a.threads, out=a.out))
