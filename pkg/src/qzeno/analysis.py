"""Analytic Zeno predictors and parameter sweeps over cycle configurations."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .cycle import CycleParams, MachineMode, cop_optimal, eta_optimal, run_cycles
from .errors import ConfigurationError, DomainError, PredictorRangeError, ZenoError
from .qho import TrapProtocol


def leakage_estimate(k: int, protocol: TrapProtocol, t: float, t0: float = 0.0) -> float:
    """Short-time probability of leaving level ``k`` during ``[t0, t0 + t]``.

    Sums ``(Hdot_kn / omega_kn)**2 t**2`` over the neighbours ``n = k +- 2``
    reachable through ``Hdot = f fdot x**2``; the ramp is frozen at ``t0``.
    The unit prefactor multiplies numerator and denominator alike and drops out.
    """
    if k < 0:
        raise DomainError(f"level must be >= 0, got {k}")
    f = protocol.f(t0)
    fdot = protocol.fdot
    # x^2 matrix elements to k+2 and k-2 are sqrt((k+1)(k+2))/2f and sqrt(k(k-1))/2f;
    # the gap to either neighbour is 2f
    weight = (k + 1) * (k + 2) + k * (k - 1)
    return weight * (fdot / (4 * f)) ** 2 * t * t


def zeno_survival_estimate(k: int, protocol: TrapProtocol, M: int) -> float:
    """Survival after ``M`` equally spaced measurements.

    Product of per-interval survivals ``1 - leakage`` with the ramp evaluated
    at the start of each interval; for a constant rate this is ``(1 - eps)**M``.
    """
    if M < 1:
        raise DomainError("need at least one measurement")
    tau = protocol.duration / M
    starts = np.arange(M) * tau
    leak = np.array([leakage_estimate(k, protocol, tau, t0) for t0 in starts])
    if np.any(leak >= 1):
        raise PredictorRangeError(
            f"per-interval leakage {leak.max():.3g} >= 1: ramp too fast for the short-time formula")
    return float(np.clip(np.prod(1.0 - leak), 0.0, 1.0))


def adiabaticity_parameter(K: float, M: int, T: float) -> float:
    if M < 1 or not T > 0:
        raise DomainError("adiabaticity parameter needs M >= 1 and T > 0")
    return (K - 1) / (M * T)


@dataclass(frozen=True)
class SweepSpec:
    """Raster of ``(K, T, M)`` points; ``OmegaT_values`` is accepted as a synonym of ``M_values``."""

    K_values: Sequence[float]
    T_values: Sequence[float]
    template: CycleParams
    M_values: Optional[Sequence[int]] = None
    OmegaT_values: Optional[Sequence[float]] = None
    cycles_per_point: int = 20

    def __post_init__(self):
        if (self.M_values is None) == (self.OmegaT_values is None):
            raise ConfigurationError("give exactly one of M_values or OmegaT_values", key="M_values")
        for name in ("K_values", "T_values"):
            if not list(getattr(self, name)):
                raise ConfigurationError(f"{name} must not be empty", key=name)
        if not list(self.m_values):
            raise ConfigurationError("measurement list must not be empty", key="M_values")
        if self.cycles_per_point < 1:
            raise ConfigurationError("cycles_per_point must be >= 1", key="cycles_per_point")
        for K, T, M in self.points():
            self.template.with_point(K, T, M)  # validates every point up front

    @property
    def m_values(self) -> List[int]:
        vals = self.M_values if self.M_values is not None else self.OmegaT_values
        return [int(round(v)) for v in vals]

    def points(self):
        return [(float(K), float(T), M)
                for K in self.K_values for T in self.T_values for M in self.m_values]


@dataclass
class SweepRow:
    K: float
    T: float
    M: int
    mean_perf: float
    optimum: float
    mean_survival: float
    adiab_param: float
    failed_cycles: int
    failed: bool = False
    error: Optional[str] = None

    @property
    def OmegaT(self) -> int:
        return self.M

    @property
    def gap(self) -> float:
        return self.optimum - self.mean_perf


@dataclass
class SweepTable:
    mode: MachineMode
    rows: List[SweepRow]

    def __len__(self):
        return len(self.rows)


def _run_point(params: CycleParams) -> SweepRow:
    K, T, M = params.K, params.T, params.M
    opt = cop_optimal(K) if params.machine_mode is MachineMode.HEAT_PUMP else eta_optimal(K)
    adiab = adiabaticity_parameter(K, M, T) if M >= 1 else math.inf
    try:
        run = run_cycles(params)
    except ZenoError as exc:
        return SweepRow(K, T, M, math.nan, opt, math.nan, adiab, params.n_cycles,
                        failed=True, error=str(exc))
    surv = [s for r in run.records for s in r.survival_per_stroke]
    return SweepRow(K, T, M, run.mean, opt, float(np.mean(surv)), adiab,
                    run.n_failed + run.n_excluded)


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepTable:
    """Run every raster point; row order follows ``spec.points()`` regardless of ``threads``."""
    params = [replace(spec.template.with_point(K, T, M), n_cycles=spec.cycles_per_point)
              for K, T, M in spec.points()]
    if threads <= 1 or len(params) == 1:
        rows = [_run_point(p) for p in params]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_run_point, params))
    return SweepTable(spec.template.machine_mode, rows)
