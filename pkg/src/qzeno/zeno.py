"""Trap ramps interrupted by selective projective measurements."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ConfigurationError, DegenerateTrajectoryError
from .propagator import StepParams, evolve, step_boundaries
from .qho import (
    DEFAULT_N_MAX,
    ZERO_NORM2,
    TrapProtocol,
    Wavefunction,
    eigenstate,
    inner,
    mean_energy,
    populations,
)


class RenormMode(str, enum.Enum):
    BARE = "bare"
    POST_SELECTED = "post_selected"

    @classmethod
    def parse(cls, value) -> "RenormMode":
        try:
            return cls(str(getattr(value, "value", value)).strip().lower())
        except ValueError:
            raise ConfigurationError(
                f"renorm_mode must be 'bare' or 'post_selected', got {value!r}",
                key="renorm_mode") from None


@dataclass(frozen=True)
class ZenoConfig:
    """Measurement plan for one stroke.

    ``M`` projections onto level ``target_level`` at ``t_k = k T / M`` for
    ``k = 1..M``; ``M = 0`` is a bare ramp. ``record_stride`` (in time steps)
    enables population snapshots, ``record_density`` adds ``|psi(x)|^2``.
    """

    target_level: int
    M: int
    renorm_mode: RenormMode = RenormMode.BARE
    record_stride: Optional[int] = None
    record_density: bool = False
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        if self.target_level < 0:
            raise ConfigurationError("target level must be >= 0", key="target_level")
        if self.M < 0:
            raise ConfigurationError("number of measurements must be >= 0", key="M")
        if self.record_stride is not None and self.record_stride < 1:
            raise ConfigurationError("record_stride must be >= 1", key="record_stride")
        object.__setattr__(self, "renorm_mode", RenormMode.parse(self.renorm_mode))

    def measurement_times(self, duration: float) -> np.ndarray:
        return np.arange(1, self.M + 1) * (duration / self.M) if self.M else np.empty(0)


@dataclass
class PopulationSnapshot:
    t: float
    f: float
    P: np.ndarray
    residual: float
    norm2: float


@dataclass
class StrokeResult:
    psi_final: Wavefunction
    survival: float
    work: float
    energy_start: float
    energy_end: float
    survival_factors: np.ndarray
    # energy removed by the projections, kept out of Q and W
    backaction_energy: float = 0.0
    population_trace: List[PopulationSnapshot] = field(default_factory=list)
    density_trace: Optional[List[tuple]] = None


def zeno_stroke(
    psi: Wavefunction,
    protocol: TrapProtocol,
    cfg: ZenoConfig,
    step: StepParams,
) -> StrokeResult:
    g = psi.grid
    n = cfg.target_level
    for f_end in (protocol.f_start, protocol.f_end):
        eigenstate(g, n, f_end)  # raises ResolutionError when the level does not fit
    nsteps = len(step_boundaries(protocol.duration, step.dt)) - 1
    if cfg.M > nsteps:
        raise ConfigurationError(
            f"M={cfg.M} measurements exceed the {nsteps} time steps of the stroke", key="M")

    e_start = mean_energy(psi, protocol.f_start)
    factors: List[float] = []
    backaction = [0.0]
    pop_trace: List[PopulationSnapshot] = []
    dens_trace = [] if cfg.record_density else None
    post_selected = cfg.renorm_mode is RenormMode.POST_SELECTED

    def partial(state):
        return StrokeResult(
            psi_final=state,
            survival=float(np.prod(factors)) if factors else 1.0,
            work=float("nan"),
            energy_start=e_start,
            energy_end=float("nan"),
            survival_factors=np.array(factors),
            backaction_energy=backaction[0],
            population_trace=pop_trace,
            density_trace=dens_trace,
        )

    def measure(t, state):
        f = protocol.f(t)
        n2 = state.norm2()
        if n2 <= ZERO_NORM2:
            raise DegenerateTrajectoryError(f"zero-norm state before measurement at t={t:g}",
                                            partial(state))
        phi = eigenstate(g, n, f, check=False)
        amp = inner(state, phi)
        s = abs(amp) ** 2 / n2
        factors.append(s)
        if s * n2 <= ZERO_NORM2:
            raise DegenerateTrajectoryError(
                f"projection onto level {n} at t={t:g} annihilated the state",
                partial(phi.scaled(amp)))
        out = phi.scaled(amp)
        if post_selected:
            out = out.scaled(math.sqrt(n2 / out.norm2()))
        backaction[0] += mean_energy(state, f) - mean_energy(out, f)
        return out

    def record(t, state):
        f = protocol.f(t)
        P, res = populations(state, f, cfg.n_max)
        pop_trace.append(PopulationSnapshot(t, f, P, res, state.norm2()))
        if dens_trace is not None:
            dens_trace.append((t, state.density()))

    observers = [(t, measure) for t in cfg.measurement_times(protocol.duration)]
    if cfg.record_stride is not None:
        ts = step_boundaries(protocol.duration, step.dt)
        idx = list(range(0, nsteps + 1, cfg.record_stride))
        if idx[-1] != nsteps:
            idx.append(nsteps)
        observers += [(float(ts[i]), record) for i in idx]

    final = evolve(psi, protocol, step, observers)
    e_end = mean_energy(final, protocol.f_end)
    return StrokeResult(
        psi_final=final,
        survival=float(np.prod(factors)) if factors else 1.0,
        work=e_end - e_start,
        energy_start=e_start,
        energy_end=e_end,
        survival_factors=np.array(factors),
        backaction_energy=backaction[0],
        population_trace=pop_trace,
        density_trace=dens_trace,
    )


def survival_of(result: StrokeResult) -> float:
    return result.survival
