"""Otto-type cycles built from Zeno strokes and instantaneous ladder strokes."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import ConfigurationError, DegenerateTrajectoryError, DomainError, RunFailedError
from .propagator import DEFAULT_DT, StepParams
from .qho import (
    DEFAULT_N_MAX,
    PER_F,
    Grid,
    TrapProtocol,
    UnitConvention,
    Wavefunction,
    apply_ladder,
    eigenstate,
    level_energy,
    make_grid,
    mean_energy,
    populations,
)
from .zeno import RenormMode, StrokeResult, ZenoConfig, zeno_stroke

# cycles whose performance denominator falls below this are excluded from averages
DENOMINATOR_EPS = 1e-12


class MachineMode(str, enum.Enum):
    HEAT_PUMP = "heat_pump"
    ENGINE = "engine"

    @classmethod
    def parse(cls, value) -> "MachineMode":
        try:
            return cls(str(getattr(value, "value", value)).strip().lower())
        except ValueError:
            raise ConfigurationError(
                f"mode must be 'heat_pump' or 'engine', got {value!r}", key="mode") from None


def cop_optimal(K: float) -> float:
    if not K > 1:
        raise DomainError("K must exceed 1")
    return K / (K - 1)


def eta_optimal(K: float) -> float:
    if not K > 1:
        raise DomainError("K must exceed 1")
    return (K - 1) / K


@dataclass(frozen=True)
class CycleParams:
    """Configuration of a chain of cycles.

    Give either ``M`` (measurements per Zeno stroke) or ``omega`` (measurement
    rate, ``M = round(omega * T)``, at least 1).
    """

    K: float
    T: float
    M: Optional[int] = None
    omega: Optional[float] = None
    dt: float = DEFAULT_DT
    n_cycles: int = 1
    machine_mode: MachineMode = MachineMode.HEAT_PUMP
    renorm_mode: RenormMode = RenormMode.BARE
    ladder_renorm: bool = False
    unit: UnitConvention = PER_F
    n_max: int = DEFAULT_N_MAX
    grid: Grid = field(default_factory=make_grid)
    record_stride: Optional[int] = None
    record_density: bool = False

    def __post_init__(self):
        if not self.K > 1:
            raise ConfigurationError("K must exceed 1", key="K")
        if not self.T > 0:
            raise ConfigurationError("T must be positive", key="T")
        if self.n_cycles < 1:
            raise ConfigurationError("n_cycles must be >= 1", key="n_cycles")
        if self.M is None and self.omega is None:
            raise ConfigurationError("one of M or omega is required", key="M")
        if self.omega is not None:
            if self.M is not None:
                raise ConfigurationError("give M or omega, not both", key="omega")
            if not self.omega > 0:
                raise ConfigurationError("omega must be positive", key="omega")
            object.__setattr__(self, "M", max(1, int(round(self.omega * self.T))))
        if self.M < 0:
            raise ConfigurationError("M must be >= 0", key="M")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "machine_mode", MachineMode.parse(self.machine_mode))
        object.__setattr__(self, "renorm_mode", RenormMode.parse(self.renorm_mode))
        object.__setattr__(self, "unit", UnitConvention.parse(self.unit))
        StepParams(self.dt, self.unit)

    @property
    def step(self) -> StepParams:
        return StepParams(self.dt, self.unit)

    def with_point(self, K: float, T: float, M: int) -> "CycleParams":
        return replace(self, K=K, T=T, M=M, omega=None)


@dataclass
class CycleRecord:
    """Thermodynamic ledger of one cycle.

    Endpoint labels follow the cycle diagram: A is the ground state at the
    initial frequency. Heat pump order is A->D->C->B->A, engine order
    A->B->C->D->A.
    """

    index: int
    Q_in: float
    Q_out: float
    W_compress: float
    W_expand: float
    xi: Optional[float] = None
    eta: Optional[float] = None
    endpoint_populations: Dict[str, np.ndarray] = field(default_factory=dict)
    population_residuals: Dict[str, float] = field(default_factory=dict)
    endpoint_energies: Dict[str, float] = field(default_factory=dict)
    survival_per_stroke: Tuple[float, float] = (1.0, 1.0)
    energy_change: float = 0.0
    backaction_energy: float = 0.0
    norm_end: float = 1.0
    strokes: List[StrokeResult] = field(default_factory=list, repr=False)

    @property
    def W_net(self) -> float:
        return self.W_compress + self.W_expand

    @property
    def first_law_residual(self) -> float:
        return self.Q_in + self.Q_out + self.W_net - self.energy_change

    @property
    def performance(self) -> Optional[float]:
        return self.xi if self.eta is None else self.eta


def _heat(before: Wavefunction, after: Wavefunction, f: float, n_max: int):
    p0, r0 = populations(before, f, n_max)
    p1, r1 = populations(after, f, n_max)
    e = level_energy(np.arange(n_max + 1), f)
    return float(np.dot(e, p1 - p0)), (p0, r0), (p1, r1)


def _ladder(psi: Wavefunction, f: float, direction: str, renorm: bool) -> Wavefunction:
    out = apply_ladder(psi, f, direction)
    if renorm:
        out = out.scaled(math.sqrt(psi.norm2() / out.norm2()))
    return out


def _zeno(psi, f0, f1, level, params: CycleParams) -> StrokeResult:
    cfg = ZenoConfig(level, params.M, params.renorm_mode, params.record_stride,
                     params.record_density, params.n_max)
    return zeno_stroke(psi, TrapProtocol(f0, f1, params.T), cfg, params.step)


def heat_pump_cycle(psi: Wavefunction, params: CycleParams, index: int = 0):
    """Inverse Otto cycle: raise at f=1, Zeno-compress on |1>, lower at f=K, Zeno-expand on |0>."""
    K, nm = params.K, params.n_max
    e_a = mean_energy(psi, 1.0)
    psi_d = _ladder(psi, 1.0, "raise", params.ladder_renorm)
    q_in, (pa, ra), (pd, rd) = _heat(psi, psi_d, 1.0, nm)
    comp = _zeno(psi_d, 1.0, K, 1, params)
    psi_c = comp.psi_final
    psi_b = _ladder(psi_c, K, "lower", params.ladder_renorm)
    q_out, (pc, rc), (pb, rb) = _heat(psi_c, psi_b, K, nm)
    exp_ = _zeno(psi_b, K, 1.0, 0, params)
    psi_a = exp_.psi_final
    rec = CycleRecord(
        index=index,
        Q_in=q_in,
        Q_out=q_out,
        W_compress=comp.work,
        W_expand=exp_.work,
        endpoint_populations={"A": pa, "D": pd, "C": pc, "B": pb},
        population_residuals={"A": ra, "D": rd, "C": rc, "B": rb},
        endpoint_energies={"A": e_a, "D": comp.energy_start, "C": comp.energy_end,
                           "B": exp_.energy_start, "A'": exp_.energy_end},
        survival_per_stroke=(comp.survival, exp_.survival),
        energy_change=exp_.energy_end - e_a,
        backaction_energy=comp.backaction_energy + exp_.backaction_energy,
        norm_end=psi_a.norm2(),
        strokes=[comp, exp_],
    )
    den = q_out + q_in
    rec.xi = q_out / den if abs(den) >= DENOMINATOR_EPS else None
    return psi_a, rec


def engine_cycle(psi: Wavefunction, params: CycleParams, index: int = 0):
    """Otto cycle: Zeno-compress on |0>, raise at f=K, Zeno-expand on |1>, lower at f=1."""
    K, nm = params.K, params.n_max
    e_a = mean_energy(psi, 1.0)
    comp = _zeno(psi, 1.0, K, 0, params)
    psi_b = comp.psi_final
    psi_c = _ladder(psi_b, K, "raise", params.ladder_renorm)
    q_in, (pb, rb), (pc, rc) = _heat(psi_b, psi_c, K, nm)
    exp_ = _zeno(psi_c, K, 1.0, 1, params)
    psi_d = exp_.psi_final
    psi_a = _ladder(psi_d, 1.0, "lower", params.ladder_renorm)
    q_out, (pd, rd), (pa2, ra2) = _heat(psi_d, psi_a, 1.0, nm)
    pa, ra = populations(psi, 1.0, nm)
    e_end = mean_energy(psi_a, 1.0)
    rec = CycleRecord(
        index=index,
        Q_in=q_in,
        Q_out=q_out,
        W_compress=comp.work,
        W_expand=exp_.work,
        endpoint_populations={"A": pa, "B": pb, "C": pc, "D": pd, "A'": pa2},
        population_residuals={"A": ra, "B": rb, "C": rc, "D": rd, "A'": ra2},
        endpoint_energies={"A": e_a, "B": comp.energy_end, "C": exp_.energy_start,
                           "D": exp_.energy_end, "A'": e_end},
        survival_per_stroke=(comp.survival, exp_.survival),
        energy_change=e_end - e_a,
        backaction_energy=comp.backaction_energy + exp_.backaction_energy,
        norm_end=psi_a.norm2(),
        strokes=[comp, exp_],
    )
    rec.eta = (q_in + q_out) / q_in if abs(q_in) >= DENOMINATOR_EPS else None
    return psi_a, rec


class CycleRun(NamedTuple):
    records: List[CycleRecord]
    mean: float
    n_excluded: int
    n_failed: int
    psi_final: Optional[Wavefunction]


def run_cycles(params: CycleParams, psi0: Optional[Wavefunction] = None) -> CycleRun:
    """Run ``params.n_cycles`` cycles, carrying the state over without reset.

    ``mean`` averages xi (heat pump) or eta (engine) over cycles with a
    usable denominator. A cycle that projects the state to zero ends the
    chain; it and all remaining cycles count as failed.
    """
    psi = eigenstate(params.grid, 0, 1.0) if psi0 is None else psi0
    one = heat_pump_cycle if params.machine_mode is MachineMode.HEAT_PUMP else engine_cycle
    records: List[CycleRecord] = []
    n_failed = 0
    for i in range(params.n_cycles):
        try:
            psi, rec = one(psi, params, index=i)
        except DegenerateTrajectoryError:
            n_failed = params.n_cycles - i
            psi = None
            break
        records.append(rec)
    values = [r.performance for r in records if r.performance is not None]
    n_excluded = len(records) - len(values)
    if not values:
        raise RunFailedError(
            f"no usable cycle out of {params.n_cycles} "
            f"({n_failed} degenerate, {n_excluded} with vanishing denominator)", records)
    return CycleRun(records, float(np.mean(values)), n_excluded, n_failed, psi)
