"""Quantum Zeno engines and heat pumps on a 1D harmonic trap."""
from .analysis import (
    SweepSpec,
    SweepTable,
    adiabaticity_parameter,
    leakage_estimate,
    run_sweep,
    zeno_survival_estimate,
)
from .cycle import (
    CycleParams,
    CycleRecord,
    MachineMode,
    cop_optimal,
    engine_cycle,
    eta_optimal,
    heat_pump_cycle,
    run_cycles,
)
from .propagator import StepParams, evolve, evolve_eigenbasis_oracle, split_step
from .qho import (
    PER_F,
    PER_OMEGA,
    Grid,
    TrapProtocol,
    UnitConvention,
    Wavefunction,
    apply_ladder,
    eigenstate,
    inner,
    make_grid,
    mean_energy,
    populations,
    project,
)
from .zeno import RenormMode, StrokeResult, ZenoConfig, survival_of, zeno_stroke

__version__ = "0.1.0"
