"""Strang split-step propagation under a ramped harmonic trap."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from .errors import ConfigurationError, OracleInvalidError, UsageError
from .qho import PER_F, TrapProtocol, UnitConvention, Wavefunction

log = logging.getLogger(__name__)

DEFAULT_DT = 1e-5
MAX_DT = 1e-3
# relative edge density above which the periodic box is flagged
EDGE_WARN = 1e-6

Observer = Tuple[float, Callable[[float, Wavefunction], Optional[Wavefunction]]]


@dataclass(frozen=True)
class StepParams:
    dt: float = DEFAULT_DT
    unit: UnitConvention = field(default=PER_F)

    def __post_init__(self):
        if not (0 < self.dt <= MAX_DT):
            raise ConfigurationError(f"dt must lie in (0, {MAX_DT:g}], got {self.dt!r}", key="dt")
        object.__setattr__(self, "unit", UnitConvention.parse(self.unit))


def step_boundaries(duration: float, dt: float) -> np.ndarray:
    """Times ``0, dt, 2 dt, ..., T``; a trailing partial step lands exactly on ``T``."""
    n = int(round(duration / dt))
    if abs(n * dt - duration) > 1e-9 * duration:
        n = int(math.ceil(duration / dt))
    n = max(n, 1)
    ts = np.arange(n + 1) * dt
    ts[-1] = duration
    return ts


def _nearest_boundary(ts: np.ndarray, t: float) -> int:
    hi = int(np.clip(np.searchsorted(ts, t), 1, len(ts) - 1))
    return hi if ts[hi] - t <= t - ts[hi - 1] else hi - 1


def _kick(amps, x2h, c, f, h):
    amps *= np.exp((-1j * c * f * f * h) * x2h)


def split_step(psi: Wavefunction, protocol: TrapProtocol, t: float, step: StepParams) -> Wavefunction:
    """One potential-kinetic-potential step from ``t`` to ``t + dt``."""
    dt = step.dt
    if t < -1e-12 or t + dt > protocol.duration + 1e-12:
        raise UsageError(
            f"step [{t:g}, {t + dt:g}] leaves the stroke [0, {protocol.duration:g}]")
    g = psi.grid
    c = step.unit.c
    x2h = 0.5 * g.x ** 2
    amps = psi.amps.copy()
    _kick(amps, x2h, c, protocol.f(t), dt / 2)
    amps = np.fft.ifft(np.exp((-0.5j * c * dt) * g.k ** 2) * np.fft.fft(amps))
    _kick(amps, x2h, c, protocol.f(t + dt), dt / 2)
    return Wavefunction(amps, g)


def evolve(
    psi: Wavefunction,
    protocol: TrapProtocol,
    step: StepParams,
    observers: Iterable[Observer] = (),
) -> Wavefunction:
    """Propagate over the whole stroke, calling observers at step boundaries.

    Each observer is ``(t, callback)``; ``t`` is rounded to the nearest step
    boundary and ``callback(t_boundary, psi)`` may return a replacement state.
    Observers sharing a boundary run in the order given. Half kicks of
    consecutive steps are fused when no observer sits between them.
    """
    g = psi.grid
    T = protocol.duration
    ts = step_boundaries(T, step.dt)
    nsteps = len(ts) - 1
    events = {}
    for t_obs, cb in observers:
        if t_obs < -1e-12 or t_obs > T * (1 + 1e-9) + 1e-12:
            raise ConfigurationError(
                f"observer at t={t_obs:g} outside stroke [0, {T:g}]", key="observers")
        idx = _nearest_boundary(ts, t_obs)
        events.setdefault(idx, []).append(cb)
    marks = sorted(i for i in events if i > 0)

    c = step.unit.c
    x2h = 0.5 * g.x ** 2
    ksq = 0.5 * g.k ** 2
    kin_cache = {}

    def kinetic(h):
        key = float(h)
        op = kin_cache.get(key)
        if op is None:
            op = kin_cache[key] = np.exp((-1j * c * h) * ksq)
        return op

    def fire(idx, amps):
        state = Wavefunction(amps, g)
        for cb in events.get(idx, ()):
            out = cb(float(ts[idx]), state)
            if out is not None:
                state = out
        return state.amps.copy()

    amps = psi.amps.copy()
    if 0 in events:
        amps = fire(0, amps)
    fft, ifft = np.fft.fft, np.fft.ifft
    s = 0
    mi = 0
    while s < nsteps:
        while mi < len(marks) and marks[mi] <= s:
            mi += 1
        e = marks[mi] if mi < len(marks) else nsteps
        _kick(amps, x2h, c, protocol.f(ts[s]), 0.5 * (ts[s + 1] - ts[s]))
        for j in range(s, e):
            h = ts[j + 1] - ts[j]
            amps = ifft(kinetic(h) * fft(amps))
            if j + 1 < e:
                _kick(amps, x2h, c, protocol.f(ts[j + 1]), 0.5 * (h + ts[j + 2] - ts[j + 1]))
            else:
                _kick(amps, x2h, c, protocol.f(ts[e]), 0.5 * h)
        if e in events:
            amps = fire(e, amps)
        s = e

    out = Wavefunction(amps, g)
    _check_edges(out)
    return out


def _check_edges(psi: Wavefunction) -> None:
    dens = psi.density()
    peak = dens.max()
    if peak > 0 and max(dens[0], dens[-1]) > EDGE_WARN * peak:
        log.warning("wavefunction reaches the box edge (relative density %.2e); "
                    "periodic wrap-around may bias results", max(dens[0], dens[-1]) / peak)


def coupling_matrix(n_max: int) -> np.ndarray:
    """``A`` with ``<n|d/dt m> = (fdot/f) * A[n, m]`` for oscillator eigenstates."""
    a = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max - 1):
        v = math.sqrt((n + 1) * (n + 2)) / 4
        a[n, n + 2] = v
        a[n + 2, n] = -v
    return a


def evolve_eigenbasis_oracle(
    initial,
    protocol: TrapProtocol,
    n_max: int = 32,
    unit: UnitConvention = PER_F,
    n_steps: Optional[int] = None,
) -> np.ndarray:
    """Integrate the instantaneous-eigenbasis amplitude equations with RK4.

    ``initial`` is a level index or an array of amplitudes ``c_n(0)``.
    Independent of the grid and of the split-step code; used to cross-check it.
    """
    if n_max > 32:
        raise UsageError("oracle supports n_max <= 32")
    unit = UnitConvention.parse(unit)
    if isinstance(initial, (int, np.integer)):
        y = np.zeros(n_max + 1, dtype=complex)
        y[int(initial)] = 1.0
    else:
        init = np.asarray(initial, dtype=complex)
        y = np.zeros(n_max + 1, dtype=complex)
        y[: len(init)] = init
    c = unit.c
    levels = np.arange(n_max + 1) + 0.5
    a = coupling_matrix(n_max)
    T = protocol.duration
    fdot = protocol.fdot
    if n_steps is None:
        fmax = max(protocol.f_start, protocol.f_end)
        n_steps = max(100, int(math.ceil(T * c * fmax * (n_max + 0.5) / 0.01)))
    h = T / n_steps

    def rhs(t, v):
        f = protocol.f(t)
        return (-1j * c * f) * levels * v - (fdot / f) * (a @ v)

    t = 0.0
    for i in range(n_steps):
        t = i * h
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + (h / 2) * k1)
        k3 = rhs(t + h / 2, y + (h / 2) * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    tail = float(np.sum(np.abs(y[-2:]) ** 2))
    if tail > 1e-6:
        raise OracleInvalidError(f"truncation residual {tail:.2e} at n_max={n_max}")
    return y

