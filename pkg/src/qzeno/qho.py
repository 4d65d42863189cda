"""Harmonic-oscillator building blocks on a uniform periodic grid.

Units: lengths in oscillator lengths at the reference frequency, energies
in units of the reference level spacing, so that the Hamiltonian at trap
frequency ``f`` is ``H = p**2/2 + (f*x)**2/2`` with ``E_n(f) = f*(n + 1/2)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateStateError,
    ResolutionError,
    UsageError,
)

DEFAULT_N_POINTS = 512
DEFAULT_LENGTH = 9.3
DEFAULT_N_MAX = 32

# |psi|^2 below this is treated as the zero state
ZERO_NORM2 = 1e-24
# largest grid-norm deviation of a sampled eigenstate that still counts as resolved
RESOLUTION_TOL = 1e-6


@dataclass(frozen=True)
class Grid:
    n_points: int
    length: float
    dx: float = field(init=False, compare=False)
    x: np.ndarray = field(init=False, compare=False, repr=False)
    k: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ConfigurationError(
                f"n_points must be a power of two >= 8, got {n!r}", key="n_points")
        if not self.length > 0:
            raise ConfigurationError(
                f"length must be positive, got {self.length!r}", key="length")
        dx = self.length / n
        x = -self.length / 2 + dx * np.arange(n)
        j = np.arange(n)
        # standard FFT ordering: 0, 1, ..., n/2-1, -n/2, ..., -1
        k = 2 * np.pi / self.length * np.where(j < n // 2, j, j - n)
        x.flags.writeable = False
        k.flags.writeable = False
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "k", k)


def make_grid(n_points: int = DEFAULT_N_POINTS, length: float = DEFAULT_LENGTH) -> Grid:
    return Grid(n_points, float(length))


class TimeBase(str, enum.Enum):
    PER_F = "per_f"
    PER_OMEGA = "per_omega"


@dataclass(frozen=True)
class UnitConvention:
    """Time unit choice.

    With time measured in units of ``1/f`` the Schrödinger equation picks up a
    factor ``2*pi`` (``i d/dt psi = 2*pi*H psi``); with time in ``1/omega`` the
    prefactor is 1.
    """

    time_base: TimeBase = TimeBase.PER_F

    def __post_init__(self):
        object.__setattr__(self, "time_base", TimeBase(self.time_base))

    @property
    def c(self) -> float:
        return 2 * math.pi if self.time_base is TimeBase.PER_F else 1.0

    @classmethod
    def parse(cls, value) -> "UnitConvention":
        if isinstance(value, UnitConvention):
            return value
        try:
            return cls(TimeBase(str(value).strip().lower()))
        except ValueError:
            raise ConfigurationError(
                f"unit must be one of per_f, per_omega, got {value!r}", key="unit") from None


PER_F = UnitConvention(TimeBase.PER_F)
PER_OMEGA = UnitConvention(TimeBase.PER_OMEGA)


@dataclass(frozen=True)
class TrapProtocol:
    """Linear ramp of the trap frequency from ``f_start`` to ``f_end`` in time ``duration``."""

    f_start: float
    f_end: float
    duration: float
    shape: str = "linear"

    def __post_init__(self):
        if self.shape != "linear":
            raise ConfigurationError(f"unsupported ramp shape {self.shape!r}", key="shape")
        if not (self.f_start > 0 and self.f_end > 0):
            raise ConfigurationError("trap frequencies must be positive", key="f")
        if not self.duration > 0:
            raise ConfigurationError("stroke duration must be positive", key="T")

    @property
    def fdot(self) -> float:
        return (self.f_end - self.f_start) / self.duration

    def f(self, t):
        return self.f_start + self.fdot * t

    def reversed(self) -> "TrapProtocol":
        return TrapProtocol(self.f_end, self.f_start, self.duration, self.shape)


@dataclass
class Wavefunction:
    amps: np.ndarray
    grid: Grid

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (self.grid.n_points,):
            raise UsageError(
                f"amplitude array has shape {self.amps.shape}, grid has {self.grid.n_points} points")

    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real * self.grid.dx)

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def density(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def copy(self) -> "Wavefunction":
        return Wavefunction(self.amps.copy(), self.grid)

    def scaled(self, factor) -> "Wavefunction":
        return Wavefunction(self.amps * factor, self.grid)

    def normalized(self) -> "Wavefunction":
        n2 = self.norm2()
        if n2 <= ZERO_NORM2:
            raise DegenerateStateError("cannot normalize the zero state")
        return self.scaled(1 / math.sqrt(n2))

    def __add__(self, other: "Wavefunction") -> "Wavefunction":
        _same_grid(self, other)
        return Wavefunction(self.amps + other.amps, self.grid)


def _same_grid(a: Wavefunction, b: Wavefunction) -> None:
    if a.grid != b.grid:
        raise UsageError("wavefunctions live on different grids")


def level_energy(n, f):
    return f * (np.asarray(n) + 0.5)


def x2_element(m: int, n: int, f: float) -> float:
    """Analytic <m|x^2|n> for oscillator eigenstates at frequency ``f``."""
    if m > n:
        m, n = n, m
    if m == n:
        return (2 * n + 1) / (2 * f)
    if n == m + 2:
        return math.sqrt((m + 1) * (m + 2)) / (2 * f)
    return 0.0


def _hermite_rows(grid: Grid, n_max: int, f: float) -> np.ndarray:
    if n_max < 0:
        raise UsageError("n_max must be >= 0")
    if not f > 0:
        raise ConfigurationError(f"trap frequency must be positive, got {f!r}", key="f")
    s = math.sqrt(f) * grid.x
    out = np.empty((n_max + 1, grid.n_points))
    out[0] = (f / math.pi) ** 0.25 * np.exp(-0.5 * s * s)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * s * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * s * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def _unit_rows(rows: np.ndarray, dx: float) -> np.ndarray:
    # the box clips the tails slightly; resolved levels are rescaled to unit grid
    # norm, levels that do not fit are left as sampled
    norm2 = np.sum(rows * rows, axis=1, keepdims=True) * dx
    fits = np.abs(norm2 - 1.0) <= RESOLUTION_TOL
    return np.where(fits, rows / np.sqrt(norm2), rows)


@lru_cache(maxsize=256)
def hermite_basis(grid: Grid, n_max: int, f: float) -> np.ndarray:
    """Rows ``phi_0 .. phi_n_max`` sampled on ``grid`` (real, read-only).

    Uses the three-term recurrence of the normalized Hermite functions,
    ``phi_{n+1} = sqrt(2/(n+1)) s phi_n - sqrt(n/(n+1)) phi_{n-1}`` with
    ``s = sqrt(f) x``, so no factorials or raw Hermite polynomials appear.
    """
    out = _unit_rows(_hermite_rows(grid, n_max, f), grid.dx)
    out.flags.writeable = False
    return out


def eigenstate(grid: Grid, n: int, f: float, check: bool = True) -> Wavefunction:
    """Level ``n`` of the trap ``f`` with unit norm on the grid.

    With ``check`` the sampled function must carry its full norm to within
    1e-6 before rescaling, otherwise the level does not fit the box.
    """
    if n < 0:
        raise UsageError(f"level index must be >= 0, got {n}")
    raw = _hermite_rows(grid, int(n), float(f))[n]
    norm2 = float(np.sum(raw * raw)) * grid.dx
    if check and abs(norm2 - 1.0) > RESOLUTION_TOL:
        raise ResolutionError(
            f"level {n} at f={f:g} is not resolved on the grid "
            f"(norm deviates by {abs(norm2 - 1.0):.2e})")
    return Wavefunction((raw / math.sqrt(norm2)).astype(complex), grid)


def inner(psi: Wavefunction, phi: Wavefunction) -> complex:
    """Discrete overlap <phi|psi>."""
    _same_grid(psi, phi)
    return complex(np.vdot(phi.amps, psi.amps) * psi.grid.dx)


def overlaps(psi: Wavefunction, f: float, n_max: int = DEFAULT_N_MAX) -> np.ndarray:
    """Complex amplitudes ``c_n = <phi_n(f)|psi>`` for ``n = 0..n_max``."""
    basis = hermite_basis(psi.grid, int(n_max), float(f))
    return (basis @ psi.amps) * psi.grid.dx


def populations(psi: Wavefunction, f: float, n_max: int = DEFAULT_N_MAX):
    """Absolute level populations and the unaccounted norm.

    Returns ``(P, residual)`` with ``P[n] = |<phi_n(f)|psi>|**2`` (not divided
    by the norm of ``psi``) and ``residual = |psi|**2 - sum(P)``.
    """
    if n_max < 1:
        raise UsageError("n_max must be >= 1")
    p = np.abs(overlaps(psi, f, n_max)) ** 2
    return p, psi.norm2() - float(p.sum())


def momentum(psi: Wavefunction) -> Wavefunction:
    """Spectral ``p psi = -i dpsi/dx``."""
    return Wavefunction(np.fft.ifft(psi.grid.k * np.fft.fft(psi.amps)), psi.grid)


def apply_ladder(psi: Wavefunction, f: float, direction: str) -> Wavefunction:
    """Apply ``a^dagger(f)`` (``"raise"``) or ``a(f)`` (``"lower"``) without renormalizing."""
    if direction not in ("raise", "lower"):
        raise UsageError(f"direction must be 'raise' or 'lower', got {direction!r}")
    rf = math.sqrt(f)
    p_psi = momentum(psi).amps
    sign = -1j if direction == "raise" else 1j
    amps = (rf * psi.grid.x * psi.amps + sign * p_psi / rf) / math.sqrt(2.0)
    return Wavefunction(amps, psi.grid)


def project(psi: Wavefunction, n: int, f: float):
    """Apply ``|n(f)><n(f)|``.

    Returns the projected state and the conditional survival probability
    ``|<n|psi>|**2 / |psi|**2``.
    """
    n2 = psi.norm2()
    if n2 <= ZERO_NORM2:
        raise DegenerateStateError("projection of a zero-norm state")
    phi = eigenstate(psi.grid, n, f, check=False)
    amp = inner(psi, phi)
    return phi.scaled(amp), abs(amp) ** 2 / n2


def mean_energy(psi: Wavefunction, f: float) -> float:
    """``<psi|H(f)|psi>`` without dividing by the norm."""
    g = psi.grid
    psik = np.fft.fft(psi.amps)
    kinetic = 0.5 * float(np.sum(g.k ** 2 * np.abs(psik) ** 2)) * g.dx / g.n_points
    potential = 0.5 * f * f * float(np.sum(g.x ** 2 * np.abs(psi.amps) ** 2)) * g.dx
    return kinetic + potential
