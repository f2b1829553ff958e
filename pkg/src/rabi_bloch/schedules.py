"""Atomic transition frequency schedules Omega(t).

Three variants: a constant value, a rectangular pulse train and a raised
cosine. Times are in units of ``1/omega`` and amplitudes in units of omega.
The rectangular train has pulses of width ``T1`` centered at
``|t - phi0| = n T / 2`` for ``n = 1, 2, ...``, so its repetition period is
``T / 2``; there is no pulse centered at ``t = phi0`` itself.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ScheduleVariantError


@dataclass(frozen=True)
class Constant:
    value: float = 1.0

    @property
    def period(self):
        return None

    @property
    def schedule_id(self):
        return f"constant(amplitude={self.value:g})"


@dataclass(frozen=True)
class Rectangular:
    T: float
    T1: float
    phi0: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"pulse period T must be positive, got {self.T}")
        if not 0 < self.T1 < self.T:
            raise ValueError(f"pulse width must satisfy 0 < T1 < T, got {self.T1}")
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")

    @property
    def period(self):
        return self.T / 2.0

    @property
    def schedule_id(self):
        return (f"rectangular(T={self.T:.12g}, T1={self.T1:.12g}, "
                f"phi0={self.phi0:.12g}, amplitude={self.amplitude:g})")


@dataclass(frozen=True)
class Sinusoidal:
    phi0: float = 0.0
    amplitude: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")

    @property
    def period(self):
        return math.pi / self.omega

    @property
    def schedule_id(self):
        return f"sinusoidal(phi0={self.phi0:.12g}, amplitude={self.amplitude:g})"


DriveSchedule = (Constant, Rectangular, Sinusoidal)


def _in_pulse(schedule, t):
    x = abs(t - schedule.phi0)
    T, T1 = schedule.T, schedule.T1
    base = math.floor(2.0 * x / T)
    for n in (base, base + 1):
        if n >= 1 and (n * T - T1) / 2.0 < x <= (n * T + T1) / 2.0:
            return True
    return False


def omega_at(schedule, t):
    """Drive value ``Omega(t)``."""
    if isinstance(schedule, Constant):
        return float(schedule.value)
    if isinstance(schedule, Rectangular):
        return float(schedule.amplitude) if _in_pulse(schedule, t) else 0.0
    if isinstance(schedule, Sinusoidal):
        return 0.5 * schedule.amplitude * (
            1.0 + math.cos(2.0 * schedule.omega * (t + schedule.phi0)))
    raise ScheduleVariantError(f"unknown schedule {schedule!r}")


def omega_series(schedule, times):
    return np.array([omega_at(schedule, t) for t in np.atleast_1d(times)])


def segment_boundaries(schedule, t_max):
    """Sorted pulse on/off times of a rectangular drive within ``[0, t_max]``."""
    if not isinstance(schedule, Rectangular):
        raise ScheduleVariantError("segment boundaries exist only for rectangular drives")
    T, T1, phi0 = schedule.T, schedule.T1, schedule.phi0
    intervals = []
    n_max = int(math.ceil(2.0 * (t_max + abs(phi0)) / T)) + 2
    for n in range(1, n_max + 1):
        half_lo, half_hi = (n * T - T1) / 2.0, (n * T + T1) / 2.0
        intervals.append((phi0 + half_lo, phi0 + half_hi))
        intervals.append((phi0 - half_hi, phi0 - half_lo))
    intervals.sort()
    merged = []
    for lo, hi in intervals:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    edges = [x for pair in merged for x in pair if 0.0 <= x <= t_max]
    return np.array(sorted(set(edges)))


def make_schedule(kind, amplitude=1.0, phi0=0.0, period=2.0 * math.pi, width_fraction=0.1):
    """Build a schedule from a name: ``constant``, ``rectangular`` or ``sinusoidal``."""
    kind = kind.lower()
    if kind == "constant":
        return Constant(amplitude)
    if kind == "rectangular":
        return Rectangular(T=period, T1=width_fraction * period, phi0=phi0,
                           amplitude=amplitude)
    if kind == "sinusoidal":
        return Sinusoidal(phi0=phi0, amplitude=amplitude, omega=2.0 * math.pi / period)
    raise ValueError(f"unknown schedule kind {kind!r}")
