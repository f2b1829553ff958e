"""Exact-diagonalization propagation of chain states.

A :class:`Spectrum` is computed once per Hamiltonian and then evolves states to
any time by phase rotation in the eigenbasis. Time-dependent drives are handled
piecewise: either exact constant segments between pulse edges, or a uniform
mesh with the drive sampled at each step midpoint.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .exceptions import AccuracyError, NumericalError, ShapeMismatchError
from .model import (
    ChainHamiltonian,
    ParitySector,
    StateVector,
    build_effective_chain,
    build_equivalent_chain,
)
from .schedules import Constant, Rectangular, omega_at, segment_boundaries

SMOOTH_STEPS_PER_PERIOD = 2000
DEFAULT_STEPS_PER_PERIOD = 8000


@dataclass(frozen=True)
class Spectrum:
    """Eigenpairs of a :class:`ChainHamiltonian`, eigenvalues ascending.

    Column ``j`` of ``eigenvectors`` belongs to ``eigenvalues[j]`` and has its
    largest-magnitude component positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    offset: int = 0
    energy_shift: float = 0.0

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    @property
    def size(self):
        return self.eigenvalues.size

    def coefficients(self, state):
        _check_window(state, self)
        return _rmatmul(self.eigenvectors.T, state.amplitudes)

    def reconstruct(self):
        vecs = self.eigenvectors
        return (vecs * self.eigenvalues) @ vecs.T


def _rmatmul(real_matrix, z):
    # real @ complex without upcasting the matrix
    return real_matrix @ z.real + 1j * (real_matrix @ z.imag)


def _check_window(state, spec):
    if state.offset != spec.offset or state.size != spec.size:
        raise ShapeMismatchError(
            f"state window (offset {state.offset}, size {state.size}) does not match "
            f"spectrum window (offset {spec.offset}, size {spec.size})")


def _fix_signs(vectors):
    # work on rows of the transpose: contiguous for LAPACK's column-major output
    cols = vectors.T
    idx = np.abs(cols).argmax(axis=1)
    signs = np.sign(cols[np.arange(cols.shape[0]), idx])
    signs[signs == 0] = 1.0
    return vectors * signs


def tridiagonal_ql(diagonal, offdiagonal, max_iter=60):
    """Eigenpairs of a symmetric tridiagonal matrix by implicit-shift QL.

    Returns unsorted eigenvalues and the matching eigenvectors as columns.
    """
    d = np.array(diagonal, dtype=float)
    n = d.size
    e = np.zeros(n)
    e[:-1] = offdiagonal
    # rows of zt are the columns of the eigenvector matrix
    zt = np.eye(n)
    eps = np.finfo(float).eps
    for l in range(n):
        iterations = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if iterations == max_iter:
                raise NumericalError(
                    f"QL iteration did not converge for eigenvalue {l} after "
                    f"{max_iter} sweeps (residual off-diagonal {abs(e[l]):.3e})")
            iterations += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            deflated = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                upper = zt[i + 1].copy()
                zt[i + 1] = s * zt[i] + c * upper
                zt[i] = c * zt[i] - s * upper
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, zt.T


def eigendecompose(h, method="lapack"):
    """Full spectrum of a chain Hamiltonian.

    ``method="lapack"`` uses LAPACK's MRRR tridiagonal solver, ``method="ql"``
    the in-package implicit QL iteration. Both return the same sign convention.
    """
    if not isinstance(h, ChainHamiltonian):
        raise TypeError("eigendecompose expects a ChainHamiltonian")
    if method == "lapack":
        try:
            values, vectors = eigh_tridiagonal(h.onsite, h.hopping)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"tridiagonal eigensolver failed: {exc}") from exc
    elif method == "ql":
        values, vectors = tridiagonal_ql(h.onsite, h.hopping)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    if np.any(np.diff(values) < 0):
        order = np.argsort(values, kind="stable")
        values, vectors = values[order], vectors[:, order]
    values = np.ascontiguousarray(values)
    vectors = _fix_signs(vectors)
    return Spectrum(values, vectors, offset=h.offset, energy_shift=h.energy_shift)


def evolve_const(state, spec, t):
    """``exp(-i H t) state`` for the Hamiltonian whose spectrum is ``spec``."""
    coeffs = spec.coefficients(state)
    coeffs = coeffs * np.exp(-1j * spec.eigenvalues * t)
    return StateVector(_rmatmul(spec.eigenvectors, coeffs), state.offset)


def evolve_const_many(state, spec, times):
    """Amplitudes of ``exp(-i H t) state`` for every ``t`` in ``times``, shape ``(T, N)``."""
    coeffs = spec.coefficients(state)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    phases = np.exp(-1j * np.outer(spec.eigenvalues, times)) * coeffs[:, None]
    return _rmatmul(spec.eigenvectors, phases).T


@dataclass
class Trajectory:
    """States sampled at strictly increasing times (units of ``1/omega``)."""

    times: np.ndarray
    amplitudes: np.ndarray
    offset: int
    schedule_id: str = "constant"

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.amplitudes.shape[0] != self.times.size:
            raise ValueError("one state per time is required")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def states(self):
        return [StateVector(a, self.offset) for a in self.amplitudes]

    @property
    def norms(self):
        return np.linalg.norm(self.amplitudes, axis=1)

    @property
    def final(self):
        return StateVector(self.amplitudes[-1], self.offset)


def chain_builder(params, sector=ParitySector.EVEN, chain="equivalent"):
    """Return ``f(omega_atom) -> ChainHamiltonian`` for the chosen chain model."""
    if chain == "equivalent":
        return lambda om: build_equivalent_chain(params, sector, omega_atom=om)
    if chain == "effective":
        return lambda om: build_effective_chain(params, True, omega_atom=om, sector=sector)
    raise ValueError(f"unknown chain model {chain!r}")


def _grid_steps(t_grid, dt):
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(t_grid < 0):
        raise ValueError("time grid must be non-negative")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("time grid must be strictly increasing")
    steps = np.rint(t_grid / dt).astype(np.int64)
    if np.any(np.abs(steps * dt - t_grid) > 1e-9 * max(1.0, t_grid.max())):
        raise ValueError("time grid values must be multiples of dt")
    return t_grid, steps


class _SpectrumCache:
    """Spectra keyed by drive value, rounded so periodic drives hit the cache."""

    def __init__(self, build, dt, method, max_entries):
        self.build = build
        self.dt = dt
        self.method = method
        self.max_entries = max_entries
        self.entries = {}

    def get(self, omega_atom):
        key = round(float(omega_atom), 12)
        entry = self.entries.get(key)
        if entry is None:
            if len(self.entries) >= self.max_entries:
                self.entries.clear()
            spec = eigendecompose(self.build(key), self.method)
            step_phase = np.exp(-1j * spec.eigenvalues * self.dt)
            entry = (spec, spec.eigenvectors.T, step_phase)
            self.entries[key] = entry
        return entry


def evolve_schedule(state, params, schedule, t_grid, dt=None, *, sector=ParitySector.EVEN,
                    chain="equivalent", method="auto", eigensolver="lapack",
                    max_cached_spectra=4096):
    """Propagate ``state`` under a drive ``Omega(t)`` and sample it on ``t_grid``.

    Parameters
    ----------
    dt : float, optional
        Mesh step; defaults to ``T_B / 8000``. Grid times must be multiples of it.
    method : {"auto", "midpoint", "segments"}
        ``"midpoint"`` samples the drive at the midpoint of each mesh step and
        applies that step's Hamiltonian exactly. ``"segments"`` (rectangular
        drives only) propagates exactly between pulse edges snapped onto the
        mesh. ``"auto"`` picks segments for rectangular and constant drives.

    Raises
    ------
    AccuracyError
        If a smooth drive is stepped coarser than ``T_B / 2000``.
    """
    period = params.bloch_period
    dt = period / DEFAULT_STEPS_PER_PERIOD if dt is None else float(dt)
    build = chain_builder(params, sector, chain)
    schedule_id = schedule.schedule_id

    if method == "auto":
        method = "midpoint" if not isinstance(schedule, (Constant, Rectangular)) else "segments"
    if method == "segments" and isinstance(schedule, Constant):
        # no mesh needed: one exact propagation to every grid time
        t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
        spec = eigendecompose(build(schedule.value), eigensolver)
        return Trajectory(t_grid, evolve_const_many(state, spec, t_grid), state.offset,
                          schedule_id)
    t_grid, grid_steps = _grid_steps(t_grid, dt)
    if method == "midpoint" and not isinstance(schedule, (Constant, Rectangular)):
        if dt > period / SMOOTH_STEPS_PER_PERIOD * (1 + 1e-12):
            raise AccuracyError(
                f"dt = {dt:.4g} exceeds T_B/{SMOOTH_STEPS_PER_PERIOD} for a smooth drive")

    if method == "segments":
        if not isinstance(schedule, Rectangular):
            raise ValueError("segment propagation needs a constant or rectangular drive")
        return _evolve_segments(state, schedule, t_grid, grid_steps, dt, build,
                                eigensolver, schedule_id)
    if method != "midpoint":
        raise ValueError(f"unknown propagation method {method!r}")

    cache = _SpectrumCache(build, dt, eigensolver, max_cached_spectra)
    amps = np.empty((t_grid.size, state.size), dtype=complex)
    pair = np.column_stack([state.amplitudes.real, state.amplitudes.imag])
    slot = 0
    if grid_steps[0] == 0:
        amps[0] = state.amplitudes
        slot = 1
    for k in range(int(grid_steps[-1])):
        spec, vt, step_phase = cache.get(omega_at(schedule, (k + 0.5) * dt))
        c = vt @ pair
        c = (c[:, 0] + 1j * c[:, 1]) * step_phase
        pair = spec.eigenvectors @ np.column_stack([c.real, c.imag])
        if k + 1 == grid_steps[slot]:
            amps[slot] = pair[:, 0] + 1j * pair[:, 1]
            slot += 1
    return Trajectory(t_grid, amps, state.offset, schedule_id)


def _evolve_segments(state, schedule, t_grid, grid_steps, dt, build, eigensolver,
                     schedule_id):
    t_end = grid_steps[-1] * dt
    edges = np.rint(segment_boundaries(schedule, t_end) / dt).astype(np.int64)
    marks = np.unique(np.concatenate([[0], edges, grid_steps]))
    marks = marks[(marks >= 0) & (marks <= grid_steps[-1])]
    spectra = {}
    amps = np.empty((t_grid.size, state.size), dtype=complex)
    grid_slot = {int(s): i for i, s in enumerate(grid_steps)}
    current = state
    if 0 in grid_slot:
        amps[grid_slot[0]] = state.amplitudes
    for start, stop in zip(marks[:-1], marks[1:]):
        # drive is constant on the snapped segment; sample it at its first step midpoint
        value = omega_at(schedule, (start + 0.5) * dt)
        spec = spectra.get(value)
        if spec is None:
            spec = spectra[value] = eigendecompose(build(value), eigensolver)
        current = evolve_const(current, spec, (stop - start) * dt)
        if int(stop) in grid_slot:
            amps[grid_slot[int(stop)]] = current.amplitudes
    return Trajectory(t_grid, amps, state.offset, schedule_id)
