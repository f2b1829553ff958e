"""Measured quantities: photon distributions, Bloch-frame overlaps, packet moments."""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ShapeMismatchError
from .model import StateVector
from .propagate import evolve_const_many

FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))
EDGE_SITES = 5


@dataclass(frozen=True)
class DistributionFrame:
    t: float
    p: np.ndarray
    offset: int
    center: float
    width_fwhm: float

    @property
    def photon_numbers(self):
        return np.arange(self.offset, self.offset + self.p.size)


def _probabilities(obj):
    if isinstance(obj, DistributionFrame):
        return obj.p, obj.offset
    if isinstance(obj, StateVector):
        return obj.probabilities, obj.offset
    p, offset = obj
    return np.asarray(p, dtype=float), int(offset)


def packet_center(obj):
    """First moment ``sum_n n p[n]`` of a frame, state, or ``(p, offset)`` pair."""
    p, offset = _probabilities(obj)
    n = np.arange(offset, offset + p.size)
    # moments about the window start keep the products small
    return offset + float(np.dot(n - offset, p) / p.sum())


def _width_weights(p, profile):
    if profile == "amplitude":
        return np.sqrt(np.clip(p, 0.0, None))
    if profile == "probability":
        return p
    raise ValueError(f"unknown width profile {profile!r}")


def packet_width_fwhm(obj, profile="amplitude"):
    """``2 sqrt(2 ln 2) sigma`` with ``sigma`` the root second central moment.

    With ``profile="amplitude"`` the moment is taken over the amplitude envelope
    ``sqrt(p)``, so a packet ``exp(-alpha^2 (n - n0)^2 / 2)`` has width
    ``2 sqrt(2 ln 2) / alpha``. ``profile="probability"`` uses ``p`` itself,
    which is narrower by ``sqrt(2)`` for a Gaussian.
    """
    p, offset = _probabilities(obj)
    x = np.arange(p.size, dtype=float)
    w = _width_weights(p, profile)
    w = w / w.sum()
    mean = np.dot(x, w)
    var = max(float(np.dot((x - mean) ** 2, w)), 0.0)
    return FWHM_PER_SIGMA * math.sqrt(var)


def photon_distribution(even, odd, weights, t=0.0):
    """Photon-number distribution of a two-sector state.

    Chain site index equals photon number in both sectors, so
    ``p[n] = w_even |even_n|^2 + w_odd |odd_n|^2``.
    """
    if not even.same_window(odd):
        raise ShapeMismatchError("sector states live on different windows")
    p = weights[0] * even.probabilities + weights[1] * odd.probabilities
    return DistributionFrame(float(t), p, even.offset, packet_center((p, even.offset)),
                             packet_width_fwhm((p, even.offset)))


def distribution_table(even_amps, odd_amps, weights):
    """Row-wise photon distributions for stacked sector amplitudes, shape ``(T, N)``."""
    if np.shape(even_amps) != np.shape(odd_amps):
        raise ShapeMismatchError("sector trajectories have different shapes")
    return weights[0] * np.abs(even_amps) ** 2 + weights[1] * np.abs(odd_amps) ** 2


def table_moments(p_table, offset, profile="amplitude"):
    """Centers and FWHM widths (see :func:`packet_width_fwhm`) for each table row."""
    x = np.arange(p_table.shape[1], dtype=float)
    mean = p_table @ x / p_table.sum(axis=1)
    w = _width_weights(p_table, profile)
    w_norm = w.sum(axis=1)
    w_mean = w @ x / w_norm
    var = np.clip(w @ x**2 / w_norm - w_mean**2, 0.0, None)
    return offset + mean, FWHM_PER_SIGMA * np.sqrt(var)


def bo_overlap_series(initial, spec_h0, evolved_amps, times, bloch_period):
    """``P_a``, ``P_b`` at each time against the free-chain references.

    ``P_a(t) = |<psi_0(t)|psi(t)>|^2`` and ``P_b(t) = |<psi_0(t + T_B/2)|psi(t)>|^2``
    with ``psi_0(t) = exp(-i H_0 t) psi(0)``. The references are not orthogonal, so
    the two need not sum to one.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    evolved_amps = np.atleast_2d(evolved_amps)
    if evolved_amps.shape != (times.size, initial.size):
        raise ShapeMismatchError("evolved amplitudes do not match times and window")
    ref_a = evolve_const_many(initial, spec_h0, times)
    ref_b = evolve_const_many(initial, spec_h0, times + 0.5 * bloch_period)
    p_a = np.abs(np.sum(ref_a.conj() * evolved_amps, axis=1)) ** 2
    p_b = np.abs(np.sum(ref_b.conj() * evolved_amps, axis=1)) ** 2
    return p_a, p_b


def bo_overlap_probabilities(initial, spec_h0, evolved, t, bloch_period):
    """Single-time version of :func:`bo_overlap_series` for one chain state."""
    if not initial.same_window(evolved):
        raise ShapeMismatchError("initial and evolved states live on different windows")
    p_a, p_b = bo_overlap_series(initial, spec_h0, evolved.amplitudes[None, :], [t],
                                 bloch_period)
    return float(p_a[0]), float(p_b[0])


def momentum_estimate(state):
    """Mean lattice momentum from the phase of ``sum_n conj(psi_n) psi_{n+1}``."""
    amps = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
    return float(np.angle(np.vdot(amps[:-1], amps[1:])))


def wrap_angle(x):
    return (x + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class ConservationRecord:
    norm: float
    sector_weights: tuple
    boundary_leakage: float
    sector_energies: tuple


def boundary_leakage(amps, edge_sites=EDGE_SITES):
    """Probability on the outermost ``edge_sites`` sites of each edge (per row if 2-D)."""
    p = np.abs(np.asarray(amps)) ** 2
    return p[..., :edge_sites].sum(axis=-1) + p[..., -edge_sites:].sum(axis=-1)


def conservation_monitor(even, odd, weights, h_even, h_odd):
    """Total norm, per-sector weight, edge probability and sector energies."""
    if not even.same_window(odd):
        raise ShapeMismatchError("sector states live on different windows")
    w_even = weights[0] * even.norm**2
    w_odd = weights[1] * odd.norm**2
    leak = float(weights[0] * boundary_leakage(even.amplitudes)
                 + weights[1] * boundary_leakage(odd.amplitudes))
    energies = tuple(
        float(np.vdot(s.amplitudes, h.matvec(s.amplitudes)).real)
        for s, h in ((even, h_even), (odd, h_odd)))
    return ConservationRecord(
        norm=math.sqrt(w_even + w_odd),
        sector_weights=(w_even, w_odd),
        boundary_leakage=leak,
        sector_energies=energies,
    )
