"""Closed-form predictions for the staggered Wannier-Stark chain.

The uniform chain with a linear potential has an equally spaced ladder of
localized eigenstates with Bessel-function amplitudes. Treating the stagger as
diagonal in that ladder splits any packet into two ordinary Bloch oscillations
half a period apart, exchanging probability at rate ``gamma = (Omega/2) J_0(L)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j, bessel_j_orders
from .exceptions import InvalidWindowError
from .propagate import evolve_const

# support truncation allowed at the window edges
_EDGE_TOL = 1e-14


@dataclass(frozen=True)
class WannierStarkState:
    m: int
    L: float
    amplitudes: np.ndarray
    offset: int


def wannier_stark_amplitudes(m, L, window):
    """Real-space ladder state ``sum_l J_{l-m}(L/2) |l>`` over ``window``.

    Raises
    ------
    InvalidWindowError
        If the amplitude at either window edge exceeds ``1e-14``.
    """
    lo, hi = int(window[0]), int(window[1])
    sites = np.arange(lo, hi + 1)
    amps = bessel_j_orders(sites - int(m), abs(L) / 2.0)
    if L < 0:
        # J_k(-x) = (-1)^k J_k(x)
        amps = amps * np.where((sites - int(m)) % 2 == 0, 1.0, -1.0)
    if abs(amps[0]) > _EDGE_TOL or abs(amps[-1]) > _EDGE_TOL:
        raise InvalidWindowError(
            f"ladder state m={m} with L={L} is not contained in window {window}")
    return amps


def wannier_stark_state(m, L, window):
    return WannierStarkState(int(m), float(L), wannier_stark_amplitudes(m, L, window),
                             int(window[0]))


def wannier_stark_overlaps(amplitudes, offset, L, margin=None):
    """Overlaps ``<psi_m|phi>`` for every ladder index that can touch ``phi``.

    Returns ``(m_values, overlaps)``. ``margin`` widens the index range beyond
    the support of ``phi``; the default covers the Bessel tails to well below
    double precision.
    """
    amplitudes = np.asarray(amplitudes)
    if margin is None:
        margin = int(math.ceil(abs(L) / 2.0)) + 40
    sites = np.arange(offset, offset + amplitudes.size)
    m_values = np.arange(sites[0] - margin, sites[-1] + margin + 1)
    orders = sites[None, :] - m_values[:, None]
    # J_k(L/2) underflows long before |k| reaches this cutoff
    cutoff = min(256, int(math.ceil(abs(L) / 2.0)) + 60)
    inside = np.abs(orders) <= cutoff
    kernel = np.zeros(orders.shape)
    kernel[inside] = bessel_j_orders(orders[inside], abs(L) / 2.0)
    if L < 0:
        kernel = kernel * np.where(orders % 2 == 0, 1.0, -1.0)
    return m_values, kernel @ amplitudes


def gamma(omega_atom, L):
    """Transition rate ``(Omega/2) J_0(L)`` between the two Bloch oscillations."""
    return 0.5 * omega_atom * bessel_j(0, abs(L))


def reduced_propagator_phase(m, t, omega, gam):
    """Diagonal element ``exp(-i [m omega + (-1)^m gam] t)`` of the reduced propagator."""
    sign = 1.0 if int(m) % 2 == 0 else -1.0
    return np.exp(-1j * (m * omega + sign * gam) * t)


def predict_centers(n0, L, omega, t):
    """Centers ``(n_a, n_b)`` of the two packets for a ``k0 = 0`` start."""
    t = np.asarray(t, dtype=float)
    n_a = n0 - L * np.sin(0.5 * omega * t) ** 2
    n_b = n0 - L * np.cos(0.5 * omega * t) ** 2
    return n_a, n_b


def predict_probabilities(gam, t):
    """Envelope probabilities ``(cos^2(gam t), sin^2(gam t))``."""
    t = np.asarray(t, dtype=float)
    p_a = np.cos(gam * t) ** 2
    return p_a, 1.0 - p_a


def _gaussian_norm(params):
    n = params.photon_numbers
    return float(np.sum(np.exp(-params.alpha**2 * (n - params.n0) ** 2)))


def predict_distribution(n, t, params, gam=None):
    """Analytic photon-number distribution ``P(n, t)``.

    ``n`` and ``t`` broadcast against each other; pass ``n[None, :]`` and
    ``t[:, None]`` for a time-by-photon-number table. The packet starts at
    ``params.n0`` (equal to ``n_bar`` for the standard initial state).
    """
    if gam is None:
        gam = gamma(params.omega_atom, params.L)
    n = np.asarray(n, dtype=float)
    t = np.asarray(t, dtype=float)
    a2 = params.alpha**2
    w = params.omega
    half = math.pi / w
    n_t = params.n0 - params.L * np.sin(0.5 * w * t) ** 2
    n_t_half = params.n0 - params.L * np.sin(0.5 * w * (t + half)) ** 2
    envelope = (np.exp(-a2 * (n - n_t) ** 2) * np.cos(gam * t) ** 2
                + np.exp(-a2 * (n - n_t_half) ** 2) * np.sin(gam * t) ** 2)
    return envelope / _gaussian_norm(params)


def energy_gap(omega_atom, g, n_bar, k0):
    """Energy mismatch ``2 Omega g sqrt(n_bar) cos k0`` between a packet and its partner."""
    return 2.0 * omega_atom * g * math.sqrt(n_bar) * math.cos(k0)


def boost_reference(state, spec_h0, bloch_period):
    """Half-period free evolution, mapping ``psi_0(t)`` to ``psi_0(t + T_B/2)``."""
    return evolve_const(state, spec_h0, 0.5 * bloch_period)


@dataclass(frozen=True)
class BOPrediction:
    gamma: float
    bloch_period: float
    L: float
    n0: float
    omega: float
    n_pi: float

    def centers(self, t):
        return predict_centers(self.n0, self.L, self.omega, t)

    def probabilities(self, t):
        return predict_probabilities(self.gamma, t)

    def as_dict(self):
        return {"gamma": self.gamma, "T_B": self.bloch_period, "L": self.L,
                "n0": self.n0, "omega": self.omega, "n_pi": self.n_pi}


def predict_bo(params, omega_atom=None):
    """Bundle the closed-form trajectory quantities for ``params``."""
    omega_atom = params.omega_atom if omega_atom is None else omega_atom
    return BOPrediction(
        gamma=gamma(omega_atom, params.L),
        bloch_period=params.bloch_period,
        L=params.L,
        n0=params.n0,
        omega=params.omega,
        n_pi=-params.L * math.cos(params.k0),
    )
