"""Estimator-style front ends for the numerical simulator and the analytic predictor.

Both estimators take the physical parameters as constructor arguments, build
their internal state in :meth:`fit` and map an array of sample times (in
units of the Bloch period) to results:

* ``transform(times)`` returns the photon-number distribution ``P(n, t)``
  as a ``(n_times, n_photon_numbers)`` table;
* ``predict(times)`` returns the Bloch-frame probabilities ``[P_a, P_b]``
  as a ``(n_times, 2)`` table.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .analytic import predict_bo, predict_distribution
from .exceptions import InvalidWindowError, ValidityError
from .model import (
    ModelParams,
    ParitySector,
    build_effective_chain,
    gaussian_packet,
    map_product_state_to_sectors,
    validity_report,
)
from .observables import (
    EDGE_SITES,
    boundary_leakage,
    bo_overlap_series,
    distribution_table,
    table_moments,
)
from .propagate import (
    DEFAULT_STEPS_PER_PERIOD,
    eigendecompose,
    evolve_schedule,
)
from .schedules import Constant, make_schedule, omega_series

LEAKAGE_LIMIT = 1e-8
EDGE_AMPLITUDE_LIMIT = 1e-12
SECTORS = (ParitySector.EVEN, ParitySector.ODD)


def check_times(X, *, increasing=True):
    """Validate sample times given in Bloch periods; returns a 1-D float array."""
    times = check_array(X, ensure_2d=False, dtype=float, input_name="times")
    if times.ndim == 2:
        if times.shape[1] != 1:
            raise ValueError(f"times must be 1-D or a single column, got shape {times.shape}")
        times = times[:, 0]
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    if increasing and np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    return times


def resolve_params(L=None, g=None, omega_atom=1.0, n_bar=1.01e4, n0=None, k0=0.0,
                   alpha=0.1, window_halfwidth=None):
    """Build :class:`ModelParams` from either the Bloch extent ``L`` or the coupling ``g``."""
    if (L is None) == (g is None):
        raise ValueError("give exactly one of L and g")
    if g is None:
        g = -L / (4.0 * math.sqrt(n_bar))
    window = None
    if window_halfwidth is not None:
        center = int(round(n_bar))
        half = int(window_halfwidth)
        window = (max(0, center - half), center + half)
    return ModelParams(g=g, omega_atom=omega_atom, n_bar=n_bar, n0=n0, k0=k0,
                       alpha=alpha, window=window)


class _PhysicalParamsMixin:
    def _build_params(self):
        return resolve_params(L=self.L, g=self.g, omega_atom=self.omega_atom,
                              n_bar=self.n_bar, n0=self.n0, k0=self.k0, alpha=self.alpha,
                              window_halfwidth=self.window_halfwidth)

    def _build_schedule(self, params):
        return make_schedule(self.schedule, amplitude=self.omega_atom,
                             phi0=self.phi0_over_T * params.bloch_period,
                             period=params.bloch_period)


@dataclass
class SimulationResult:
    """Everything measured along one simulated run."""

    times: np.ndarray
    photon_numbers: np.ndarray
    distribution: np.ndarray
    centers: np.ndarray
    widths: np.ndarray
    p_a: np.ndarray
    p_b: np.ndarray
    p_a_sectors: np.ndarray
    p_b_sectors: np.ndarray
    norms: np.ndarray
    sector_weights: np.ndarray
    leakage: np.ndarray
    omega_atom: np.ndarray
    bloch_period: float

    @property
    def times_tb(self):
        return self.times / self.bloch_period

    @property
    def norm_drift(self):
        return float(np.max(np.abs(self.norms - self.norms[0])))


class BlochZenerSimulator(_PhysicalParamsMixin, TransformerMixin, BaseEstimator):
    """Numerical Rabi-model dynamics of a Gaussian photon-number packet.

    The atom starts in ``(|g> + |e>)/sqrt(2)``; each parity sector is evolved
    on its own chain.

    Parameters
    ----------
    L, g : float
        Bloch extent or signed coupling; exactly one must be given.
    omega_atom : float
        Constant atomic frequency, or the drive amplitude for a time-dependent schedule.
    n_bar : float
        Mean photon number; the chains subtract ``n_bar * omega``.
    n0, k0, alpha : float
        Packet center (defaults to ``n_bar``), momentum and inverse width.
    window_halfwidth : int, optional
        Half-width of the photon-number window around ``n_bar``.
    schedule : {"constant", "rectangular", "sinusoidal"}
    phi0_over_T : float
        Drive phase offset in units of the Bloch period.
    chain : {"equivalent", "effective"}
        Exact ``sqrt(n + 1)`` hopping or the uniform ``sqrt(n_bar)`` truncation.
    dt_per_period : float
        Mesh step in Bloch periods for time-dependent drives.
    strict : bool
        Raise :class:`ValidityError` instead of warning when validity checks fail.
    """

    def __init__(self, L=None, g=None, omega_atom=1.0, n_bar=1.01e4, n0=None, k0=0.0,
                 alpha=0.1, window_halfwidth=None, schedule="constant", phi0_over_T=0.0,
                 chain="equivalent", dt_per_period=1.0 / DEFAULT_STEPS_PER_PERIOD,
                 eigensolver="lapack", strict=False):
        self.L = L
        self.g = g
        self.omega_atom = omega_atom
        self.n_bar = n_bar
        self.n0 = n0
        self.k0 = k0
        self.alpha = alpha
        self.window_halfwidth = window_halfwidth
        self.schedule = schedule
        self.phi0_over_T = phi0_over_T
        self.chain = chain
        self.dt_per_period = dt_per_period
        self.eigensolver = eigensolver
        self.strict = strict

    def fit(self, X=None, y=None):
        params = self._build_params()
        report = validity_report(params)
        if report.flags:
            message = f"validity checks failed: {', '.join(report.flags)}"
            if self.strict:
                raise ValidityError(message)
            warnings.warn(message, RuntimeWarning, stacklevel=2)
        packet = gaussian_packet(params.n0, params.k0, params.alpha, params.window)
        edge = max(abs(packet.amplitudes[0]), abs(packet.amplitudes[-1]))
        if edge > EDGE_AMPLITUDE_LIMIT:
            raise InvalidWindowError(
                f"initial packet amplitude {edge:.2e} at the window edge exceeds "
                f"{EDGE_AMPLITUDE_LIMIT:g}; widen the window")
        amp = 1.0 / math.sqrt(2.0)
        even, odd, weights = map_product_state_to_sectors(amp, amp, packet)
        self.params_ = params
        self.validity_ = report
        self.schedule_ = self._build_schedule(params)
        self.initial_ = {ParitySector.EVEN: even, ParitySector.ODD: odd}
        self.weights_ = weights
        self.spectrum_h0_ = eigendecompose(build_effective_chain(params, stagger_on=False),
                                           self.eigensolver)
        self.prediction_ = predict_bo(params)
        self.dt_ = self.dt_per_period * params.bloch_period
        self.n_features_in_ = 1
        return self

    def _mesh_times(self, times_tb):
        steps = times_tb / self.dt_per_period
        snapped = np.rint(steps)
        if np.any(np.abs(snapped - steps) > 1e-6):
            raise ValueError("sample times must be multiples of dt_per_period")
        return snapped * self.dt_

    def simulate(self, X):
        """Evolve both sectors to the sample times ``X`` (Bloch periods)."""
        check_is_fitted(self)
        times_tb = check_times(X)
        if isinstance(self.schedule_, Constant):
            times = times_tb * self.params_.bloch_period
        else:
            times = self._mesh_times(times_tb)
        period = self.params_.bloch_period
        per_sector = {}
        for sector in SECTORS:
            traj = evolve_schedule(self.initial_[sector], self.params_, self.schedule_, times,
                                   self.dt_, sector=sector, chain=self.chain,
                                   eigensolver=self.eigensolver)
            p_a, p_b = bo_overlap_series(self.initial_[sector], self.spectrum_h0_,
                                         traj.amplitudes, times, period)
            per_sector[sector] = (traj.amplitudes, p_a, p_b)
        w = self.weights_
        even_amps, pa_e, pb_e = per_sector[ParitySector.EVEN]
        odd_amps, pa_o, pb_o = per_sector[ParitySector.ODD]
        table = distribution_table(even_amps, odd_amps, w)
        centers, widths = table_moments(table, self.params_.window[0])
        sector_norms = np.column_stack([np.linalg.norm(even_amps, axis=1),
                                        np.linalg.norm(odd_amps, axis=1)])
        sector_weights = sector_norms**2 * np.asarray(w)
        leakage = (w[0] * boundary_leakage(even_amps, EDGE_SITES)
                   + w[1] * boundary_leakage(odd_amps, EDGE_SITES))
        result = SimulationResult(
            times=times,
            photon_numbers=self.params_.photon_numbers,
            distribution=table,
            centers=centers,
            widths=widths,
            p_a=w[0] * pa_e + w[1] * pa_o,
            p_b=w[0] * pb_e + w[1] * pb_o,
            p_a_sectors=np.column_stack([pa_e, pa_o]),
            p_b_sectors=np.column_stack([pb_e, pb_o]),
            norms=np.sqrt(sector_weights.sum(axis=1)),
            sector_weights=sector_weights,
            leakage=leakage,
            omega_atom=omega_series(self.schedule_, times),
            bloch_period=period,
        )
        if np.max(leakage) > LEAKAGE_LIMIT:
            message = f"boundary leakage {np.max(leakage):.2e} exceeds {LEAKAGE_LIMIT:g}"
            if self.strict:
                raise ValidityError(message)
            warnings.warn(message, RuntimeWarning, stacklevel=2)
        return result

    def transform(self, X):
        return self.simulate(X).distribution

    def predict(self, X):
        result = self.simulate(X)
        return np.column_stack([result.p_a, result.p_b])


class AnalyticBlochPredictor(_PhysicalParamsMixin, TransformerMixin, BaseEstimator):
    """Closed-form two-packet predictor sharing the simulator's parameters.

    For a time-dependent drive the rate uses the drive's time average, which
    is what the diagonal ladder approximation retains.
    """

    def __init__(self, L=None, g=None, omega_atom=1.0, n_bar=1.01e4, n0=None, k0=0.0,
                 alpha=0.1, window_halfwidth=None, schedule="constant", phi0_over_T=0.0):
        self.L = L
        self.g = g
        self.omega_atom = omega_atom
        self.n_bar = n_bar
        self.n0 = n0
        self.k0 = k0
        self.alpha = alpha
        self.window_halfwidth = window_halfwidth
        self.schedule = schedule
        self.phi0_over_T = phi0_over_T

    def fit(self, X=None, y=None):
        params = self._build_params()
        schedule = self._build_schedule(params)
        if isinstance(schedule, Constant):
            mean_drive = schedule.value
        else:
            # average over a full period clear of phi0, where the pulse train has a gap
            start = abs(getattr(schedule, "phi0", 0.0)) + schedule.period
            mesh = (start + np.linspace(0.0, schedule.period, 4001)[:-1]
                    + schedule.period / 8000)
            mean_drive = float(np.mean(omega_series(schedule, mesh)))
        self.params_ = params
        self.schedule_ = schedule
        self.prediction_ = predict_bo(params, omega_atom=mean_drive)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self)
        t = check_times(X, increasing=False) * self.params_.bloch_period
        n = self.params_.photon_numbers
        return predict_distribution(n[None, :], t[:, None], self.params_,
                                    self.prediction_.gamma)

    def predict(self, X):
        check_is_fitted(self)
        t = check_times(X, increasing=False) * self.params_.bloch_period
        p_a, p_b = self.prediction_.probabilities(t)
        return np.column_stack([p_a, p_b])

    def centers(self, X):
        check_is_fitted(self)
        t = check_times(X, increasing=False) * self.params_.bloch_period
        n_a, n_b = self.prediction_.centers(t)
        return np.column_stack([n_a, n_b])
