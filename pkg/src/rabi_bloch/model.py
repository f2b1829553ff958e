"""Run parameters, parity-sector chain Hamiltonians and the atom/photon <-> chain maps.

Units: the field frequency is fixed to ``OMEGA = 1``; energies are in units of
omega and times in units of ``1/omega``. Every chain subtracts ``n_bar * omega``
from its onsite energies so that phases stay small over long runs.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bessel import bessel_j
from .exceptions import InvalidWindowError, NormalizationError, ShapeMismatchError

OMEGA = 1.0
BLOCH_PERIOD = 2.0 * math.pi / OMEGA
SQRT_DEVIATION_LIMIT = 0.05
# 2/alpha on top of the 6/alpha localization extent
WINDOW_MARGIN_ALPHA = 8.0


class ParitySector(Enum):
    """Excitation-number parity sector; the value is the stagger exponent offset."""

    EVEN = 1
    ODD = 0

    @property
    def gamma_lambda(self):
        return self.value

    @property
    def label(self):
        return self.name.lower()


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of one run plus the photon-number truncation window.

    ``g`` is signed; with the usual negative coupling the Bloch extent
    ``L = -4 g sqrt(n_bar) / omega`` is positive. ``window`` defaults to
    ``[n_bar - W, n_bar + W]`` with ``W = ceil(L + 8/alpha)``.
    """

    g: float
    omega_atom: float = 1.0
    n_bar: float = 1.0e4
    n0: float = None
    k0: float = 0.0
    alpha: float = 0.1
    window: tuple = None
    omega: float = OMEGA

    def __post_init__(self):
        if self.n_bar < 1:
            raise ValueError(f"n_bar must be >= 1, got {self.n_bar}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not -math.pi <= self.k0 < math.pi:
            raise ValueError(f"k0 must lie in [-pi, pi), got {self.k0}")
        if not math.isfinite(self.L):
            raise ValueError("Bloch extent L is not finite")
        if self.n0 is None:
            object.__setattr__(self, "n0", float(self.n_bar))
        window = self.window if self.window is not None else default_window(
            self.L, self.alpha, self.n_bar)
        n_lo, n_hi = (int(w) for w in window)
        if n_lo < 0:
            raise InvalidWindowError(f"window contains negative photon numbers: {window}")
        if n_hi <= n_lo:
            raise InvalidWindowError(f"window must satisfy n_lo < n_hi, got {window}")
        if not n_lo <= self.n0 <= n_hi:
            raise InvalidWindowError(f"packet center {self.n0} outside window {window}")
        object.__setattr__(self, "window", (n_lo, n_hi))

    @classmethod
    def from_L(cls, L, n_bar=1.0e4, omega=OMEGA, **kwargs):
        """Build parameters from the Bloch extent, deriving ``g = -omega L / (4 sqrt(n_bar))``."""
        g = -omega * L / (4.0 * math.sqrt(n_bar))
        return cls(g=g, n_bar=n_bar, omega=omega, **kwargs)

    @property
    def L(self):
        return -4.0 * self.g * math.sqrt(self.n_bar) / self.omega

    @property
    def bloch_period(self):
        return 2.0 * math.pi / self.omega

    @property
    def photon_numbers(self):
        return np.arange(self.window[0], self.window[1] + 1)

    @property
    def size(self):
        return self.window[1] - self.window[0] + 1

    @property
    def window_guard_ok(self):
        """True when the window half-width around ``n_bar`` covers ``L + 8/alpha``."""
        half = min(self.n_bar - self.window[0], self.window[1] - self.n_bar)
        return half >= abs(self.L) + WINDOW_MARGIN_ALPHA / self.alpha

    def replace(self, **changes):
        values = {f: getattr(self, f) for f in
                  ("g", "omega_atom", "n_bar", "n0", "k0", "alpha", "window", "omega")}
        values.update(changes)
        return ModelParams(**values)


def default_window(L, alpha, n_bar):
    half = math.ceil(abs(L) + WINDOW_MARGIN_ALPHA / alpha)
    center = int(round(n_bar))
    return (max(0, center - half), center + half)


@dataclass(frozen=True)
class ChainHamiltonian:
    """Real symmetric tridiagonal operator over consecutive photon numbers.

    Site ``i`` carries photon number ``offset + i``; ``hopping[i]`` couples
    sites ``i`` and ``i + 1``. ``energy_shift`` has already been subtracted
    from ``onsite``.
    """

    onsite: np.ndarray
    hopping: np.ndarray
    offset: int
    energy_shift: float = 0.0

    def __post_init__(self):
        onsite = np.asarray(self.onsite, dtype=float)
        hopping = np.asarray(self.hopping, dtype=float)
        if onsite.ndim != 1 or onsite.size < 2:
            raise ValueError("chain needs at least two sites")
        if hopping.shape != (onsite.size - 1,):
            raise ShapeMismatchError(
                f"hopping length {hopping.size} does not match {onsite.size} sites")
        if not (np.all(np.isfinite(onsite)) and np.all(np.isfinite(hopping))):
            raise ValueError("chain entries must be finite")
        onsite.setflags(write=False)
        hopping.setflags(write=False)
        object.__setattr__(self, "onsite", onsite)
        object.__setattr__(self, "hopping", hopping)

    @property
    def size(self):
        return self.onsite.size

    @property
    def photon_numbers(self):
        return np.arange(self.offset, self.offset + self.size)

    def to_dense(self):
        return (np.diag(self.onsite) + np.diag(self.hopping, 1)
                + np.diag(self.hopping, -1))

    def matvec(self, vec):
        vec = np.asarray(vec)
        out = self.onsite * vec
        out[:-1] += self.hopping * vec[1:]
        out[1:] += self.hopping * vec[:-1]
        return out

    def norm_bound(self):
        """Gershgorin bound on the spectral norm."""
        row = np.abs(self.onsite).copy()
        row[:-1] += np.abs(self.hopping)
        row[1:] += np.abs(self.hopping)
        return float(row.max())


@dataclass
class StateVector:
    """Complex amplitudes over a photon-number window starting at ``offset``."""

    amplitudes: np.ndarray
    offset: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        self.offset = int(self.offset)

    @property
    def size(self):
        return self.amplitudes.size

    @property
    def photon_numbers(self):
        return np.arange(self.offset, self.offset + self.size)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    @property
    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def normalized(self):
        norm = self.norm
        if norm == 0.0:
            raise NormalizationError("cannot normalize a zero state")
        return StateVector(self.amplitudes / norm, self.offset)

    def same_window(self, other):
        return self.offset == other.offset and self.size == other.size


def _stagger(photon_numbers, gamma_lambda):
    return np.where((photon_numbers + gamma_lambda) % 2 == 0, 1.0, -1.0)


def _omega_value(params, omega_atom):
    return params.omega_atom if omega_atom is None else float(omega_atom)


def build_equivalent_chain(params, sector, omega_atom=None):
    """Parity-sector chain with the exact ``g sqrt(n + 1)`` hopping.

    ``omega_atom`` overrides ``params.omega_atom`` (the drive value on a
    constant segment).
    """
    sector = ParitySector(sector)
    n = params.photon_numbers
    omega_atom = _omega_value(params, omega_atom)
    shift = params.n_bar * params.omega
    onsite = (_stagger(n, sector.gamma_lambda) * omega_atom / 2.0
              + n * params.omega - shift)
    hopping = params.g * np.sqrt(n[:-1] + 1.0)
    return ChainHamiltonian(onsite, hopping, offset=int(n[0]), energy_shift=shift)


def build_effective_chain(params, stagger_on=True, omega_atom=None, sector=None):
    """Uniform-hopping chain ``g sqrt(n_bar)`` with a linear potential.

    With ``stagger_on`` the alternating ``(-1)^n Omega/2`` term is added. Passing a
    ``sector`` uses that sector's stagger sign ``(-1)^(gamma + n)`` instead, which
    makes the chain the direct truncation of the corresponding equivalent chain.
    """
    n = params.photon_numbers
    shift = params.n_bar * params.omega
    onsite = n * params.omega - shift
    if stagger_on:
        gamma_lambda = 0 if sector is None else ParitySector(sector).gamma_lambda
        onsite = onsite + _stagger(n, gamma_lambda) * _omega_value(params, omega_atom) / 2.0
    hopping = np.full(n.size - 1, params.g * math.sqrt(params.n_bar))
    return ChainHamiltonian(onsite, hopping, offset=int(n[0]), energy_shift=shift)


def stagger_profile(params, sector=None):
    """Sitewise ``(-1)^(gamma + n) / 2``: the chain's derivative with respect to Omega."""
    gamma_lambda = 0 if sector is None else ParitySector(sector).gamma_lambda
    return _stagger(params.photon_numbers, gamma_lambda) / 2.0


def gaussian_packet(n0, k0, alpha, window):
    """Discrete Gaussian packet ``exp(-alpha^2 (n - n0)^2 / 2 + i k0 n)``, unit norm."""
    n = np.arange(int(window[0]), int(window[1]) + 1)
    amps = np.exp(-0.5 * alpha**2 * (n - n0) ** 2 + 1j * k0 * n)
    return StateVector(amps / np.linalg.norm(amps), int(window[0]))


def initial_packet(params):
    return gaussian_packet(params.n0, params.k0, params.alpha, params.window)


def map_product_state_to_sectors(c_g, c_e, photon_amps, offset=0, tol=1e-12):
    """Split ``(c_g |g> + c_e |e>) (x) sum_n psi_n |n>`` into the two parity chains.

    The even chain holds ``|g, even n>`` and ``|e, odd n>``; the odd chain holds
    ``|e, even n>`` and ``|g, odd n>``. Chain site index equals photon number.

    Returns
    -------
    even, odd : StateVector
        Sector states, each renormalized (a zero-weight sector is returned as zeros).
    weights : tuple of float
        Squared norms of the two sector components; they sum to one.
    """
    if isinstance(photon_amps, StateVector):
        offset = photon_amps.offset
        photon_amps = photon_amps.amplitudes
    psi = np.asarray(photon_amps, dtype=complex)
    if abs(abs(c_g) ** 2 + abs(c_e) ** 2 - 1.0) > tol:
        raise NormalizationError("atomic coefficients are not normalized")
    if abs(np.vdot(psi, psi).real - 1.0) > tol:
        raise NormalizationError("photon amplitudes are not normalized")
    even_n = (np.arange(offset, offset + psi.size) % 2) == 0
    even = np.where(even_n, c_g, c_e) * psi
    odd = np.where(even_n, c_e, c_g) * psi
    weights = []
    sectors = []
    for amps in (even, odd):
        w = float(np.vdot(amps, amps).real)
        weights.append(w)
        sectors.append(StateVector(amps / math.sqrt(w) if w > 0 else amps, offset))
    return sectors[0], sectors[1], tuple(weights)


def sectors_to_atom_photon(even, odd, weights):
    """Inverse of :func:`map_product_state_to_sectors`.

    Returns a ``(2, N)`` complex array; row 0 holds ``<g, n|psi>`` and row 1
    ``<e, n|psi>`` for photon numbers ``even.offset + arange(N)``.
    """
    if not even.same_window(odd):
        raise ShapeMismatchError("sector states live on different windows")
    a_even = math.sqrt(weights[0]) * even.amplitudes
    a_odd = math.sqrt(weights[1]) * odd.amplitudes
    even_n = (even.photon_numbers % 2) == 0
    table = np.empty((2, even.size), dtype=complex)
    table[0] = np.where(even_n, a_even, a_odd)
    table[1] = np.where(even_n, a_odd, a_even)
    return table


@dataclass(frozen=True)
class ValidityReport:
    L: float
    D: float
    max_sqrt_deviation: float
    j0_at_L: float
    j1_at_L: float
    window_guard_ok: bool
    flags: tuple = field(default_factory=tuple)

    @property
    def ok(self):
        return not self.flags

    def as_dict(self):
        return {
            "L": self.L,
            "D": self.D,
            "max_sqrt_deviation": self.max_sqrt_deviation,
            "j0_at_L": self.j0_at_L,
            "j1_at_L": self.j1_at_L,
            "window_guard_ok": self.window_guard_ok,
            "flags": list(self.flags),
        }


def validity_report(params):
    """How well the uniform-hopping truncation holds for these parameters."""
    L = params.L
    D = L + 6.0 / params.alpha
    n = params.photon_numbers.astype(float)
    root = math.sqrt(params.n_bar)
    deviation = float(np.max(np.abs((np.sqrt(n) - root) / root)))
    flags = []
    if deviation > SQRT_DEVIATION_LIMIT:
        flags.append("sqrt_deviation")
    if not params.window_guard_ok:
        flags.append("window_guard")
    x = abs(L)
    j1 = bessel_j(1, x) if L >= 0 else -bessel_j(1, x)
    return ValidityReport(
        L=L,
        D=D,
        max_sqrt_deviation=deviation,
        j0_at_L=bessel_j(0, x),
        j1_at_L=j1,
        window_guard_ok=params.window_guard_ok,
        flags=tuple(flags),
    )
