"""Bloch-Zener dynamics of the photon distribution in the quantum Rabi model."""

from .analytic import (
    BOPrediction,
    boost_reference,
    energy_gap,
    gamma,
    predict_bo,
    predict_centers,
    predict_distribution,
    predict_probabilities,
    reduced_propagator_phase,
    wannier_stark_amplitudes,
)
from .bessel import bessel_j, j0_zero
from .estimators import AnalyticBlochPredictor, BlochZenerSimulator, SimulationResult
from .model import (
    ChainHamiltonian,
    ModelParams,
    ParitySector,
    StateVector,
    build_effective_chain,
    build_equivalent_chain,
    gaussian_packet,
    map_product_state_to_sectors,
    sectors_to_atom_photon,
    validity_report,
)
from .observables import (
    bo_overlap_probabilities,
    conservation_monitor,
    packet_center,
    packet_width_fwhm,
    photon_distribution,
)
from .propagate import Spectrum, Trajectory, eigendecompose, evolve_const, evolve_schedule
from .schedules import Constant, Rectangular, Sinusoidal, omega_at, segment_boundaries

__version__ = "0.1.0"
