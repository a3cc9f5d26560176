"""Adiabatic electron transfer through a tight-binding chain with two gate-pulsed endpoint dots."""

from .adiabatic import (
    AdiabaticityCurve,
    AnalyticGroundState,
    adiabaticity,
    adiabaticity_curve,
    analytic_ground_state_initial,
    bound_state_residual,
    transfer_potential,
)
from .dynamics import Trajectory, exact_step_oracle, propagate, run_transfer
from .model import (
    HamiltonianSnapshot,
    SystemParams,
    attach_site_for_distance,
    build_hamiltonian,
    mirror_index,
    pulse_derivative,
    pulse_voltage,
)
from .spectral import (
    GapAnalysis,
    Spectrum,
    chain_minimum_gap_estimate,
    chain_spectrum,
    eigendecompose,
    gap_analysis,
    instantaneous_gap,
)
from .sweep import (
    FitResult,
    SweepRecord,
    fidelity_vs_coupling,
    gap_vs_coupling,
    gap_vs_distance,
    linear_fit,
    minimum_transfer_time,
    optimize_coupling,
)

__version__ = "0.1.0"
