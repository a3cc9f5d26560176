"""
Time-dependent Schroedinger propagation, i d/dt |psi> = H(t) |psi>.

Each step applies the exact unitary of the midpoint Hamiltonian,
exp(-i H(t + dt/2) dt).  The exponential is evaluated by a Chebyshev
expansion carried to machine precision, so no renormalisation is ever
applied and any norm drift is a genuine error signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from ._kernels import propagate_chebyshev
from .model import SystemParams, build_hamiltonian
from .spectral import eigendecompose

#: Stored-state norm drift above this aborts the run.
NORM_DRIFT_LIMIT = 1e-6

_CHEB_CUTOFF = 1e-17


class NormDriftError(RuntimeError):
    """Propagation lost unitarity beyond :data:`NORM_DRIFT_LIMIT`."""


@dataclass(frozen=True)
class Trajectory:
    """Stored amplitudes c_A(t), c_j(t), c_B(t) on an ascending time grid."""

    times: np.ndarray
    amplitudes: np.ndarray
    n_steps: int

    @property
    def populations(self) -> np.ndarray:
        """Columns P_A, P_M (whole chain), P_B at every stored time."""
        prob = np.abs(self.amplitudes) ** 2
        return np.column_stack([prob[:, 0], prob[:, 1:-1].sum(axis=1), prob[:, -1]])

    @property
    def fidelity(self) -> float:
        """|c_B(tau)|^2."""
        return float(np.abs(self.amplitudes[-1:, -1])[0] ** 2)

    @property
    def norm_drift(self) -> float:
        norms = np.sum(np.abs(self.amplitudes) ** 2, axis=1)
        return float(np.max(np.abs(norms - 1.0)))


def default_n_steps(params: SystemParams) -> int:
    """At least 40 steps per period of the fastest bare frequency."""
    fastest = max(params.peak_voltage, 2.0 * params.hop_chain, 2.0 * params.hop_endpoint)
    return int(math.ceil(40.0 * params.total_time * fastest / (2.0 * math.pi)))


def spectral_bounds(params: SystemParams) -> tuple[float, float]:
    """Gershgorin interval containing the spectrum of H(t) for every t."""
    j, j0, mu0 = params.hop_chain, params.hop_endpoint, params.peak_voltage
    lo = min(-mu0 - j0, -2.0 * j - j0)
    hi = max(j0, 2.0 * j + j0)
    return lo, hi


def chebyshev_coefficients(scaled_dt: float) -> np.ndarray:
    """Coefficients of exp(-i z x) = sum_k c_k T_k(x) for |x| <= 1, z = scaled_dt."""
    k_max = int(scaled_dt) + 8
    while abs(jv(k_max, scaled_dt)) > _CHEB_CUTOFF:
        k_max += 4
    k = np.arange(k_max + 1)
    coeffs = 2.0 * (-1j) ** k * jv(k, scaled_dt)
    coeffs[0] *= 0.5
    return coeffs.astype(np.complex128)


def _basis_state(dim: int, index: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=np.complex128)
    psi[index] = 1.0
    return psi


def propagate(
    params: SystemParams,
    initial,
    n_steps: int | None = None,
    n_store: int = 501,
    time_reversed: bool = False,
) -> Trajectory:
    """Integrate from t = 0 to tau and store ``n_store`` equally spaced states.

    ``n_steps`` defaults to :func:`default_n_steps` and is rounded up to a
    multiple of ``n_store - 1`` so that snapshots fall on step boundaries.
    With ``time_reversed`` the schedule H(tau - t) is used instead of H(t).
    """
    psi0 = np.asarray(initial, dtype=np.complex128)
    if psi0.shape != (params.dim,):
        raise ValueError(f"initial state must have shape ({params.dim},), got {psi0.shape}")
    if abs(np.vdot(psi0, psi0).real - 1.0) > 1e-12:
        raise ValueError("initial state must be normalised to 1e-12")
    if n_steps is None:
        n_steps = default_n_steps(params)
    if n_store < 2 or n_steps < n_store:
        raise ValueError(f"need n_steps >= n_store >= 2, got n_steps={n_steps}, n_store={n_store}")
    store_every = -(-int(n_steps) // (n_store - 1))
    n_steps = store_every * (n_store - 1)

    lo, hi = spectral_bounds(params)
    shift = 0.5 * (hi + lo)
    # small margin keeps the scaled spectrum strictly inside [-1, 1]
    scale = 0.5 * (hi - lo) * 1.01
    dt = params.total_time / n_steps
    coeffs = chebyshev_coefficients(scale * dt)

    states = propagate_chebyshev(
        psi0,
        params.n_chain,
        params.attach_left,
        params.hop_chain,
        params.hop_endpoint,
        params.peak_voltage,
        params.total_time,
        params.alpha,
        n_steps,
        store_every,
        coeffs,
        shift,
        scale,
        complex(np.exp(-1j * shift * dt)),
        bool(time_reversed),
    )
    traj = Trajectory(
        times=np.linspace(0.0, params.total_time, n_store), amplitudes=states, n_steps=n_steps
    )
    drift = traj.norm_drift
    if not drift <= NORM_DRIFT_LIMIT:
        raise NormDriftError(
            f"norm drift {drift:.3e} exceeds {NORM_DRIFT_LIMIT:.0e} after {n_steps} steps"
        )
    return traj


def run_transfer(params: SystemParams, n_steps: int | None = None, n_store: int = 501) -> Trajectory:
    """Start on dot A and run the full protocol."""
    return propagate(params, _basis_state(params.dim, 0), n_steps=n_steps, n_store=n_store)


def transfer_fidelity(params: SystemParams, n_steps: int | None = None) -> float:
    return run_transfer(params, n_steps=n_steps, n_store=2).fidelity


def exact_step_oracle(params: SystemParams, state, t: float, dt: float) -> np.ndarray:
    """Apply exp(-i H(t + dt/2) dt) through a full eigendecomposition."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    spec = eigendecompose(build_hamiltonian(params, t + 0.5 * dt))
    v = spec.eigenvectors
    return v @ (np.exp(-1j * spec.eigenvalues * dt) * (v.T @ np.asarray(state, dtype=complex)))
