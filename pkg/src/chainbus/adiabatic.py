"""
Bound-state ground state at t = 0, bound-state equation residuals and the
adiabaticity parameter

    A(t) = |<g| dH/dt |1>| / (eps_1 - eps_g)^2 .

Only the two dot energies depend on time, so dH/dt is diagonal with two
non-zero entries and the matrix element needs just the dot components of the
ground and first excited eigenvectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Dot, SystemParams, build_hamiltonian, hamiltonian_stack, pulse_derivative, pulse_voltage
from .spectral import DEGENERACY_THRESHOLD, eigendecompose, fix_phases


@dataclass(frozen=True)
class AnalyticGroundState:
    """Closed-form deep bound state localised on dot A at t = 0.

    ``norm_factor`` is the closed-form normalisation sum, which drops the
    exponentially small B-tail factor; ``amplitudes`` are normalised exactly.
    """

    lambda_plus: float
    lambda_minus: float
    kappa: float
    norm_factor: float
    amplitudes: np.ndarray
    #: (lambda_+ / J0)^2 / norm_factor, the dot-A weight of the closed form
    endpoint_population: float


def analytic_ground_state_initial(params: SystemParams) -> AnalyticGroundState:
    j, j0, mu0 = params.hop_chain, params.hop_endpoint, params.peak_voltage
    if j0 <= 0:
        raise ValueError("the closed-form bound state needs hop_endpoint > 0")
    n, l = params.n_chain, params.attach_left
    root = math.sqrt(mu0 * mu0 + 4.0 * j0 * j0)
    lam_p = 0.5 * (root + mu0)
    lam_m = 0.5 * (root - mu0)
    kappa = math.log(lam_p / j)

    sites = np.arange(1, n + 1)
    chain = np.exp(-kappa * np.abs(sites - l))
    norm_factor = float(np.sum(chain**2) + (mu0 * mu0 + 2.0 * j0 * j0) / (j0 * j0))

    raw = np.empty(n + 2)
    raw[0] = lam_p / j0
    raw[1:-1] = chain
    raw[-1] = lam_m / j0 * math.exp(-kappa * (n + 1 - 2 * l))
    return AnalyticGroundState(
        lambda_plus=lam_p,
        lambda_minus=lam_m,
        kappa=kappa,
        norm_factor=norm_factor,
        amplitudes=raw / np.linalg.norm(raw),
        endpoint_population=raw[0] ** 2 / norm_factor,
    )


def transfer_potential(params: SystemParams, energy: float, dot: Dot, t: float) -> float:
    """Energy-dependent potential J0^2 / (eps - mu_dot(t)) felt at the attachment site.

    Eliminating the dot amplitude from the eigen-equation leaves the chain
    row at the attachment site with ``eps - V`` on its right-hand side.
    """
    mu = pulse_voltage(params, dot, t)
    denom = energy - mu
    if denom == 0.0:
        raise ZeroDivisionError(f"transfer potential has a pole at eps = mu_{dot}(t) = {mu!r}")
    return params.hop_endpoint**2 / denom


def bound_state_residual(state, energy: float, params: SystemParams, t: float) -> float:
    """Max-norm residual ||H(t) psi - eps psi||_inf of the eigen-equation."""
    state = np.asarray(state)
    h = build_hamiltonian(params, t).matrix
    return float(np.max(np.abs(h @ state - energy * state)))


def rayleigh_quotient(state, params: SystemParams, t: float) -> float:
    state = np.asarray(state)
    h = build_hamiltonian(params, t).matrix
    return float(np.real(np.vdot(state, h @ state)) / np.real(np.vdot(state, state)))


def adiabaticity(params: SystemParams, t: float, rates: tuple[float, float] | None = None) -> float:
    """Adiabaticity parameter A(t); ``math.inf`` flags a degenerate gap.

    ``rates`` overrides (d mu_A/dt, d mu_B/dt), e.g. to freeze the pulses.
    """
    spec = eigendecompose(build_hamiltonian(params, t))
    if rates is None:
        rates = (pulse_derivative(params, "A", t), pulse_derivative(params, "B", t))
    return _adiabaticity(spec.eigenvalues, spec.eigenvectors, *rates)


def _adiabaticity(values, vectors, rate_a, rate_b) -> float:
    gap = values[1] - values[0]
    if gap < DEGENERACY_THRESHOLD:
        return math.inf
    g, e = vectors[:, 0], vectors[:, 1]
    element = rate_a * g[0] * e[0] + rate_b * g[-1] * e[-1]
    return float(abs(element) / gap**2)


@dataclass(frozen=True)
class AdiabaticityCurve:
    times: np.ndarray
    values: np.ndarray
    degenerate_mask: np.ndarray
    total_time: float

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.values.tolist()))

    @property
    def max_value(self) -> float:
        return float(self.values.max())

    @property
    def max_value_times_tau(self) -> float:
        return self.max_value * self.total_time

    @property
    def t_at_max(self) -> float:
        return float(self.times[int(np.argmax(self.values))])


def adiabaticity_curve(params: SystemParams, n_samples: int = 1001) -> AdiabaticityCurve:
    if n_samples < 33:
        raise ValueError(f"n_samples must be >= 33, got {n_samples}")
    times = np.linspace(0.0, params.total_time, n_samples)
    values, vectors = np.linalg.eigh(hamiltonian_stack(params, times))
    out = np.empty(n_samples)
    for k, t in enumerate(times):
        out[k] = _adiabaticity(
            values[k],
            fix_phases(vectors[k][:, :2]),
            pulse_derivative(params, "A", t),
            pulse_derivative(params, "B", t),
        )
    return AdiabaticityCurve(
        times=times, values=out, degenerate_mask=np.isinf(out), total_time=params.total_time
    )
