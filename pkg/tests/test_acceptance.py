"""Acceptance suite: reference numbers and trends for the N = 48 bus.

Transfer distances for the dynamical runs (criteria 3, 4 and 7) count bonds
between the attachment sites, l' - l; the gap sweeps (criteria 5 and 6) count
sites, l' - l + 1.  Run ``pytest tests/test_acceptance.py -v`` for the
per-criterion summary at the end; ``-m "not slow"`` drops the transfer-time
scan.
"""

import math
import time

import numpy as np
import pytest

from chainbus.adiabatic import adiabaticity, analytic_ground_state_initial
from chainbus.cli import main
from chainbus.dynamics import exact_step_oracle, propagate, run_transfer
from chainbus.model import SystemParams, build_hamiltonian, mirror_permutation, pulse_voltage
from chainbus.spectral import chain_minimum_gap_estimate, chain_spectrum, eigendecompose
from chainbus.sweep import (
    fidelity_at,
    gap_vs_coupling,
    gap_vs_distance,
    linear_fit,
    minimum_transfer_time,
    optimize_coupling,
)

N = 48


def template(**kw):
    base = dict(n_chain=N, attach_left=19, hop_endpoint=0.9, total_time=480.0)
    base.update(kw)
    return SystemParams(**base)


@pytest.fixture(scope="module")
def optimum_d11():
    return optimize_coupling(template(), distance=11, tau=480.0, convention="bonds")


@pytest.fixture(scope="module")
def transfer_times():
    out = {}
    for d in range(7, 24, 2):
        out[d] = minimum_transfer_time(template(), distance=d, f_target=0.995, convention="bonds")
    return out


# -- 1 ----------------------------------------------------------------------

C1 = (1, "endpoint ground-state population 0.997 +- 0.001")


@pytest.mark.criterion(*C1)
def test_endpoint_population_closed_form():
    t0 = time.perf_counter()
    st = analytic_ground_state_initial(template(hop_endpoint=1.0))
    assert st.endpoint_population == pytest.approx(0.997, abs=1e-3)
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.criterion(*C1)
def test_endpoint_population_numerical():
    t0 = time.perf_counter()
    g = eigendecompose(build_hamiltonian(template(hop_endpoint=1.0), 0.0)).ground
    assert g[0] ** 2 == pytest.approx(0.997, abs=1e-3)
    assert time.perf_counter() - t0 < 1.0


# -- 2 ----------------------------------------------------------------------

C2 = (2, "band-bottom gap estimate within 5% (N=48) and 3% (N=100)")


@pytest.mark.criterion(*C2)
@pytest.mark.parametrize("n, rel", [(48, 0.05), (100, 0.03)])
def test_chain_gap_estimate(n, rel):
    t0 = time.perf_counter()
    e, _ = chain_spectrum(n)
    exact = e[1] - e[0]
    assert abs(chain_minimum_gap_estimate(n) - exact) / exact <= rel
    assert time.perf_counter() - t0 < 1.0


# -- 3 and 4 ----------------------------------------------------------------

C3 = (3, "anchor transfers reach F >= 0.99 at the optimal J0")
C4 = (4, "optimal J0 for D=11, tau=480 lies in [0.85, 0.95]")


@pytest.mark.criterion(*C3)
def test_anchor_d11_fidelity(optimum_d11):
    assert optimum_d11.fidelity >= 0.99
    p = template(attach_left=19)
    for j0 in (0.8, 1.0):
        assert fidelity_at(p.replace(hop_endpoint=j0)) < optimum_d11.fidelity


@pytest.mark.criterion(*C3)
@pytest.mark.slow
def test_anchor_d21_fidelity():
    opt = optimize_coupling(template(), distance=21, tau=1200.0, convention="bonds")
    assert opt.fidelity >= 0.99


@pytest.mark.criterion(*C4)
def test_optimal_coupling_location(optimum_d11):
    assert 0.85 <= optimum_d11.j0 <= 0.95


# -- 5 ----------------------------------------------------------------------

C5 = (5, "log gap linear in D (r^2 >= 0.95), slower decay at J0=0.5 than 0.7")


@pytest.fixture(scope="module")
def gap_fits():
    fits = {}
    for j0 in (0.5, 0.7):
        recs = gap_vs_distance(template(hop_endpoint=j0), range(8, 25, 2), convention="sites")
        fits[j0] = linear_fit([(r.inputs["distance"], math.log(r.value)) for r in recs])
    return fits


@pytest.mark.criterion(*C5)
@pytest.mark.parametrize("j0", [0.5, 0.7])
def test_gap_decay_is_exponential(gap_fits, j0):
    assert gap_fits[j0].r_squared >= 0.95
    assert gap_fits[j0].slope < 0


@pytest.mark.criterion(*C5)
def test_gap_decay_slower_for_weak_coupling(gap_fits):
    assert abs(gap_fits[0.5].slope) < abs(gap_fits[0.7].slope)


# -- 6 ----------------------------------------------------------------------

C6 = (6, "gap rises with J0 at D=8 and falls at D=24")


@pytest.mark.criterion(*C6)
def test_gap_vs_coupling_short_distance():
    weak, strong = gap_vs_coupling(template(), [0.3, 0.9], distance=8, convention="sites")
    assert strong.value > weak.value


@pytest.mark.criterion(*C6)
def test_gap_vs_coupling_long_distance():
    weak, strong = gap_vs_coupling(template(), [0.3, 0.9], distance=24, convention="sites")
    assert weak.value > strong.value


# -- 7 ----------------------------------------------------------------------

C7 = (7, "tau_min linear in D (r^2 >= 0.95), optimal J0 non-increasing")


@pytest.mark.criterion(*C7)
@pytest.mark.slow
def test_transfer_time_linear_in_distance(transfer_times):
    for d, res in sorted(transfer_times.items()):
        print(f"D={d:2d}  tau_min={res.tau_min:8.1f}  J0_opt={res.j0:.4f}  F={res.fidelity:.5f}")
    fit = linear_fit([(d, r.tau_min) for d, r in transfer_times.items()])
    print(f"fit: slope={fit.slope:.3f} intercept={fit.intercept:.2f} r^2={fit.r_squared:.4f}")
    assert fit.r_squared >= 0.95


@pytest.mark.criterion(*C7)
@pytest.mark.slow
def test_optimal_coupling_non_increasing(transfer_times):
    j0s = [transfer_times[d].j0 for d in sorted(transfer_times)]
    assert all(b <= a for a, b in zip(j0s, j0s[1:]))


# -- 8 ----------------------------------------------------------------------

C8 = (8, "property suites: unitarity, oracle agreement, mirror symmetry, contracts, determinism")


@pytest.mark.criterion(*C8)
@pytest.mark.parametrize(
    "l, j0, tau", [(19, 0.89, 480.0), (14, 0.6, 1200.0), (21, 1.2, 100.0), (1, 0.3, 50.0)]
)
def test_norm_drift(l, j0, tau):
    traj = run_transfer(template(attach_left=l, hop_endpoint=j0, total_time=tau), n_store=101)
    assert traj.norm_drift <= 1e-8


@pytest.mark.criterion(*C8)
@pytest.mark.parametrize("n, l", [(6, 2), (9, 4), (12, 3)])
def test_oracle_agreement(n, l):
    p = SystemParams(n_chain=n, attach_left=l, hop_endpoint=0.8, total_time=40.0, peak_voltage=10.0)
    psi = np.zeros(p.dim, dtype=complex)
    psi[0] = 1.0
    traj = propagate(p, psi, n_steps=800, n_store=2)
    dt = p.total_time / traj.n_steps
    state = psi
    for k in range(traj.n_steps):
        state = exact_step_oracle(p, state, k * dt, dt)
    assert np.max(np.abs(np.abs(state) ** 2 - np.abs(traj.amplitudes[-1]) ** 2)) <= 1e-6


@pytest.mark.criterion(*C8)
def test_mirror_identities():
    p = template()
    tau = p.total_time
    perm = mirror_permutation(N)
    g0 = eigendecompose(build_hamiltonian(p, 0.0)).ground
    gt = eigendecompose(build_hamiltonian(p, tau)).ground
    np.testing.assert_allclose(gt, g0[perm], atol=1e-8)
    for t in np.linspace(0.0, tau, 17):
        assert pulse_voltage(p, "A", t) == pytest.approx(pulse_voltage(p, "B", tau - t), rel=1e-14)
        a = eigendecompose(build_hamiltonian(p, t)).eigenvalues
        b = eigendecompose(build_hamiltonian(p, tau - t)).eigenvalues
        assert np.max(np.abs(a - b)) <= 1e-10
        assert adiabaticity(p, t) == pytest.approx(adiabaticity(p, tau - t), rel=1e-8, abs=1e-12)


@pytest.mark.criterion(*C8)
def test_eigensolver_contracts():
    p = template()
    for t in np.linspace(0.0, p.total_time, 9):
        h = build_hamiltonian(p, t).matrix
        spec = eigendecompose(h)
        v, e = spec.eigenvectors, spec.eigenvalues
        assert np.max(np.abs(h @ v - v * e)) <= 1e-9 * np.max(np.abs(e))
        assert np.max(np.abs(v.T @ v - np.eye(p.dim))) <= 1e-10


@pytest.mark.criterion(*C8)
def test_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        argv = ["sweep", "--kind", "gap-coupling", "--format", "json", "--output", str(target)]
        assert main(argv) == 0
    assert a.read_bytes() == b.read_bytes()
    first = gap_vs_coupling(template(), [0.4, 0.8], distance=16, convention="sites", n_samples=201)
    second = gap_vs_coupling(template(), [0.4, 0.8], distance=16, convention="sites", n_samples=201, workers=2)
    assert first == second
