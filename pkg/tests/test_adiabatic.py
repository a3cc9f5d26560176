import math

import numpy as np
import pytest

from chainbus.adiabatic import (
    adiabaticity,
    adiabaticity_curve,
    analytic_ground_state_initial,
    bound_state_residual,
    rayleigh_quotient,
    transfer_potential,
)
from chainbus.model import SystemParams, build_hamiltonian
from chainbus.spectral import eigendecompose


def anchor(l=19, j0=1.0, tau=480.0, **kw):
    return SystemParams(n_chain=48, attach_left=l, hop_endpoint=j0, total_time=tau, **kw)


def test_closed_form_constants():
    st = analytic_ground_state_initial(anchor())
    assert st.lambda_plus == pytest.approx(20.049876, abs=1e-6)
    assert st.lambda_minus == pytest.approx(0.049876, abs=1e-6)
    assert st.kappa == pytest.approx(2.998222, abs=1e-6)
    assert st.lambda_plus * st.lambda_minus == pytest.approx(1.0, rel=1e-12)
    assert np.linalg.norm(st.amplitudes) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("j0", [0.3, 0.9, 1.7])
def test_lambda_product(j0):
    st = analytic_ground_state_initial(anchor(j0=j0))
    assert st.lambda_plus * st.lambda_minus == pytest.approx(j0 * j0, rel=1e-12)


def test_symmetric_limit():
    st = analytic_ground_state_initial(anchor(j0=0.7, peak_voltage=1e-300))
    assert st.lambda_plus == pytest.approx(0.7, rel=1e-12)
    assert st.lambda_minus == pytest.approx(0.7, rel=1e-12)


@pytest.mark.parametrize("l", [5, 10, 19, 24])
def test_endpoint_population(l):
    st = analytic_ground_state_initial(anchor(l=l))
    assert st.endpoint_population == pytest.approx(0.9975, abs=5e-4)
    assert st.amplitudes[0] ** 2 == pytest.approx(st.endpoint_population, rel=1e-4)


@pytest.mark.parametrize("l", [5, 10, 19])
def test_overlap_with_numerical_ground_state(l):
    p = anchor(l=l)
    g = eigendecompose(build_hamiltonian(p, 0.0)).ground
    assert abs(g @ analytic_ground_state_initial(p).amplitudes) >= 0.999


def test_decoupled_closed_form_rejected():
    with pytest.raises(ValueError):
        analytic_ground_state_initial(anchor(j0=0.0))


def test_transfer_potential_examples():
    assert transfer_potential(anchor(), -20.05, "A", 0.0) == pytest.approx(-20.0, rel=1e-9)
    assert transfer_potential(anchor(j0=0.0), -3.0, "B", 17.0) == 0.0
    with pytest.raises(ZeroDivisionError):
        transfer_potential(anchor(), -20.0, "A", 0.0)


def test_transfer_potential_reproduces_dot_row():
    p = anchor()
    spec = eigendecompose(build_hamiltonian(p, 0.0))
    eps, g = spec.eigenvalues[0], spec.ground
    v = transfer_potential(p, eps, "A", 0.0)
    # exact eigenstate: the dot row reads J0 psi_A = -V psi_l
    assert abs(p.hop_endpoint * g[0] + v * g[p.attach_left]) <= 1e-8


def test_transfer_potential_closed_form_regression():
    # the closed form is a large-mu0 solution; its amplitude ratio misses
    # the exact dot-row relation at order 1/mu0^2
    p = anchor()
    eps = eigendecompose(build_hamiltonian(p, 0.0)).eigenvalues[0]
    amp = analytic_ground_state_initial(p).amplitudes
    v = transfer_potential(p, eps, "A", 0.0)
    assert abs(p.hop_endpoint * amp[0] + v * amp[p.attach_left]) <= 6e-3


def test_residual_of_exact_eigenpair():
    p = anchor(j0=0.9)
    spec = eigendecompose(build_hamiltonian(p, 123.0))
    for k in (0, 1, 7):
        r = bound_state_residual(spec.eigenvectors[:, k], spec.eigenvalues[k], p, 123.0)
        assert r <= 1e-9


def test_residual_of_closed_form():
    p = anchor()
    amp = analytic_ground_state_initial(p).amplitudes
    eps = rayleigh_quotient(amp, p, 0.0)
    assert bound_state_residual(amp, eps, p, 0.0) <= 1e-2


def test_residual_of_random_state():
    rng = np.random.default_rng(7)
    p = anchor()
    for _ in range(5):
        psi = rng.normal(size=p.dim)
        psi /= np.linalg.norm(psi)
        assert bound_state_residual(psi, rayleigh_quotient(psi, p, 0.0), p, 0.0) > 0.1


def test_frozen_pulses_are_adiabatic():
    p = anchor(l=19, j0=0.9)
    assert adiabaticity(p, 100.0, rates=(0.0, 0.0)) == 0.0


def wide_decoupled(tau=100.0):
    # pulses wide enough that the two dot levels meet below the band at tau/2
    return anchor(j0=0.0, tau=tau, pulse_width_factor=2.0)


def test_degenerate_gap_flagged():
    p = wide_decoupled(480.0)
    assert build_hamiltonian(p, 240.0).matrix[0, 0] < -2.0
    assert math.isinf(adiabaticity(p, 240.0))
    assert math.isfinite(adiabaticity(p, 100.0))


def test_adiabaticity_mirror_symmetry():
    p = anchor(l=19, j0=0.9)
    tau = p.total_time
    for t in np.linspace(0.0, tau, 21):
        a, b = adiabaticity(p, t), adiabaticity(p, tau - t)
        assert a == pytest.approx(b, rel=1e-8, abs=1e-12)


def test_adiabaticity_scale_invariance():
    # A ~ 1/tau at fixed shape, so A * tau is unchanged by tau -> s tau
    p = anchor(l=19, j0=0.9)
    q = p.replace(total_time=2 * p.total_time)
    for frac in (0.2, 0.37, 0.5, 0.81):
        a = adiabaticity(p, frac * p.total_time) * p.total_time
        b = adiabaticity(q, frac * q.total_time) * q.total_time
        assert a == pytest.approx(b, rel=1e-8)


def test_curve_matches_pointwise():
    p = anchor(l=19, j0=0.9)
    curve = adiabaticity_curve(p, 65)
    for t, v in curve.samples[::8]:
        assert v == pytest.approx(adiabaticity(p, t), rel=1e-9, abs=1e-14)


def test_curve_peaks_off_center():
    p = anchor(l=19, j0=0.9)
    curve = adiabaticity_curve(p, 801)
    tau = p.total_time
    step = tau / 800
    assert abs(curve.t_at_max - 0.5 * tau) > 0.05 * tau
    # the twin peak on the other half sits at the mirrored time
    other_half = (curve.times - 0.5 * tau) * (curve.t_at_max - 0.5 * tau) < 0
    twin = curve.times[other_half][np.argmax(curve.values[other_half])]
    assert abs(twin - (tau - curve.t_at_max)) <= step
    assert curve.max_value_times_tau == pytest.approx(curve.max_value * tau)


def test_curve_needs_enough_samples():
    with pytest.raises(ValueError):
        adiabaticity_curve(anchor(), 32)


def test_decoupled_curve_marks_crossings():
    curve = adiabaticity_curve(wide_decoupled(), 1001)
    assert curve.degenerate_mask[500]
    assert curve.degenerate_mask.sum() == 1
