"""Compiled time-stepping kernel for the chain-plus-dots Hamiltonian."""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _apply_h(out, v, n, l, lp, c_hop, c_hop0, d_a, d_b, d_chain):
    # out = (H - shift) v / scale with the scaled entries precomputed
    b = n + 1
    out[0] = d_a * v[0] - c_hop0 * v[l]
    out[b] = d_b * v[b] - c_hop0 * v[lp]
    out[1] = d_chain * v[1] - c_hop * v[2]
    for j in range(2, n):
        out[j] = d_chain * v[j] - c_hop * (v[j - 1] + v[j + 1])
    out[n] = d_chain * v[n] - c_hop * v[n - 1]
    out[l] -= c_hop0 * v[0]
    out[lp] -= c_hop0 * v[b]


@njit(cache=True)
def propagate_chebyshev(
    psi0,
    n,
    l,
    hop,
    hop0,
    mu0,
    tau,
    alpha,
    n_steps,
    store_every,
    coeffs,
    shift,
    scale,
    phase,
    reverse,
):
    """Midpoint-exponential steps exp(-i H(t_mid) dt), each expanded in
    Chebyshev polynomials of (H - shift) / scale with fixed ``coeffs``.

    Returns the stored states, one row every ``store_every`` steps
    (including t = 0 and t = tau).
    """
    dim = n + 2
    lp = n + 1 - l
    dt = tau / n_steps
    n_store = n_steps // store_every + 1
    out = np.empty((n_store, dim), dtype=np.complex128)
    psi = psi0.copy()
    out[0] = psi
    t_prev = np.empty(dim, dtype=np.complex128)
    t_cur = np.empty(dim, dtype=np.complex128)
    t_next = np.empty(dim, dtype=np.complex128)
    acc = np.empty(dim, dtype=np.complex128)
    n_terms = coeffs.shape[0]
    inv = 1.0 / scale
    c_hop = hop * inv
    c_hop0 = hop0 * inv
    d_chain = -shift * inv
    row = 1
    for step in range(n_steps):
        t = (step + 0.5) * dt
        if reverse:
            t = tau - t
        xa = alpha * t
        xb = alpha * (t - tau)
        mu_a = -mu0 * np.exp(-0.5 * xa * xa)
        mu_b = -mu0 * np.exp(-0.5 * xb * xb)
        d_a = (mu_a - shift) * inv
        d_b = (mu_b - shift) * inv

        for i in range(dim):
            t_prev[i] = psi[i]
            acc[i] = coeffs[0] * psi[i]
        if n_terms > 1:
            _apply_h(t_cur, t_prev, n, l, lp, c_hop, c_hop0, d_a, d_b, d_chain)
            for i in range(dim):
                acc[i] += coeffs[1] * t_cur[i]
        for k in range(2, n_terms):
            _apply_h(t_next, t_cur, n, l, lp, c_hop, c_hop0, d_a, d_b, d_chain)
            c = coeffs[k]
            for i in range(dim):
                nxt = 2.0 * t_next[i] - t_prev[i]
                t_prev[i] = t_cur[i]
                t_cur[i] = nxt
                acc[i] += c * nxt
        for i in range(dim):
            psi[i] = phase * acc[i]

        if (step + 1) % store_every == 0:
            out[row] = psi
            row += 1
    return out
