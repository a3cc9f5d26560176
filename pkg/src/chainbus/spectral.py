"""
Instantaneous spectra and avoided-crossing gap analysis.

Eigenvectors returned here are phase fixed: each vector is scaled so that its
largest-magnitude component is positive.  Components whose magnitudes agree
to a relative 1e-10 count as ties and the lowest basis index wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import HamiltonianSnapshot, SystemParams, build_hamiltonian, hamiltonian_stack
from .optimize import golden_section_minimize

#: Gaps below this are reported as degenerate rather than as a number.
DEGENERACY_THRESHOLD = 1e-12

_TIE_RTOL = 1e-10


class EigensolverError(RuntimeError):
    """The dense eigensolver failed or was handed a non-finite matrix."""


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with phase-fixed eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    time: float

    @property
    def ground(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    @property
    def first_excited(self) -> np.ndarray:
        return self.eigenvectors[:, 1]

    @property
    def gap(self) -> float:
        return float(self.eigenvalues[1] - self.eigenvalues[0])


@dataclass(frozen=True)
class GapAnalysis:
    """Sampled gap eps_1(t) - eps_g(t) over the protocol and its minimum.

    ``min_gap`` is the grid minimum refined by golden-section search.
    ``gap_at_midpoint`` is the gap at t = tau/2, which is where the
    avoided crossing of the two dot levels sits.
    """

    times: np.ndarray
    gaps: np.ndarray
    min_gap: float
    t_at_min: float
    gap_at_midpoint: float
    degenerate_mask: np.ndarray

    @property
    def degenerate(self) -> bool:
        return self.min_gap < DEGENERACY_THRESHOLD or bool(self.degenerate_mask.any())

    @property
    def gap_curve(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.gaps.tolist()))


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Scale every column so its largest-magnitude entry is positive."""
    vectors = np.array(vectors, dtype=float)
    mags = np.abs(vectors)
    peak = mags.max(axis=0)
    # first index reaching the peak magnitude (within tie tolerance)
    lead = np.argmax(mags >= peak * (1.0 - _TIE_RTOL), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _as_matrix(h) -> tuple[np.ndarray, float]:
    if isinstance(h, HamiltonianSnapshot):
        return h.matrix, h.time
    return np.asarray(h, dtype=float), math.nan


def eigendecompose(h: HamiltonianSnapshot | np.ndarray) -> Spectrum:
    matrix, time = _as_matrix(h)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise EigensolverError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise EigensolverError("matrix contains non-finite entries")
    try:
        values, vectors = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver did not converge: {exc}") from exc
    return Spectrum(eigenvalues=values, eigenvectors=fix_phases(vectors), time=time)


def _lowest_gaps(stack: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(stack)):
        raise EigensolverError("matrix contains non-finite entries")
    try:
        values = np.linalg.eigvalsh(stack)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver did not converge: {exc}") from exc
    return values[..., 1] - values[..., 0]


def chain_spectrum(n_chain: int, hop: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigenpairs of the open uniform chain.

    Returns ``(energies, vectors)`` with ``energies[n-1] = -2J cos(n pi/(N+1))``
    and the sine standing waves ``sqrt(2/(N+1)) sin(k j)`` as columns, over
    chain sites only.
    """
    if n_chain < 1:
        raise ValueError(f"n_chain must be >= 1, got {n_chain}")
    n = np.arange(1, n_chain + 1)
    k = n * np.pi / (n_chain + 1)
    energies = -2.0 * hop * np.cos(k)
    j = np.arange(1, n_chain + 1)
    vectors = np.sqrt(2.0 / (n_chain + 1)) * np.sin(np.outer(j, k))
    return energies, vectors


def chain_minimum_gap_estimate(n_chain: int, hop: float = 1.0) -> float:
    """Band-bottom level spacing estimate 3 J pi^2 / N^2."""
    if n_chain < 2:
        raise ValueError(f"n_chain must be >= 2, got {n_chain}")
    return 3.0 * hop * math.pi**2 / n_chain**2


def instantaneous_gap(params: SystemParams, t: float) -> float:
    return eigendecompose(build_hamiltonian(params, t)).gap


def gap_analysis(
    params: SystemParams, n_samples: int = 1001, xtol: float | None = None, n_refine: int = 4
) -> GapAnalysis:
    """Sample the gap on a uniform grid over [0, tau] and refine its minimum.

    The ``n_refine`` lowest local minima of the sampled curve are each
    refined by golden-section search between their grid neighbours; the
    smallest refined value wins.  Narrow dips (exact level crossings at
    J0 = 0) can sit below a broad plateau that the grid alone would pick,
    as long as at least one sample falls inside the dip.  Exact ties go to
    the earliest time.
    """
    if n_samples < 3:
        raise ValueError(f"n_samples must be >= 3, got {n_samples}")
    tau = params.total_time
    times = np.linspace(0.0, tau, n_samples)
    gaps = _lowest_gaps(hamiltonian_stack(params, times))
    if xtol is None:
        xtol = 1e-9 * tau

    left = np.r_[np.inf, gaps[:-1]]
    right = np.r_[gaps[1:], np.inf]
    local = np.flatnonzero((gaps < left) & (gaps <= right))
    candidates = local[np.argsort(gaps[local], kind="stable")][:n_refine]

    best_gap, best_t = math.inf, None
    for i in sorted(candidates):
        lo = times[max(i - 1, 0)]
        hi = times[min(i + 1, n_samples - 1)]
        t_ref, g_ref = golden_section_minimize(lambda t: instantaneous_gap(params, t), lo, hi, xtol)
        g, t = (g_ref, t_ref) if g_ref < gaps[i] else (gaps[i], times[i])
        if best_t is None or g < best_gap - 1e-13 * max(best_gap, 1.0):
            best_gap, best_t = float(g), float(t)

    return GapAnalysis(
        times=times,
        gaps=gaps,
        min_gap=best_gap,
        t_at_min=best_t,
        gap_at_midpoint=instantaneous_gap(params, 0.5 * tau),
        degenerate_mask=gaps < DEGENERACY_THRESHOLD,
    )
