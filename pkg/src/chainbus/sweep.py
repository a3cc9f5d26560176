"""
Parameter sweeps and optimisation over the endpoint coupling J0 and the
protocol time tau.

All sweeps take a template :class:`~chainbus.model.SystemParams` and vary a
single quantity; the other fields are copied from the template.  Records come
back in input order whether or not the points were evaluated in parallel.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .adiabatic import adiabaticity_curve
from .dynamics import default_n_steps, transfer_fidelity
from .model import Convention, SystemParams, attach_site_for_distance
from .optimize import golden_section_maximize
from .spectral import gap_analysis

#: Step-count divisor of the "fast" exploration mode.
FAST_FACTOR = 4


class UnreachableTargetError(RuntimeError):
    """No protocol time below the cap reaches the requested fidelity."""


@dataclass(frozen=True)
class SweepRecord:
    inputs: dict
    observable: str
    value: float


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class CouplingOptimum:
    """Best endpoint coupling at fixed distance and tau.

    ``fallback`` is set when the golden-section result failed the
    three-point sanity check and a fine grid scan was used instead.
    """

    j0: float
    fidelity: float
    fallback: bool = False
    evaluations: dict = field(default_factory=dict, repr=False, compare=False)

    def __iter__(self):
        return iter((self.j0, self.fidelity))


@dataclass(frozen=True)
class TransferTime:
    tau_min: float
    j0: float
    fidelity: float

    def __iter__(self):
        return iter((self.tau_min, self.j0))


def _inputs(params: SystemParams, **extra) -> dict:
    out = {
        "n": params.n_chain,
        "attach_left": params.attach_left,
        "j0": params.hop_endpoint,
        "mu0": params.peak_voltage,
        "tau": params.total_time,
        "hop": params.hop_chain,
        "pulse_width_factor": params.pulse_width_factor,
    }
    out.update(extra)
    return out


def _with_distance(template: SystemParams, distance: int, convention: Convention) -> SystemParams:
    return template.replace(
        attach_left=attach_site_for_distance(template.n_chain, distance, convention)
    )


def _distance_label(params: SystemParams, convention: Convention) -> int:
    # bond count is one less than the site count
    return params.distance - (1 if convention == "bonds" else 0)


def _map(fn, items, workers):
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _steps(params: SystemParams, n_steps: int | None, fast: bool) -> int:
    if n_steps is not None:
        return n_steps
    n = default_n_steps(params)
    return max(n // FAST_FACTOR, 2) if fast else n


def fidelity_at(params: SystemParams, n_steps: int | None = None, fast: bool = False) -> float:
    return transfer_fidelity(params, n_steps=_steps(params, n_steps, fast))


def _min_gap(params: SystemParams, n_samples: int) -> float:
    return gap_analysis(params, n_samples).min_gap


def _max_adiabaticity_tau(params: SystemParams, n_samples: int) -> float:
    return adiabaticity_curve(params, n_samples).max_value_times_tau


def gap_vs_distance(
    template: SystemParams,
    distances,
    convention: Convention = "sites",
    n_samples: int = 1001,
    workers: int | None = None,
) -> list[SweepRecord]:
    # validate everything before any computation
    points = [_with_distance(template, d, convention) for d in distances]
    values = _map(partial(_min_gap, n_samples=n_samples), points, workers)
    return [
        SweepRecord(_inputs(p, distance=d, convention=convention), "min_gap", v)
        for d, p, v in zip(distances, points, values)
    ]


def gap_vs_coupling(
    template: SystemParams,
    couplings,
    distance: int | None = None,
    convention: Convention = "sites",
    n_samples: int = 1001,
    workers: int | None = None,
) -> list[SweepRecord]:
    base = template if distance is None else _with_distance(template, distance, convention)
    points = [base.replace(hop_endpoint=j0) for j0 in couplings]
    values = _map(partial(_min_gap, n_samples=n_samples), points, workers)
    return [
        SweepRecord(_inputs(p, distance=_distance_label(p, convention), convention=convention), "min_gap", v)
        for p, v in zip(points, values)
    ]


def adiabaticity_vs_coupling(
    template: SystemParams,
    couplings,
    distance: int | None = None,
    convention: Convention = "sites",
    n_samples: int = 1001,
    workers: int | None = None,
) -> list[SweepRecord]:
    base = template if distance is None else _with_distance(template, distance, convention)
    points = [base.replace(hop_endpoint=j0) for j0 in couplings]
    values = _map(partial(_max_adiabaticity_tau, n_samples=n_samples), points, workers)
    return [
        SweepRecord(_inputs(p, distance=_distance_label(p, convention), convention=convention), "max_adiabaticity_tau", v)
        for p, v in zip(points, values)
    ]


def fidelity_vs_coupling(
    template: SystemParams,
    couplings,
    distance: int | None = None,
    tau: float | None = None,
    convention: Convention = "sites",
    n_steps: int | None = None,
    fast: bool = False,
    workers: int | None = None,
) -> list[SweepRecord]:
    base = template if distance is None else _with_distance(template, distance, convention)
    if tau is not None:
        base = base.replace(total_time=tau)
    points = [base.replace(hop_endpoint=j0) for j0 in couplings]
    values = _map(partial(fidelity_at, n_steps=n_steps, fast=fast), points, workers)
    return [
        SweepRecord(_inputs(p, distance=_distance_label(p, convention), convention=convention), "fidelity", v)
        for p, v in zip(points, values)
    ]


def optimize_coupling(
    template: SystemParams,
    distance: int | None = None,
    tau: float | None = None,
    convention: Convention = "sites",
    bracket: tuple[float, float] = (0.1, 1.5),
    tol: float = 1e-3,
    n_grid: int = 29,
    n_steps: int | None = None,
    fast: bool = False,
) -> CouplingOptimum:
    """Maximise the transfer fidelity over J0 at fixed distance and tau.

    A coarse grid over ``bracket`` picks the neighbourhood of the best
    point, golden-section search refines it to ``tol`` and the three-point
    check (refined value not below either neighbour) guards against a
    non-unimodal bracket.  On failure a grid of spacing ``tol`` is scanned
    instead.  The result is never worse than any grid point evaluated.
    """
    base = template if distance is None else _with_distance(template, distance, convention)
    if tau is not None:
        base = base.replace(total_time=tau)
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ValueError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
    if n_grid < 3:
        raise ValueError(f"n_grid must be >= 3, got {n_grid}")

    cache: dict[float, float] = {}

    def fid(j0: float) -> float:
        if j0 not in cache:
            cache[j0] = fidelity_at(base.replace(hop_endpoint=j0), n_steps=n_steps, fast=fast)
        return cache[j0]

    grid = np.linspace(lo, hi, n_grid)
    values = [fid(float(x)) for x in grid]
    i = int(np.argmax(values))
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, n_grid - 1)])
    x, fx = golden_section_maximize(fid, a, b, tol)

    fallback = fx < max(fid(a), fid(b))
    if fallback:
        for xf in np.linspace(a, b, int(math.ceil((b - a) / tol)) + 1):
            fid(float(xf))
    best = max(cache, key=lambda k: (cache[k], -k))
    return CouplingOptimum(j0=best, fidelity=cache[best], fallback=fallback, evaluations=dict(cache))


def minimum_transfer_time(
    template: SystemParams,
    distance: int | None = None,
    f_target: float = 0.995,
    convention: Convention = "sites",
    tau_start: float | None = None,
    tau_cap: float = 1e5,
    rel_tol: float = 0.01,
    growth: float = 1.05,
    bracket: tuple[float, float] = (0.1, 1.5),
    n_grid: int = 29,
    n_steps_per_tau: float | None = None,
    fast: bool = False,
) -> TransferTime:
    """Smallest tau whose J0-optimised fidelity reaches ``f_target``.

    The optimised fidelity is not monotone in tau: it oscillates around its
    adiabatic plateau.  So tau is stepped up geometrically by ``growth``
    from ``tau_start`` (20 D / J by default, capped at ``tau_cap``) until the target is first met,
    and the last step is then bisected geometrically to ``rel_tol``.  A
    crossing narrower than one growth step can be missed.  Every tau point
    optimises J0 over the full ``bracket``.
    """
    if not 0.0 < f_target < 1.0:
        raise ValueError(f"f_target must lie in (0, 1), got {f_target}")
    if growth <= 1.0 + rel_tol:
        raise ValueError(f"growth must exceed 1 + rel_tol, got {growth}")
    base = template if distance is None else _with_distance(template, distance, convention)
    if tau_start is None:
        tau_start = min(20.0 * _distance_label(base, convention) / base.hop_chain, tau_cap)
    if not 0.0 < tau_start <= tau_cap:
        raise ValueError(f"tau_start must lie in (0, tau_cap], got {tau_start}")

    results: dict[float, CouplingOptimum] = {}

    def reached(tau: float) -> bool:
        if tau not in results:
            n_steps = None if n_steps_per_tau is None else int(math.ceil(n_steps_per_tau * tau))
            results[tau] = optimize_coupling(
                base, tau=tau, bracket=bracket, n_grid=n_grid, n_steps=n_steps, fast=fast
            )
        return results[tau].fidelity >= f_target

    tau = float(tau_start)
    if reached(tau):
        hi = tau
        lo = hi / growth
        while reached(lo):
            hi, lo = lo, lo / growth
            if lo < 1e-3:
                raise UnreachableTargetError("target reached for vanishing tau; check inputs")
    else:
        lo = tau
        while True:
            if lo >= tau_cap:
                best = max(results.values(), key=lambda r: r.fidelity)
                raise UnreachableTargetError(
                    f"fidelity {f_target} not reached for tau <= {tau_cap:g}"
                    f" (best {best.fidelity:.6f})"
                )
            hi = min(lo * growth, tau_cap)
            if reached(hi):
                break
            lo = hi

    while hi / lo - 1.0 > rel_tol:
        mid = math.sqrt(lo * hi)
        if reached(mid):
            hi = mid
        else:
            lo = mid
    opt = results[hi]
    return TransferTime(tau_min=hi, j0=opt.j0, fidelity=opt.fidelity)


def linear_fit(points) -> FitResult:
    """Ordinary least squares y = slope x + intercept.

    A fit with zero residual sum of squares has r^2 = 1, including the
    constant-data case where the total sum of squares also vanishes.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError("linear_fit needs at least 3 (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ValueError("linear_fit needs at least two distinct x values")
    slope = float(dx @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    dy = y - y.mean()
    ss_tot = float(dy @ dy)
    if ss_res <= 1e-30 * max(ss_tot, 1.0):
        r2 = 1.0
    else:
        r2 = min(max(1.0 - ss_res / ss_tot, 0.0), 1.0) if ss_tot > 0 else 0.0
    return FitResult(slope=slope, intercept=intercept, r_squared=r2)
