"""
System parameters, gate pulses and the instantaneous Hamiltonian.

The single-electron Hilbert space is spanned by the Wannier states of the
sender dot A, the N medium sites and the receiver dot B.  Every array in the
package uses the basis order ``[A, 1, 2, ..., N, B]``, i.e. dot A is index 0,
chain site j is index j and dot B is index N + 1.

Energies are measured in units of the chain hopping J and times in units of
1/J (hbar = 1).  J is still kept as an explicit field so that rescaling can
be tested.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

Dot = Literal["A", "B"]
Convention = Literal["sites", "bonds"]

#: Below this ratio mu0 / max(J, J0) the bound-state picture is unreliable.
WEAK_DRIVE_RATIO = 5.0


class InadmissibleDistanceError(ValueError):
    """The requested transfer distance cannot be realised on the chain."""


@dataclass(frozen=True)
class SystemParams:
    """Physical and protocol parameters of one transfer run.

    ``attach_left`` is the chain site l coupled to dot A.  Dot B is always
    attached to the mirror site l' = N + 1 - l, so the right attachment point
    is derived rather than stored.
    """

    n_chain: int
    attach_left: int
    hop_endpoint: float
    total_time: float
    hop_chain: float = 1.0
    peak_voltage: float = 20.0
    pulse_width_factor: float = 8.0

    def __post_init__(self):
        n, l = self.n_chain, self.attach_left
        if isinstance(n, bool) or int(n) != n or n < 2:
            raise ValueError(f"n_chain must be an integer >= 2, got {n!r}")
        if isinstance(l, bool) or int(l) != l or not 1 <= l <= n // 2:
            raise ValueError(
                f"attach_left must be an integer in [1, {n // 2}] for n_chain={n}, got {l!r}"
            )
        object.__setattr__(self, "n_chain", int(n))
        object.__setattr__(self, "attach_left", int(l))
        for name in ("hop_chain", "peak_voltage", "total_time", "pulse_width_factor"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
            object.__setattr__(self, name, value)
        j0 = float(self.hop_endpoint)
        # J0 = 0 is allowed as a diagnostic (decoupled dots).
        if not math.isfinite(j0) or j0 < 0:
            raise ValueError(f"hop_endpoint must be a non-negative finite number, got {j0!r}")
        object.__setattr__(self, "hop_endpoint", j0)

    @property
    def attach_right(self) -> int:
        return self.n_chain + 1 - self.attach_left

    @property
    def distance(self) -> int:
        """Transfer distance D = l' + 1 - l = N + 2 - 2l."""
        return self.attach_right + 1 - self.attach_left

    @property
    def dim(self) -> int:
        return self.n_chain + 2

    @property
    def alpha(self) -> float:
        """Inverse pulse width, alpha = pulse_width_factor / tau."""
        return self.pulse_width_factor / self.total_time

    @property
    def weak_drive(self) -> bool:
        """True when mu0 < 5 max(J, J0); the protocol is then unlikely to work."""
        return self.peak_voltage < WEAK_DRIVE_RATIO * max(self.hop_chain, self.hop_endpoint)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_distance(
        cls, n_chain: int, distance: int, convention: Convention = "sites", **kwargs
    ) -> "SystemParams":
        """Build parameters with the attachment site chosen for ``distance``."""
        l = attach_site_for_distance(n_chain, distance, convention)
        return cls(n_chain=n_chain, attach_left=l, **kwargs)


def attach_site_for_distance(n_chain: int, distance: int, convention: Convention = "sites") -> int:
    """Return the left attachment site l realising a transfer distance.

    Two counting conventions are supported:

    ``"sites"``
        D = l' + 1 - l = N + 2 - 2l, the number of chain sites from l to l'
        inclusive.  With an even chain only even D are admissible.
    ``"bonds"``
        D = l' - l = N + 1 - 2l, the number of chain bonds between the two
        attachment points.  With an even chain only odd D are admissible.

    A distance with the wrong parity for the chosen convention is rejected.
    """
    if convention == "sites":
        twice_l = n_chain + 2 - distance
    elif convention == "bonds":
        twice_l = n_chain + 1 - distance
    else:
        raise ValueError(f"unknown distance convention {convention!r}")
    if int(distance) != distance or twice_l % 2:
        raise InadmissibleDistanceError(
            f"distance D={distance} is not realisable on an N={n_chain} chain with the "
            f"{convention!r} convention (N + {2 if convention == 'sites' else 1} - D must be even)"
        )
    l = twice_l // 2
    if not 1 <= l <= n_chain // 2:
        raise InadmissibleDistanceError(
            f"distance D={distance} is out of range for an N={n_chain} chain "
            f"(attachment site l={l} not in [1, {n_chain // 2}])"
        )
    return int(l)


def pulse_voltage(params: SystemParams, dot: Dot, t: float) -> float:
    """Gaussian gate voltage mu_A(t) or mu_B(t); not truncated outside [0, tau]."""
    if dot == "A":
        shift = t
    elif dot == "B":
        shift = t - params.total_time
    else:
        raise ValueError(f"dot must be 'A' or 'B', got {dot!r}")
    x = params.alpha * shift
    return -params.peak_voltage * math.exp(-0.5 * x * x)


def pulse_derivative(params: SystemParams, dot: Dot, t: float) -> float:
    """Time derivative of :func:`pulse_voltage`."""
    if dot == "A":
        shift = t
    elif dot == "B":
        shift = t - params.total_time
    else:
        raise ValueError(f"dot must be 'A' or 'B', got {dot!r}")
    a = params.alpha
    return params.peak_voltage * a * a * shift * math.exp(-0.5 * (a * shift) ** 2)


@dataclass(frozen=True)
class HamiltonianSnapshot:
    """Real symmetric Hamiltonian matrix at one instant, basis ``[A, 1..N, B]``."""

    matrix: np.ndarray
    time: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def static_hamiltonian(params: SystemParams) -> np.ndarray:
    """Time-independent part H_M + H_I (chain bonds and dot couplings)."""
    n = params.n_chain
    h = np.zeros((n + 2, n + 2))
    bonds = np.arange(1, n)
    h[bonds, bonds + 1] = -params.hop_chain
    h[0, params.attach_left] = -params.hop_endpoint
    h[params.attach_right, n + 1] = -params.hop_endpoint
    return h + h.T


def build_hamiltonian(params: SystemParams, t: float) -> HamiltonianSnapshot:
    h = static_hamiltonian(params)
    h[0, 0] = pulse_voltage(params, "A", t)
    h[-1, -1] = pulse_voltage(params, "B", t)
    h.flags.writeable = False
    return HamiltonianSnapshot(matrix=h, time=float(t))


def hamiltonian_stack(params: SystemParams, times) -> np.ndarray:
    """Hamiltonian matrices at many times, shape ``(len(times), N+2, N+2)``."""
    times = np.asarray(times, dtype=float)
    stack = np.broadcast_to(static_hamiltonian(params), (times.size, params.dim, params.dim)).copy()
    stack[:, 0, 0] = [pulse_voltage(params, "A", t) for t in times]
    stack[:, -1, -1] = [pulse_voltage(params, "B", t) for t in times]
    return stack


def mirror_index(j: int | str, n_chain: int) -> int | str:
    """Mirror-conjugate site: j -> N + 1 - j on the chain, A <-> B."""
    if j == "A":
        return "B"
    if j == "B":
        return "A"
    if not 1 <= j <= n_chain:
        raise ValueError(f"site {j!r} is not in [1, {n_chain}]")
    return n_chain + 1 - j


def mirror_permutation(n_chain: int) -> np.ndarray:
    """Index permutation of the ``[A, 1..N, B]`` basis implementing the mirror."""
    return np.arange(n_chain + 1, -1, -1)
