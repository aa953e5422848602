"""Polarization, von Neumann entropy, Bloch states and the pointer-state scan."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import PropagationOptions, propagate
from .errors import InvalidState

__all__ = [
    "BlochState",
    "PointerScanResult",
    "polarization",
    "von_neumann_entropy",
    "bloch_to_state",
    "state_to_bloch",
    "pointer_scan",
]

_PAULI = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


@dataclass(frozen=True)
class BlochState:
    """Pure-state angles on the dressed Bloch sphere."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError("theta must lie in [0, pi]")
        if not 0.0 <= self.phi < 2.0 * np.pi:
            raise ValueError("phi must lie in [0, 2 pi)")

    @property
    def vector(self):
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


@dataclass
class PointerScanResult:
    thetas: np.ndarray
    scores: np.ndarray
    theta_p: float
    horizon: float
    measure: str


def polarization(rho) -> float:
    """Tr[rho Cbar_z] = rho_00 - rho_11 in the dressed basis."""
    rho = np.asarray(rho)
    return float((rho[0, 0] - rho[1, 1]).real)


def von_neumann_entropy(rho, positivity_tol: float = 1e-6) -> float:
    """E = -sum_i u_i ln u_i with 0 ln 0 = 0; bounded by ln 2 for a qubit.

    Eigenvalues in [-positivity_tol, 0) are clamped to zero for the log;
    anything more negative raises InvalidState.
    """
    rho = np.asarray(rho, dtype=complex)
    u = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if np.any(u < -positivity_tol) or np.any(u > 1.0 + positivity_tol):
        raise InvalidState(f"eigenvalues {u} outside [0, 1] beyond {positivity_tol:.1e}")
    u = np.clip(u, 0.0, 1.0)
    nz = u[u > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def bloch_to_state(b: BlochState) -> np.ndarray:
    """rho = (I + V . C) / 2 for the unit Bloch vector V."""
    v = b.vector
    rho = 0.5 * np.eye(2, dtype=complex)
    for comp, op in zip(v, _PAULI):
        rho += 0.5 * comp * op
    return rho


def state_to_bloch(rho):
    """Bloch vector (len <= 1) and purity Tr[rho^2] of a qubit state."""
    rho = np.asarray(rho, dtype=complex)
    v = np.array([np.trace(rho @ op).real for op in _PAULI])
    purity = float(np.trace(rho @ rho).real)
    return v, purity


def pointer_scan(bath, params, theta_grid, phi, horizon, times,
                 options: PropagationOptions | None = None,
                 kernels=None, measure: str = "time_average") -> PointerScanResult:
    """Locate the initial angle least entangled with the environment.

    Each theta on the grid is propagated from the pure Bloch state
    (theta, phi); the score is the entropy aggregated over [0, horizon]
    (time average by default, 'max' and 'final' as alternatives).  The
    pointer angle theta_p is the smallest theta attaining the minimal score
    within an absolute tie tolerance of 1e-12.
    """
    theta_grid = np.asarray(theta_grid, dtype=float)
    times = np.asarray(times, dtype=float)
    if theta_grid.size == 0:
        raise ValueError("theta grid must be non-empty")
    if horizon > times[-1] + 1e-12:
        raise ValueError("horizon exceeds the propagation grid")
    options = options or PropagationOptions()
    if kernels is None:
        from .bath import compute_kernels

        kernels = compute_kernels(bath, params, times)

    mask = times <= horizon + 1e-12
    scores = np.empty_like(theta_grid)
    for k, theta in enumerate(theta_grid):
        rho0 = bloch_to_state(BlochState(float(theta), float(phi)))
        traj = propagate(rho0, bath, params, times, options, kernels=kernels)
        ent = traj.entropy[mask]
        if measure == "time_average":
            scores[k] = np.trapezoid(ent, times[mask]) / max(times[mask][-1], 1e-300)
        elif measure == "max":
            scores[k] = ent.max()
        elif measure == "final":
            scores[k] = ent[-1]
        else:
            raise ValueError(f"unknown pointer measure '{measure}'")
    best = scores.min()
    theta_p = float(theta_grid[np.flatnonzero(scores <= best + 1e-12)[0]])
    return PointerScanResult(thetas=theta_grid, scores=scores, theta_p=theta_p,
                             horizon=float(horizon), measure=measure)
