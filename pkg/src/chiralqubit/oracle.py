"""Brute-force validator: exact evolution of the qubit plus a few bath modes.

Reading the spectral density as a literal sum of discrete modes gives a
closed system small enough for dense matrix exponentials.  At T = 0 (vacuum
initial bath) this certifies the time-local pipeline, in particular the
squared-weight structure of the decay rates, without any master-equation
approximation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import _breakpoints, _nodes_weights, _refine
from .errors import DimensionError, WindowError
from .qubit import CMINUS, CPLUS, CZ, CX, ChiralQubitParams, dressed_basis

__all__ = ["DiscretizedBath", "discretize", "exact_evolve"]

_MAX_MODES = 8
_MAX_FOCK = 3
_MAX_DIM = 4096


@dataclass(frozen=True)
class DiscretizedBath:
    """Finite mode list [(coupling g_j, frequency omega_j)] with a Fock cutoff."""

    modes: tuple
    fock_cutoff: int = 2

    def __post_init__(self):
        if len(self.modes) > _MAX_MODES:
            raise DimensionError(f"at most {_MAX_MODES} modes supported")
        if not 1 <= self.fock_cutoff <= _MAX_FOCK:
            raise DimensionError(f"fock_cutoff must be in [1, {_MAX_FOCK}]")
        for g, w in self.modes:
            if g < 0 or w <= 0:
                raise ValueError("mode couplings must be >= 0 and frequencies > 0")

    @property
    def coupling_mass(self) -> float:
        return float(sum(g * g for g, _ in self.modes))


def _refined_integral(func, lo, hi, peaks, rel=1e-13):
    edges = _breakpoints(lo, hi, peaks, 0.0, 8.0)
    val = None
    for _ in range(24):
        nodes, wts = _nodes_weights(edges)
        new = float(np.sum(wts * func(nodes)))
        if val is not None and abs(new - val) <= rel * max(abs(new), 1e-300):
            return new
        val = new
        edges = _refine(edges)
    return val


def discretize(spectral, n_modes, window, fock_cutoff=2) -> DiscretizedBath:
    """Equal-mass mode placement: bin edge quantiles of J, centroid nodes.

    Each mode carries g_j^2 = integral of J over its bin, so the total
    coupling mass equals the window integral by construction.  Raises
    WindowError when the window misses more than 1e-3 of the spectral mass
    or contains essentially none of it.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    lo, hi = float(window[0]), float(window[1])
    if hi <= lo:
        raise WindowError("empty window")
    peaks = spectral.peaks()
    total = spectral.total_mass()
    in_window = _refined_integral(spectral.evaluate, lo, hi, peaks)
    if total <= 0.0 or in_window <= 1e-12 * max(total, 1e-300):
        raise WindowError("window contains no spectral mass")
    tail = 1.0 - in_window / total
    if tail > 1e-3:
        raise WindowError(f"window misses {tail:.2e} of the spectral mass (> 1e-3)")

    # approximate cumulative for edge placement only
    edges0 = _breakpoints(lo, hi, peaks, 0.0, 8.0)
    grid = np.unique(np.concatenate([
        np.linspace(a, b, 65) for a, b in zip(edges0[:-1], edges0[1:])
    ]))
    cum = np.concatenate([[0.0], np.cumsum(
        0.5 * (spectral.evaluate(grid[1:]) + spectral.evaluate(grid[:-1])) * np.diff(grid)
    )])
    quantiles = np.interp(np.linspace(0.0, cum[-1], n_modes + 1), cum, grid)
    quantiles[0], quantiles[-1] = lo, hi

    modes = []
    for a, b in zip(quantiles[:-1], quantiles[1:]):
        mass = _refined_integral(spectral.evaluate, a, b, peaks)
        first = _refined_integral(lambda w: w * spectral.evaluate(w), a, b, peaks)
        center = first / mass if mass > 0 else 0.5 * (a + b)
        modes.append((float(np.sqrt(max(mass, 0.0))), float(center)))
    return DiscretizedBath(modes=tuple(modes), fock_cutoff=fock_cutoff)


def _bath_ops(n_modes, q):
    """Lowering operator and number operator of each mode on the bath space."""
    b1 = np.diag(np.sqrt(np.arange(1, q)), 1).astype(complex)
    eye = np.eye(q, dtype=complex)
    lowers, numbers = [], []
    for j in range(n_modes):
        op_b = np.array([[1.0]], dtype=complex)
        for k in range(n_modes):
            op_b = np.kron(op_b, b1 if k == j else eye)
        lowers.append(op_b)
        numbers.append(op_b.conj().T @ op_b)
    return lowers, numbers


def exact_evolve(params: ChiralQubitParams, bath: DiscretizedBath, t_grid,
                 initial: str = "dressed_up"):
    """Exact rotating-frame evolution; returns the polarization series P(t).

    The total Hamiltonian is time independent in the frame rotating at the
    drive frequency: the qubit part (1/2)(delta_so C_z + d eps C_x), bath
    modes at shifted frequencies omega_j - omega, and the chirality-flip
    coupling g_j (b_j^dag C_- + b_j C_+).  The bath starts in the vacuum
    (T = 0) and the system in the upper dressed state, or in the bare
    positive-chirality state when initial='chi_plus'.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    q = bath.fock_cutoff + 1
    n_modes = len(bath.modes)
    bath_dim = q**n_modes
    dim = 2 * bath_dim
    if dim > _MAX_DIM:
        raise DimensionError(f"total dimension {dim} exceeds {_MAX_DIM}")

    lowers, numbers = _bath_ops(n_modes, q)
    eye_b = np.eye(bath_dim, dtype=complex)
    h_sys = 0.5 * (params.delta_so * CZ + params.d_eps * CX)
    h = np.kron(h_sys, eye_b)
    for (g, w), low, num in zip(bath.modes, lowers, numbers):
        h += (w - params.omega) * np.kron(np.eye(2, dtype=complex), num)
        h += g * (np.kron(CMINUS, low.conj().T) + np.kron(CPLUS, low))

    u = dressed_basis(params)
    if initial == "dressed_up":
        sys0 = u[:, 0]
    elif initial == "chi_plus":
        sys0 = np.array([1.0, 0.0], dtype=complex)
    else:
        raise ValueError("initial must be 'dressed_up' or 'chi_plus'")
    psi0 = np.kron(sys0, eye_b[:, 0])

    evals, evecs = np.linalg.eigh(h)
    w0 = evecs.conj().T @ psi0
    phases = np.exp(-1j * np.outer(evals, t_grid))
    psi_t = evecs @ (phases * w0[:, None])  # (dim, n_t)

    norms = np.sum(np.abs(psi_t) ** 2, axis=0)
    if np.max(np.abs(norms - 1.0)) > 1e-10:
        raise RuntimeError("state norm drifted beyond 1e-10")

    # dressed-basis C_z pulled back to the chirality basis
    cz_dressed = u @ CZ @ u.conj().T
    pol = np.empty(len(t_grid))
    for k in range(len(t_grid)):
        a = psi_t[:, k].reshape(2, bath_dim)
        rho_sys = a @ a.conj().T
        pol[k] = np.trace(rho_sys @ cz_dressed).real
    return pol
