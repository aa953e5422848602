"""Driven chirality qubit in the rotating frame and its dressed basis.

In the rotating frame of the drive the two-level Hamiltonian reads
(1/2)(delta_so * C_z + d*eps * C_x) with delta_so = omega_so - omega.  Its
eigenbasis (the dressed states) diagonalizes it to (omega_s / 2) * Cbar_z with
omega_s = sqrt(delta_so^2 + (d*eps)^2).  The weights delta_plus/minus/zero of
the bath coupling operator in the dressed basis drive all decay rates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroSplitting

__all__ = [
    "ChiralQubitParams",
    "make_params",
    "dressed_basis",
    "dressed_hamiltonian",
    "dressed_interaction_coefficients",
    "CZ",
    "CX",
    "CPLUS",
    "CMINUS",
]

# Chirality operators restricted to the qubit subspace (|chi_+>, |chi_->).
CZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
CX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
CPLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
CMINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class ChiralQubitParams:
    """Drive and splitting parameters plus the derived dressed quantities.

    All frequencies are dimensionless multiples of the per-run base unit.
    beta is the drive phase; it is a pure gauge for every quantity computed
    here (rates, polarization, entropy) and is kept for completeness only.
    """

    omega_so: float
    omega: float
    eps: float
    d: float
    beta: float = 0.0

    @property
    def delta_so(self) -> float:
        return self.omega_so - self.omega

    @property
    def d_eps(self) -> float:
        return self.d * self.eps

    @property
    def omega_s(self) -> float:
        return float(np.hypot(self.delta_so, self.d_eps))

    @property
    def delta_plus(self) -> float:
        return (self.omega_s + self.delta_so) / (2.0 * self.omega_s)

    @property
    def delta_minus(self) -> float:
        return (self.omega_s - self.delta_so) / (2.0 * self.omega_s)

    @property
    def delta_zero(self) -> float:
        return float(np.sqrt(self.delta_plus * self.delta_minus))


def make_params(omega_so, omega, eps, d, beta=0.0) -> ChiralQubitParams:
    """Validate and build qubit parameters.

    Raises ZeroSplitting when both the detuning and the drive amplitude
    vanish, which leaves the dressed basis undefined.
    """
    if eps < 0 or d < 0:
        raise ValueError("eps and d must be non-negative")
    p = ChiralQubitParams(float(omega_so), float(omega), float(eps), float(d), float(beta))
    if p.omega_s == 0.0:
        raise ZeroSplitting("omega_s = 0: detuning and drive amplitude are both zero")
    return p


def dressed_basis(params: ChiralQubitParams) -> np.ndarray:
    """Unitary U with columns |psi_+>, |psi_-> in the chirality basis.

    Convention: det U = +1, upper-left entry real positive.
    """
    sp = np.sqrt(params.delta_plus)
    sm = np.sqrt(params.delta_minus)
    return np.array([[sp, -sm], [sm, sp]], dtype=complex)


def dressed_hamiltonian(params: ChiralQubitParams) -> np.ndarray:
    """diag(+omega_s/2, -omega_s/2) in the (|up>, |down>) dressed ordering."""
    return np.diag([params.omega_s / 2.0, -params.omega_s / 2.0]).astype(complex)


def dressed_interaction_coefficients(params: ChiralQubitParams):
    """Coefficients (c_z, c_plus, c_minus) of the bath coupling operator.

    The chirality-lowering operator decomposes in the dressed interaction
    picture as c_z * Cbar_z + c_plus * e^{-i omega_s t} Cbar_- summed with
    c_minus * e^{+i omega_s t} Cbar_+, with c_z = delta_zero,
    c_plus = delta_plus and c_minus = -delta_minus.
    """
    return params.delta_zero, params.delta_plus, -params.delta_minus
