"""Exact diagonalization of a triangular spin-1/2 trimer with DM anisotropy.

The three-site Heisenberg triangle with Dzyaloshinskii-Moriya terms hosts a
four-fold ground multiplet (total spin 1/2) that splits into two chirality
doublets.  This module builds the 8x8 Hamiltonian, the scalar spin-chirality
operator, and projects onto the S_z = +1/2 ground doublet to extract the
effective two-level splitting omega_so.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TrimerParams",
    "TrimerSpectrum",
    "EffectiveProjection",
    "spin_half_site_ops",
    "build_trimer_hamiltonian",
    "chirality_operator_z",
    "total_sz",
    "total_s2",
    "chirality_doublet_states",
    "diagonalize",
    "derive_effective",
]

_SX = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
_SY = np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex)
_SZ = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
_I2 = np.eye(2, dtype=complex)

# Site ordering is s1 (x) s2 (x) s3; basis index = 4*b1 + 2*b2 + b3 with
# bit 0 = spin up, bit 1 = spin down.
_BONDS = ((0, 1), (1, 2), (2, 0))


@dataclass(frozen=True)
class TrimerParams:
    """Exchange couplings and DM vectors of the three bonds (1-2, 2-3, 3-1)."""

    exchange: tuple[float, float, float]
    dm_vectors: tuple[tuple[float, float, float], ...]

    @classmethod
    def isotropic(cls, j: float, d: float) -> "TrimerParams":
        """Uniform J on all bonds and D = (0, 0, d) on all bonds."""
        return cls(exchange=(j, j, j), dm_vectors=(((0.0, 0.0, d),) * 3))

    @property
    def dm_over_j(self) -> float:
        """Dimensionless |D_z| / J of the first bond (0 when J = 0)."""
        j = self.exchange[0]
        return abs(self.dm_vectors[0][2]) / j if j != 0 else 0.0

    def __post_init__(self):
        vals = list(self.exchange) + [c for v in self.dm_vectors for c in v]
        if not all(np.isfinite(vals)):
            raise ValueError("trimer couplings must be finite")
        if len(self.dm_vectors) != 3 or any(len(v) != 3 for v in self.dm_vectors):
            raise ValueError("dm_vectors must be three 3-vectors")


@dataclass
class TrimerSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    ground_multiplet: np.ndarray  # indices of the 4 lowest levels
    omega_so: float


@dataclass
class EffectiveProjection:
    """Projection of the trimer Hamiltonian onto the chirality doublet."""

    omega_so: float
    chiral_basis: np.ndarray  # (2, 8): rows |chi_+>, |chi_->, S_z = +1/2
    degenerate: bool = False
    projected: np.ndarray = field(default=None, repr=False)


def spin_half_site_ops():
    """Return s^x, s^y, s^z for each site as 8x8 arrays, shape (3, 3, 8, 8)."""
    ops = np.empty((3, 3, 8, 8), dtype=complex)
    for site in range(3):
        for a, s in enumerate((_SX, _SY, _SZ)):
            mats = [_I2, _I2, _I2]
            mats[site] = s
            ops[site, a] = np.kron(np.kron(mats[0], mats[1]), mats[2])
    return ops


_SITE = spin_half_site_ops()


def build_trimer_hamiltonian(params: TrimerParams) -> np.ndarray:
    """H0 = sum_i J_{i,i+1} s_i . s_{i+1} + sum_i D_{i,i+1} . (s_i x s_j)."""
    h = np.zeros((8, 8), dtype=complex)
    for (i, j), jij, dij in zip(_BONDS, params.exchange, params.dm_vectors):
        for a in range(3):
            h += jij * _SITE[i, a] @ _SITE[j, a]
        # (s_i x s_j)_a = eps_abc s_i^b s_j^c
        cross = (
            _SITE[i, 1] @ _SITE[j, 2] - _SITE[i, 2] @ _SITE[j, 1],
            _SITE[i, 2] @ _SITE[j, 0] - _SITE[i, 0] @ _SITE[j, 2],
            _SITE[i, 0] @ _SITE[j, 1] - _SITE[i, 1] @ _SITE[j, 0],
        )
        for a in range(3):
            h += dij[a] * cross[a]
    return h


def chirality_operator_z() -> np.ndarray:
    """Scalar spin chirality C_z = (4/sqrt(3)) s1 . (s2 x s3) on the full space."""
    s1, s2, s3 = _SITE[0], _SITE[1], _SITE[2]
    cz = (
        s1[0] @ (s2[1] @ s3[2] - s2[2] @ s3[1])
        + s1[1] @ (s2[2] @ s3[0] - s2[0] @ s3[2])
        + s1[2] @ (s2[0] @ s3[1] - s2[1] @ s3[0])
    )
    return 4.0 / np.sqrt(3.0) * cz


def total_sz() -> np.ndarray:
    return _SITE[0, 2] + _SITE[1, 2] + _SITE[2, 2]


def total_s2() -> np.ndarray:
    s2 = np.zeros((8, 8), dtype=complex)
    for a in range(3):
        tot = _SITE[0, a] + _SITE[1, a] + _SITE[2, a]
        s2 += tot @ tot
    return s2


def chirality_doublet_states() -> np.ndarray:
    """The C_z = +1 and C_z = -1 eigenstates in the S_z = +1/2 sector.

    Phase convention: the |down,up,up> amplitude is real positive.
    Returns shape (2, 8) with rows (|chi_+>, |chi_->).
    """
    w = np.exp(2j * np.pi / 3.0)
    chi = np.zeros((2, 8), dtype=complex)
    # single-down basis states: |duu> = 4, |udu> = 2, |uud> = 1
    for k, (amp_p, amp_m) in zip((4, 2, 1), ((1, 1), (w, w.conj()), (w ** 2, w.conj() ** 2))):
        chi[0, k] = amp_p / np.sqrt(3.0)
        chi[1, k] = amp_m / np.sqrt(3.0)
    return chi


def diagonalize(params: TrimerParams, degeneracy_rtol: float = 1e-9) -> TrimerSpectrum:
    """Full spectrum plus the derived chirality splitting."""
    h = build_trimer_hamiltonian(params)
    evals, evecs = np.linalg.eigh(h)
    eff = derive_effective(params, degeneracy_rtol=degeneracy_rtol)
    return TrimerSpectrum(
        eigenvalues=evals,
        eigenvectors=evecs,
        ground_multiplet=np.arange(4),
        omega_so=eff.omega_so,
    )


def derive_effective(params: TrimerParams, degeneracy_rtol: float = 1e-9) -> EffectiveProjection:
    """Project H0 onto the S_z = +1/2 chirality doublet.

    The trimer Hamiltonian restricted to the doublet must be diagonal in the
    chirality eigenbasis, (omega_so / 2) * diag(+1, -1) after removing the
    trace part.  omega_so is returned with its sign (flips with D -> -D).
    A degenerate flag is set instead of failing when the splitting vanishes.
    """
    h = build_trimer_hamiltonian(params)
    chi = chirality_doublet_states()
    block = chi.conj() @ h @ chi.T
    block = block - (np.trace(block).real / 2.0) * np.eye(2)
    off = max(abs(block[0, 1]), abs(block[1, 0]))
    if off > 1e-10:
        raise ValueError(
            f"projection onto the chirality doublet is not diagonal (off-diagonal {off:.3e}); "
            "parameters outside the supported z-axis DM family"
        )
    omega_so = float((block[0, 0] - block[1, 1]).real)
    jscale = max(abs(j) for j in params.exchange) or 1.0
    degenerate = abs(omega_so) < degeneracy_rtol * jscale
    if degenerate:
        omega_so = 0.0
    return EffectiveProjection(
        omega_so=omega_so, chiral_basis=chi, degenerate=degenerate, projected=block
    )
