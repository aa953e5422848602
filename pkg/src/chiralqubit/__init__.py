"""Open-system simulator for an electrically driven chirality qubit.

The low-energy doublet of a frustrated spin-1/2 triangle, driven by an AC
electric field and weakly coupled to a bosonic bath, evolves under a
time-local master equation with time-dependent decay rates.  This package
derives the effective qubit from the microscopic trimer, tabulates the bath
memory kernels for Lorentzian, Ohmic and cavity-filtered spectral densities,
propagates the dressed-basis density matrix (with or without the non-secular
generator), and reproduces the standard report scenarios from the CLI.
"""

__version__ = "0.1.0"

from .bath import (
    BathConfig,
    CavityEffective,
    KernelTable,
    Lorentzian,
    OhmicExp,
    QuadratureSpec,
    compute_kernels,
    compute_kernels_discrete,
    decay_rates,
    effective_alpha,
    kernel_integral,
    mean_occupation,
    spectral_eval,
)
from .dynamics import (
    PropagationOptions,
    Trajectory,
    analytic_polarization,
    lindblad_generator,
    nonsecular_term,
    propagate,
)
from .observables import (
    BlochState,
    PointerScanResult,
    bloch_to_state,
    pointer_scan,
    polarization,
    state_to_bloch,
    von_neumann_entropy,
)
from .oracle import DiscretizedBath, discretize, exact_evolve
from .qubit import (
    ChiralQubitParams,
    dressed_basis,
    dressed_hamiltonian,
    dressed_interaction_coefficients,
    make_params,
)
from .scenarios import ScenarioConfig, run_scenario, validate_config
from .trimer import (
    TrimerParams,
    TrimerSpectrum,
    build_trimer_hamiltonian,
    chirality_operator_z,
    derive_effective,
    diagonalize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
